"""Shared types and the diagonal weighted inner product.

Weights are the diagonal of a positive diagonal weight matrix; every metric
in the package is built from ``<a, b>_S = sum_i w_i a_i b_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class WMetricsError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(WMetricsError, ValueError):
    pass


class DegenerateLabels(WMetricsError, ValueError):
    """A labeling is constant, so a metric denominator vanishes."""


class PreconditionViolated(WMetricsError, ValueError):
    """A bound was requested outside the domain where it is valid.

    ``condition`` names the failed requirement (e.g. ``"eps < m/2"``).
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        msg = f"precondition violated: {condition}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WeightVector:
    """Strictly positive per-observation weights with a cached trace."""

    weights: np.ndarray
    trace: float = field(init=False)

    def __post_init__(self):
        w = _as_float_vector(self.weights, "weights")
        if w.size < 1:
            raise DimensionError("weights must contain at least one entry")
        # NaN fails the comparison; with every entry positive, inf shows up in the sum
        if not w.min() > 0:
            raise ValueError("weights must be strictly positive")
        trace = float(w.sum())
        if not np.isfinite(trace):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "trace", trace)

    @classmethod
    def uniform(cls, n: int, value: float = 1.0) -> "WeightVector":
        return cls(np.full(n, float(value)))

    def __len__(self) -> int:
        return self.weights.size

    def scaled(self, alpha: float) -> "WeightVector":
        return WeightVector(self.weights * alpha)


@dataclass(frozen=True)
class BinaryLabeledData:
    truth: np.ndarray
    prediction: np.ndarray

    def __post_init__(self):
        t = np.array(self.truth, dtype=np.float64)
        c = np.array(self.prediction, dtype=np.float64)
        if t.ndim != 1 or c.ndim != 1:
            raise DimensionError("truth and prediction must be one-dimensional")
        if t.shape != c.shape:
            raise DimensionError(
                f"truth has length {t.size} but prediction has length {c.size}"
            )
        # x(1-x) vanishes exactly on {0, 1}; NaN also trips the check
        both = np.concatenate((t, c))
        if np.any(both * (1 - both)):
            name = "truth" if np.any(t * (1 - t)) else "prediction"
            raise ValueError(f"{name} entries must be 0 or 1")
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "truth", t)
        object.__setattr__(self, "prediction", c)

    def __len__(self) -> int:
        return self.truth.size

    @property
    def n(self) -> int:
        return self.truth.size


@dataclass(frozen=True)
class MulticlassLabeledData:
    """Class assignments over ``num_classes`` classes, 0-based."""

    truth_class: np.ndarray
    predicted_class: np.ndarray
    num_classes: int

    def __post_init__(self):
        t = np.array(self.truth_class)
        c = np.array(self.predicted_class)
        if t.ndim != 1 or c.ndim != 1:
            raise DimensionError("class sequences must be one-dimensional")
        if t.shape != c.shape:
            raise DimensionError(
                f"truth has length {t.size} but prediction has length {c.size}"
            )
        k = int(self.num_classes)
        if k < 2:
            raise ValueError(f"num_classes must be at least 2, got {k}")
        for name, arr in (("truth_class", t), ("predicted_class", c)):
            if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError(f"{name} must contain integer class indices")
            if arr.size and (arr.min() < 0 or arr.max() >= k):
                raise ValueError(f"{name} indices must lie in [0, {k})")
        t = t.astype(np.int64)
        c = c.astype(np.int64)
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "truth_class", t)
        object.__setattr__(self, "predicted_class", c)
        object.__setattr__(self, "num_classes", k)

    def __len__(self) -> int:
        return self.truth_class.size

    @property
    def n(self) -> int:
        return self.truth_class.size


def _check_lengths(*arrays) -> None:
    sizes = {np.shape(a)[-1] for a in arrays}
    if len(sizes) != 1:
        raise DimensionError(f"length mismatch: {sorted(sizes)}")


def weighted_inner(a, b, w) -> float:
    """Return ``sum_i w_i * a_i * b_i``."""
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or weights.ndim != 1:
        raise DimensionError("weighted_inner expects one-dimensional vectors")
    _check_lengths(a, b, weights)
    return float(np.dot(weights, a * b))


def one_hot_matrix(classes, num_classes: int) -> np.ndarray:
    """K x N indicator matrix whose column n is the unit vector of ``classes[n]``."""
    classes = np.asarray(classes, dtype=np.int64)
    out = np.zeros((num_classes, classes.size), dtype=np.float64)
    out[classes, np.arange(classes.size)] = 1.0
    return out


def one_hot(data: MulticlassLabeledData) -> tuple[np.ndarray, np.ndarray]:
    return (
        one_hot_matrix(data.truth_class, data.num_classes),
        one_hot_matrix(data.predicted_class, data.num_classes),
    )
