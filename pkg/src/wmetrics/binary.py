"""Weighted confusion masses and the weighted Matthews correlation coefficient.

With weights w, truth t and prediction c (binary vectors),

    TP = <t, c>      TN = <1-t, 1-c>      FP = <1-t, c>      FN = <t, 1-c>

where <a, b> = sum_i w_i a_i b_i, and

    MCC = (TP TN - FP FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)).

Each of TP TN and FP FN is bounded by the denominator, so this form loses at
most a few ulps to cancellation. The algebraically equal inner-product form
<t,c><1,1> - <t,1><1,c> does not share that property when weights span many
orders of magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BinaryLabeledData,
    DegenerateLabels,
    DimensionError,
    WeightVector,
)


@dataclass(frozen=True)
class WeightedConfusion:
    tp: float
    tn: float
    fp: float
    fn: float

    @property
    def total(self) -> float:
        return self.tp + self.tn + self.fp + self.fn


def _weights_of(data: BinaryLabeledData, w) -> np.ndarray:
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    if weights.shape[-1] != data.n:
        raise DimensionError(
            f"{data.n} observations but {weights.shape[-1]} weights"
        )
    return weights


def confusion_arrays(t: np.ndarray, c: np.ndarray, weights: np.ndarray):
    """(tp, tn, fp, fn); ``weights`` may be batched as ``(..., N)``."""
    nt = 1 - t
    nc = 1 - c
    return weights @ (t * c), weights @ (nt * nc), weights @ (nt * c), weights @ (t * nc)


def _masses(data: BinaryLabeledData, w):
    weights = _weights_of(data, w)
    if weights.ndim != 1:
        raise DimensionError("expected a single weight vector")
    # cell index 2t + c orders the masses as tn, fp, fn, tp
    cells = (2 * data.truth + data.prediction).astype(np.intp)
    tn, fp, fn, tp = np.bincount(cells, weights=weights, minlength=4)
    return tp, tn, fp, fn


def confusion(data: BinaryLabeledData, w: WeightVector) -> WeightedConfusion:
    tp, tn, fp, fn = _masses(data, w)
    return WeightedConfusion(tp=float(tp), tn=float(tn), fp=float(fp), fn=float(fn))


def _mcc_from_masses(tp, tn, fp, fn):
    den = np.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    # rounding can push |num/den| a few ulp past 1
    return np.clip((tp * tn - fp * fn) / den, -1.0, 1.0)


def mcc_arrays(t: np.ndarray, c: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted MCC without validation, one value per weight vector in ``weights``.

    Callers must ensure neither ``t`` nor ``c`` is constant.
    """
    return _mcc_from_masses(*confusion_arrays(t, c, weights))


def mcc(data: BinaryLabeledData, w: WeightVector) -> float:
    """Weighted MCC of ``data`` under weights ``w``.

    Raises DegenerateLabels when truth or prediction is constant.
    """
    tp, tn, fp, fn = _masses(data, w)
    # weights are positive, so a class mass is exactly zero iff the class is empty
    if tp + fn == 0 or tn + fp == 0:
        raise DegenerateLabels("truth is constant; MCC is undefined")
    if tp + fp == 0 or tn + fn == 0:
        raise DegenerateLabels("prediction is constant; MCC is undefined")
    return float(_mcc_from_masses(tp, tn, fp, fn))
