"""Synthetic segment-sweep experiments.

A prediction vector agrees with the truth at proportion ``p`` inside a
contiguous segment and at proportion ``p0`` everywhere else. Sliding the
segment start across the sample and averaging each metric over many random
draws shows how weighted and unweighted measures react to where the good
(or bad) predictions sit relative to the heavy observations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .binary import mcc
from .core import BinaryLabeledData, DegenerateLabels, MulticlassLabeledData, WeightVector
from .multiclass import covariance_set, ecc, mpc1, mpc2

BINARY_COLUMNS = ("mcc", "wmcc")
MULTICLASS_COLUMNS = ("ecc", "wecc", "mpc1", "wmpc1", "mpc2", "wmpc2")
DEFAULT_WEIGHT_PATTERN = ((50, 1.0), (50, 100.0), (50, 10000.0))


def _exact_count(fraction: float, length: int) -> int:
    # half-up rounding, not Python's banker's rounding
    return int(math.floor(fraction * length + 0.5))


@dataclass(frozen=True)
class SweepConfig:
    n: int = 150
    k: int = 1
    p: float = 1.0
    p0: float = 0.5
    segment_len: int = 50
    samples: int = 100
    weight_pattern: Sequence[tuple[int, float]] = DEFAULT_WEIGHT_PATTERN
    seed: int = 0
    fixed_truth: bool = False
    truth: Optional[Sequence[int]] = None

    def __post_init__(self):
        pattern = tuple((int(cnt), float(wt)) for cnt, wt in self.weight_pattern)
        object.__setattr__(self, "weight_pattern", pattern)
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.k != 1 and self.k < 3:
            raise ValueError("k must be 1 (binary) or at least 3")
        if not 1 <= self.segment_len <= self.n:
            raise ValueError("segment_len must lie in [1, n]")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        for name in ("p", "p0"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if any(cnt < 1 for cnt, _ in pattern):
            raise ValueError("weight counts must be positive")
        if sum(cnt for cnt, _ in pattern) != self.n:
            raise ValueError("weight counts must sum to n")
        if any(not wt > 0 for _, wt in pattern):
            raise ValueError("weights must be positive")
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=np.int64)
            upper = 2 if self.k == 1 else self.k
            if truth.shape != (self.n,) or truth.min() < 0 or truth.max() >= upper:
                raise ValueError(f"truth must be {self.n} labels in [0, {upper})")

    @property
    def binary(self) -> bool:
        return self.k == 1

    @property
    def columns(self) -> tuple[str, ...]:
        return BINARY_COLUMNS if self.binary else MULTICLASS_COLUMNS

    def weights(self) -> np.ndarray:
        return np.concatenate([np.full(cnt, wt) for cnt, wt in self.weight_pattern])

    @property
    def start_indices(self) -> range:
        return range(1, self.n - self.segment_len + 2)


@dataclass
class SweepResult:
    start_indices: list[int]
    curves: dict[str, np.ndarray]
    redraws: int = 0
    config: Optional[SweepConfig] = field(default=None, repr=False)

    def write_csv(self, fh) -> None:
        """Write ``start_index,<metric columns>`` rows, 9 significant digits."""
        writer = csv.writer(fh, lineterminator="\n")
        names = list(self.curves)
        writer.writerow(["start_index", *names])
        for row, start in enumerate(self.start_indices):
            writer.writerow([start, *(f"{self.curves[m][row]:.9g}" for m in names)])


def generate_truth(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform labels: bits when ``k == 1``, classes 0..k-1 otherwise."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return rng.integers(0, 2 if k == 1 else k, size=n)


def _mismatch(values: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    if k == 1:
        return 1 - values
    return (values + rng.integers(1, k, size=values.size)) % k


def _match_block(truth: np.ndarray, fraction: float, k: int, rng) -> np.ndarray:
    out = _mismatch(truth, k, rng)
    hits = rng.choice(truth.size, size=_exact_count(fraction, truth.size), replace=False)
    out[hits] = truth[hits]
    return out


def generate_prediction(
    truth,
    p: float,
    p0: float,
    start: int,
    segment_len: int,
    rng: np.random.Generator,
    k: int = 1,
) -> np.ndarray:
    """Prediction matching ``truth`` exactly round(p*L) times in the segment.

    ``start`` is 1-based. Outside the segment exactly round(p0*(n-L)) positions
    match. A mismatched bit is flipped; a mismatched class is replaced by a
    uniformly chosen different class.
    """
    truth = np.asarray(truth, dtype=np.int64)
    n = truth.size
    if not 1 <= start <= n - segment_len + 1:
        raise ValueError(f"start must lie in [1, {n - segment_len + 1}], got {start}")
    inside = np.zeros(n, dtype=bool)
    inside[start - 1 : start - 1 + segment_len] = True
    pred = np.empty_like(truth)
    pred[inside] = _match_block(truth[inside], p, k, rng)
    pred[~inside] = _match_block(truth[~inside], p0, k, rng)
    return pred


def _score_binary(truth, pred, unit, weighted) -> list[float]:
    data = BinaryLabeledData(truth, pred)
    return [mcc(data, unit), mcc(data, weighted)]


def _score_multiclass(truth, pred, k, unit, weighted) -> list[float]:
    data = MulticlassLabeledData(truth, pred, k)
    plain = covariance_set(data, unit)
    heavy = covariance_set(data, weighted)
    return [ecc(plain), ecc(heavy), mpc1(plain), mpc1(heavy), mpc2(plain), mpc2(heavy)]


MAX_REDRAWS = 1000


def run_sweep(config: SweepConfig) -> SweepResult:
    """Average every metric over ``config.samples`` draws at each segment start.

    Each (start, sample) cell seeds its own generator from
    ``(seed, start, sample)``, so cells are independent of evaluation order.
    Draws with a constant labeling are redrawn and counted.
    """
    unit = WeightVector.uniform(config.n)
    weighted = WeightVector(config.weights())
    starts = list(config.start_indices)
    k = config.k
    shared_truth = None
    if config.truth is not None:
        shared_truth = np.asarray(config.truth, dtype=np.int64)
    elif config.fixed_truth:
        shared_truth = generate_truth(config.n, k, np.random.default_rng([config.seed]))

    table = np.empty((len(starts), config.samples, len(config.columns)))
    redraws = 0
    for i, start in enumerate(starts):
        for j in range(config.samples):
            rng = np.random.default_rng([config.seed, start, j])
            for _ in range(MAX_REDRAWS):
                truth = shared_truth if shared_truth is not None else generate_truth(config.n, k, rng)
                pred = generate_prediction(truth, config.p, config.p0, start, config.segment_len, rng, k)
                try:
                    if config.binary:
                        table[i, j] = _score_binary(truth, pred, unit, weighted)
                    else:
                        table[i, j] = _score_multiclass(truth, pred, k, unit, weighted)
                    break
                except DegenerateLabels:
                    redraws += 1
            else:
                raise DegenerateLabels(
                    f"no non-degenerate draw after {MAX_REDRAWS} attempts at start {start}"
                )
    means = table.mean(axis=1)
    curves = {name: means[:, col] for col, name in enumerate(config.columns)}
    return SweepResult(starts, curves, redraws, config)
