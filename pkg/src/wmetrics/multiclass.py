"""Weighted class covariances and the ECC, MPC1 and MPC2 measures.

For one-hot truth columns t_n and prediction columns c_n with weights S_n,

    t_bar = sum_n S_n t_n / s,   c_bar = sum_n S_n c_n / s,   s = sum_n S_n
    R_tc  = sum_n S_n (t_n - t_bar)(c_n - c_bar)^T / s

and R_tt, R_cc are the same construction with (t, t) and (c, c).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DegenerateLabels,
    DimensionError,
    MulticlassLabeledData,
    WeightVector,
    one_hot,
)

# Absolute floor below which a covariance denominator counts as zero.
ZERO_DENOMINATOR = 1e-15


@dataclass(frozen=True)
class CovarianceSet:
    """Weighted means and covariance matrices of one (truth, prediction, weights) triple.

    Arrays may carry leading batch axes when built by :func:`covariance_arrays`
    for many weight vectors at once; the metric functions broadcast over them.
    """

    t_bar: np.ndarray
    c_bar: np.ndarray
    r_tt: np.ndarray
    r_tc: np.ndarray
    r_cc: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.t_bar.shape[-1]


def covariance_arrays(t: np.ndarray, c: np.ndarray, weights: np.ndarray) -> CovarianceSet:
    """Build a CovarianceSet from K x N one-hot matrices.

    ``weights`` has shape ``(..., N)``; leading axes batch over weight vectors.
    """
    weights = np.asarray(weights, dtype=np.float64)
    s = weights.sum(axis=-1)[..., None]
    t_bar = np.einsum("...n,kn->...k", weights, t) / s
    c_bar = np.einsum("...n,kn->...k", weights, c) / s
    dt = t - t_bar[..., :, None]
    dc = c - c_bar[..., :, None]
    w = weights[..., None, :]
    s2 = s[..., None]
    r_tt = np.einsum("...in,...jn->...ij", dt * w, dt) / s2
    r_tc = np.einsum("...in,...jn->...ij", dt * w, dc) / s2
    r_cc = np.einsum("...in,...jn->...ij", dc * w, dc) / s2
    return CovarianceSet(t_bar, c_bar, r_tt, r_tc, r_cc)


def covariance_set(data: MulticlassLabeledData, w: WeightVector) -> CovarianceSet:
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    if weights.shape[-1] != data.n:
        raise DimensionError(f"{data.n} observations but {weights.shape[-1]} weights")
    if data.n < 1:
        raise DimensionError("at least one observation is required")
    t, c = one_hot(data)
    return covariance_arrays(t, c, weights)


def _diag(m: np.ndarray) -> np.ndarray:
    return np.diagonal(m, axis1=-2, axis2=-1)


def _trace(m: np.ndarray) -> np.ndarray:
    return np.trace(m, axis1=-2, axis2=-1)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _ratio(num, den, ok):
    safe = np.where(ok, den, 1.0)
    return np.clip(num / safe, -1.0, 1.0)


def ecc_values(cs: CovarianceSet):
    """ECC for every batch entry, with a mask of entries where it is defined."""
    tt = _trace(cs.r_tt)
    cc = _trace(cs.r_cc)
    ok = (tt > ZERO_DENOMINATOR) & (cc > ZERO_DENOMINATOR)
    return _ratio(_trace(cs.r_tc), np.sqrt(tt * cc), ok), ok


def mpc1_values(cs: CovarianceSet):
    den = np.sqrt(_diag(cs.r_tt) * _diag(cs.r_cc)).sum(axis=-1)
    ok = den > ZERO_DENOMINATOR
    return _ratio(_trace(cs.r_tc), den, ok), ok


def ecc(cs: CovarianceSet) -> float:
    """Extended correlation coefficient: tr(R_tc) / sqrt(tr(R_tt) tr(R_cc))."""
    values, ok = ecc_values(cs)
    if not np.all(ok):
        raise DegenerateLabels("constant labeling: tr(R_tt) or tr(R_cc) vanishes")
    return _scalar(values)


def mpc1(cs: CovarianceSet) -> float:
    values, ok = mpc1_values(cs)
    if not np.all(ok):
        raise DegenerateLabels("constant labeling: MPC1 denominator vanishes")
    return _scalar(values)


def mpc2_terms(cs: CovarianceSet) -> np.ndarray:
    """Per-class correlations [R_tc]_kk / sqrt([R_tt]_kk [R_cc]_kk).

    A class whose denominator vanishes contributes 0.
    """
    den = np.sqrt(_diag(cs.r_tt) * _diag(cs.r_cc))
    ok = den > ZERO_DENOMINATOR
    return np.where(ok, _ratio(_diag(cs.r_tc), den, ok), 0.0)


def mpc2(cs: CovarianceSet) -> float:
    """Mean of the per-class correlations; always divides by the full K."""
    return _scalar(mpc2_terms(cs).sum(axis=-1) / cs.num_classes)


METRICS = {"ecc": ecc, "mpc1": mpc1, "mpc2": mpc2}
