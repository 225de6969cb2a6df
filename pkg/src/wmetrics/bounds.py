"""Weight-perturbation stability bounds and their empirical verification.

Arithmetic building blocks (product, reciprocal, square root, reciprocal
square root, quotient) come first, then the binary MCC bound, the multiclass
covariance constants and the ECC/MPC1/MPC2 bounds, and finally
:func:`verify_bound`, which perturbs weights at random and counts how often
the observed metric change exceeds the theoretical ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binary import mcc, mcc_arrays
from .core import (
    BinaryLabeledData,
    DegenerateLabels,
    DimensionError,
    MulticlassLabeledData,
    PreconditionViolated,
    WeightVector,
    one_hot,
)
from .multiclass import (
    ZERO_DENOMINATOR,
    CovarianceSet,
    covariance_arrays,
    covariance_set,
    ecc,
    ecc_values,
    mpc1,
    mpc1_values,
    mpc2,
    mpc2_terms,
)

# Perturbations are drawn strictly inside the open eps-ball.
STRICT_MARGIN = 1.0 - 1e-9


def _require(ok: bool, condition: str, detail: str = "") -> None:
    if not ok:
        raise PreconditionViolated(condition, detail)


# -- arithmetic lemmas -------------------------------------------------------


def bound_product(xs, eps: float) -> float:
    """Ceiling on |prod(x_i) - prod(x_i +/- eps)|: eps * 2**n * max_{k<=n} M**k."""
    xs = np.asarray(xs, dtype=np.float64)
    _require(xs.size > 0 and bool(np.all(xs > 0)), "x_i > 0")
    _require(0 < eps < 1, "0 < eps < 1", f"eps={eps}")
    _require(eps < xs.min() / 2, "eps < min(x)/2", f"eps={eps}, min(x)={xs.min()}")
    n = xs.size
    big = float(xs.max())
    return eps * 2.0**n * max(1.0, big**n)


def _check_unary(x: float, eps: float) -> None:
    _require(x > 0, "x > 0", f"x={x}")
    _require(0 < eps < x / 2, "0 < eps < x/2", f"x={x}, eps={eps}")


def bound_reciprocal(x: float, eps: float) -> tuple[float, float]:
    """(lower, upper) sandwich for |1/x - 1/(x +/- eps)|."""
    _check_unary(x, eps)
    return 4 * eps / (9 * x**2), 4 * eps / x**2


def bound_sqrt(x: float, eps: float) -> tuple[float, float]:
    """(lower, upper) sandwich for |sqrt(x) - sqrt(x +/- eps)|."""
    _check_unary(x, eps)
    return eps / math.sqrt(6 * x), eps / math.sqrt(2 * x)


def bound_recip_sqrt(x: float, eps: float) -> tuple[float, float]:
    """(lower, upper) sandwich for |1/sqrt(x) - 1/sqrt(x +/- eps)|."""
    _check_unary(x, eps)
    root2 = math.sqrt(2.0)
    return root2 * eps / (3 * x * math.sqrt(3 * x)), root2 * eps / (x * math.sqrt(x))


def bound_quotient(x1: float, y1: float, eps: float, delta: float) -> float:
    """Ceiling on |x1/y1 - x2/y2| for |x1-x2| < eps, |y1-y2| < delta.

    Evaluates (x1/y1) * [4 delta/y1 + eps (1 + 4 delta/y1)] as printed. The
    eps term carries a factor x1 where the derivation has 1, so the ceiling is
    only guaranteed when x1 >= 1.
    """
    _require(x1 > 0 and y1 > 0, "x1, y1 > 0", f"x1={x1}, y1={y1}")
    _require(0 <= eps < x1 / 2, "0 <= eps < x1/2", f"eps={eps}, x1={x1}")
    _require(0 <= delta < y1 / 2, "0 <= delta < y1/2", f"delta={delta}, y1={y1}")
    ratio = 4 * delta / y1
    return (x1 / y1) * (ratio + eps * (1 + ratio))


# -- binary ------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryBoundContext:
    big_m: float
    small_m: float
    trace_s: float
    n: int
    eps_max: float


def _weights(w, n: int) -> np.ndarray:
    weights = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    if weights.shape != (n,):
        raise DimensionError(f"{n} observations but weights of shape {weights.shape}")
    return weights


def binary_context(data: BinaryLabeledData, w: WeightVector) -> BinaryBoundContext:
    weights = _weights(w, data.n)
    t, c = data.truth, data.prediction
    masses = [
        weights @ (t * c),
        weights @ t,
        weights @ c,
        weights @ (1 - t),
        weights @ (1 - c),
    ]
    big, small = float(max(masses)), float(min(masses))
    return BinaryBoundContext(
        big_m=big,
        small_m=small,
        trace_s=float(weights.sum()),
        n=data.n,
        eps_max=min(small / 2, 1.0 / data.n),
    )


def mcc_bound(data: BinaryLabeledData, w: WeightVector, eps: float) -> float:
    """Ceiling on |MCC_S - MCC_W| over all W with max|S_ii - W_ii| < eps.

    |MCC_S| * (32 s^2 N / m^2) * [1 + M^2 (1 + 32 s^2 N eps / m^2)] * eps, where
    m and M are the smallest and largest of <t,c>, <t,1>, <1,c>, <1-t,1>, <1,1-c>.
    """
    ctx = binary_context(data, w)
    value = mcc(data, w)  # raises DegenerateLabels for constant t or c
    _require(ctx.small_m > 0, "m > 0", "t and c share no positive observation")
    _require(eps > 0, "eps > 0", f"eps={eps}")
    _require(
        eps < ctx.eps_max,
        "eps < min(m/2, 1/N)",
        f"eps={eps}, m/2={ctx.small_m / 2}, 1/N={1 / ctx.n}",
    )
    factor = 2**5 * ctx.trace_s**2 * ctx.n / ctx.small_m**2
    return abs(value) * factor * (1 + ctx.big_m**2 * (1 + factor * eps)) * eps


# -- multiclass --------------------------------------------------------------


@dataclass(frozen=True)
class MulticlassBoundContext:
    """Constants of the multiclass perturbation bounds for one instance.

    ``c_trace``, ``c_class`` and ``c_sum`` are the constants built in the
    trace-product, per-class product and summed square-root estimates;
    ``c`` is the single constant used by every theorem bound, the largest
    of those and ``m_t * m_c``.
    """

    m_t: float
    m_c: float
    s: float
    n: int
    c_trace: float
    c_class: np.ndarray
    c_sum: float
    c: float
    y_ecc: float
    y_mpc1: float


def multiclass_constants(data: MulticlassLabeledData, w: WeightVector) -> MulticlassBoundContext:
    weights = _weights(w, data.n)
    cs = covariance_set(data, weights)
    t, c = one_hot(data)
    m_t = float(np.abs(t - cs.t_bar[:, None]).max())
    m_c = float(np.abs(c - cs.c_bar[:, None]).max())
    s = float(weights.sum())
    n = data.n
    d_tt = np.diag(cs.r_tt)
    d_cc = np.diag(cs.r_cc)
    tr_tt = float(d_tt.sum())
    tr_cc = float(d_cc.sum())

    c_trace = m_t**2 * tr_cc + m_c**2 * tr_tt + 4 * n**2 / s**2
    c_class = d_tt * m_c**2 + d_cc * m_t**2 + 4 * n / s**2
    prod = d_tt * d_cc
    live = np.sqrt(prod) > ZERO_DENOMINATOR
    c_sum = float(np.sum(c_class[live] / np.sqrt(2 * prod[live])))
    c_all = max(m_t * m_c, c_trace, float(c_class.max()), c_sum)
    c_class.setflags(write=False)
    return MulticlassBoundContext(
        m_t=m_t,
        m_c=m_c,
        s=s,
        n=n,
        c_trace=c_trace,
        c_class=c_class,
        c_sum=c_sum,
        c=c_all,
        y_ecc=tr_tt * tr_cc,
        y_mpc1=float(np.sqrt(prod).sum()),
    )


def _check_multiclass_eps(ctx: MulticlassBoundContext, eps: float) -> None:
    _require(eps > 0, "eps > 0", f"eps={eps}")
    _require(eps < 1, "eps < 1", f"eps={eps}")
    _require(eps < ctx.s / 2, "eps < s/2", f"eps={eps}, s/2={ctx.s / 2}")


def rtc_bound(data: MulticlassLabeledData, w: WeightVector, eps: float) -> float:
    """Ceiling on ||R_tc^S - R_tc^W|| in matrix form, Frobenius norm throughout.

    (4 N eps^2 / s^2) ||t - t_bar 1^T|| ||I_N|| ||(c - c_bar 1^T)^T||, with
    ||I_N|| = sqrt(N) under the Frobenius norm.
    """
    weights = _weights(w, data.n)
    s = float(weights.sum())
    _require(eps > 0, "eps > 0", f"eps={eps}")
    _require(eps < s / 2, "eps < s/2", f"eps={eps}, s/2={s / 2}")
    cs = covariance_set(data, weights)
    t, c = one_hot(data)
    n = data.n
    norm_t = np.linalg.norm(t - cs.t_bar[:, None])
    norm_c = np.linalg.norm(c - cs.c_bar[:, None])
    return float(4 * n * eps**2 / s**2 * norm_t * math.sqrt(n) * norm_c)


def ecc_bound(data: MulticlassLabeledData, w: WeightVector, eps: float) -> float:
    ctx = multiclass_constants(data, w)
    _check_multiclass_eps(ctx, eps)
    if ctx.y_ecc <= ZERO_DENOMINATOR:
        raise DegenerateLabels("tr(R_tt) tr(R_cc) vanishes")
    value = ecc(covariance_set(data, w))
    n, s, c, y = ctx.n, ctx.s, ctx.c, ctx.y_ecc
    lead = 4 * 4 * n**2 * c / (y * math.sqrt(2) * s**2)
    inner = 4 * 4 * n * c / (y * math.sqrt(2) * s**2)
    cross = 4 * n**2 * ctx.m_t * ctx.m_c / s**2
    return abs(value) * (lead + cross * (1 + inner * eps**2)) * eps**2


def mpc1_bound(data: MulticlassLabeledData, w: WeightVector, eps: float) -> float:
    ctx = multiclass_constants(data, w)
    _check_multiclass_eps(ctx, eps)
    if ctx.y_mpc1 <= ZERO_DENOMINATOR:
        raise DegenerateLabels("sum_k sqrt([R_tt]_kk [R_cc]_kk) vanishes")
    value = mpc1(covariance_set(data, w))
    n, s, c, y = ctx.n, ctx.s, ctx.c, ctx.y_mpc1
    lead = 4 * 4 * n * c / (y * s**2)
    cross = 4 * n**2 * ctx.m_t * ctx.m_c / s**2
    return abs(value) * (lead + cross * (1 + lead * eps**2)) * eps**2


def mpc2_bound(data: MulticlassLabeledData, w: WeightVector, eps: float) -> float:
    ctx = multiclass_constants(data, w)
    _check_multiclass_eps(ctx, eps)
    terms = mpc2_terms(covariance_set(data, w))
    prefactor = float(np.abs(terms / data.num_classes).sum())
    n, s, c = ctx.n, ctx.s, ctx.c
    lead = 4 * 4 * n * c / s**2
    second = 4 * n * c / s**2
    return prefactor * (lead + second * (1 + lead * eps**2)) * eps**2


BOUNDS = {
    "mcc": mcc_bound,
    "ecc": ecc_bound,
    "mpc1": mpc1_bound,
    "mpc2": mpc2_bound,
}


# -- empirical verification ----------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    metric: str
    eps: float
    theoretical_bound: float
    empirical_max_deviation: float
    trials: int
    preconditions_ok: bool
    violations: int

    def summary(self) -> str:
        return (
            f"metric={self.metric}\n"
            f"eps={self.eps:.12g}\n"
            f"theoretical_bound={self.theoretical_bound:.12g}\n"
            f"empirical_max_deviation={self.empirical_max_deviation:.12g}\n"
            f"trials={self.trials}\n"
            f"preconditions_ok={str(self.preconditions_ok).lower()}\n"
            f"violations={self.violations}"
        )


def perturb_weights(weights: np.ndarray, eps: float, trials: int, rng) -> np.ndarray:
    """Draw ``trials`` weight vectors with every |W_i - S_i| < eps and W_i > 0."""
    half = eps * STRICT_MARGIN
    shifted = weights + rng.uniform(-half, half, size=(trials, weights.size))
    # weights at or below zero are pulled up to a tiny positive value, still inside the ball
    return np.maximum(shifted, weights * 1e-12)


def _metric_batch(metric: str, data, weights: np.ndarray) -> np.ndarray:
    if metric == "mcc":
        return mcc_arrays(data.truth, data.prediction, weights)
    t, c = one_hot(data)
    cs: CovarianceSet = covariance_arrays(t, c, weights)
    if metric == "mpc2":
        return np.asarray(mpc2(cs))
    # a perturbation can make the labeling numerically constant; such draws come back as NaN
    values, ok = {"ecc": ecc_values, "mpc1": mpc1_values}[metric](cs)
    return np.where(ok, values, np.nan)


def verify_bound(metric: str, data, w: WeightVector, eps: float, trials: int, seed=None) -> StabilityReport:
    """Compare the theoretical bound of ``metric`` with random weight perturbations."""
    if metric not in BOUNDS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(BOUNDS)}")
    expected = BinaryLabeledData if metric == "mcc" else MulticlassLabeledData
    if not isinstance(data, expected):
        raise TypeError(f"metric {metric!r} needs {expected.__name__}")
    if trials < 1:
        raise ValueError("trials must be positive")
    bound = BOUNDS[metric](data, w, eps)
    weights = _weights(w, data.n)
    rng = np.random.default_rng(seed)
    base = _metric_batch(metric, data, weights[None, :])[0]
    perturbed = perturb_weights(weights, eps, trials, rng)
    deviation = np.abs(_metric_batch(metric, data, perturbed) - base)
    # an undefined perturbed metric is not within any finite bound
    deviation[np.isnan(deviation)] = np.inf
    return StabilityReport(
        metric=metric,
        eps=float(eps),
        theoretical_bound=float(bound),
        empirical_max_deviation=float(deviation.max()),
        trials=int(trials),
        preconditions_ok=True,
        violations=int(np.count_nonzero(deviation > bound)),
    )
