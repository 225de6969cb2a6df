"""Independent reference computations used as test oracles.

Everything here is written with plain Python loops (and exact Fractions where
convenient) so it shares no code path with the numpy implementation.
"""

from fractions import Fraction
from math import sqrt


def confusion_loop(t, c, w):
    tp = tn = fp = fn = 0
    for ti, ci, wi in zip(t, c, w):
        if ti and ci:
            tp += wi
        elif not ti and not ci:
            tn += wi
        elif ci:
            fp += wi
        else:
            fn += wi
    return tp, tn, fp, fn


def mcc_from_confusion(tp, tn, fp, fn):
    """Confusion-count form of MCC."""
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    return (tp * tn - fp * fn) / sqrt(den)


def mcc_inner_product_form(t, c, w):
    """MCC as <t,c><1,1> - <t,1><1,c> over the product of marginal masses."""
    ip = lambda a, b: sum(wi * ai * bi for wi, ai, bi in zip(w, a, b))  # noqa: E731
    one = [1] * len(t)
    nt = [1 - x for x in t]
    nc = [1 - x for x in c]
    num = ip(t, c) * ip(one, one) - ip(t, one) * ip(one, c)
    return num / sqrt(ip(t, one) * ip(one, c) * ip(nt, one) * ip(one, nc))


def mcc_integer_counts(t, c):
    """Textbook unweighted MCC from integer counts."""
    tp = sum(1 for a, b in zip(t, c) if a == 1 and b == 1)
    tn = sum(1 for a, b in zip(t, c) if a == 0 and b == 0)
    fp = sum(1 for a, b in zip(t, c) if a == 0 and b == 1)
    fn = sum(1 for a, b in zip(t, c) if a == 1 and b == 0)
    return mcc_from_confusion(tp, tn, fp, fn)


def covariance_loop(t_cls, c_cls, k, w, exact=False):
    """(t_bar, c_bar, R_tt, R_tc, R_cc) by explicit summation over observations."""
    if exact:
        w = [Fraction(x) for x in w]
    zero = Fraction(0) if exact else 0.0
    s = sum(w, zero)
    n = len(t_cls)
    onehot_t = [[1 if t_cls[i] == r else 0 for r in range(k)] for i in range(n)]
    onehot_c = [[1 if c_cls[i] == r else 0 for r in range(k)] for i in range(n)]
    t_bar = [sum((w[i] * onehot_t[i][r] for i in range(n)), zero) / s for r in range(k)]
    c_bar = [sum((w[i] * onehot_c[i][r] for i in range(n)), zero) / s for r in range(k)]

    def cov(a, abar, b, bbar):
        out = [[zero] * k for _ in range(k)]
        for i in range(n):
            for p in range(k):
                for q in range(k):
                    out[p][q] += w[i] * (a[i][p] - abar[p]) * (b[i][q] - bbar[q])
        return [[x / s for x in row] for row in out]

    return (
        t_bar,
        c_bar,
        cov(onehot_t, t_bar, onehot_t, t_bar),
        cov(onehot_t, t_bar, onehot_c, c_bar),
        cov(onehot_c, c_bar, onehot_c, c_bar),
    )


def rtc_diag_entry(t_cls, c_cls, k_idx, w):
    """Single diagonal entry [R_tc]_kk from the per-class sum."""
    s = sum(w)
    tk = [1.0 if x == k_idx else 0.0 for x in t_cls]
    ck = [1.0 if x == k_idx else 0.0 for x in c_cls]
    tbar = sum(wi * a for wi, a in zip(w, tk)) / s
    cbar = sum(wi * b for wi, b in zip(w, ck)) / s
    return sum(wi * (a - tbar) * (b - cbar) for wi, a, b in zip(w, tk, ck)) / s


def multiclass_metrics_loop(t_cls, c_cls, k, w):
    """(ECC, MPC1, MPC2) from the loop covariances, zero-term convention for MPC2."""
    _, _, rtt, rtc, rcc = covariance_loop(t_cls, c_cls, k, w)
    tr = lambda m: sum(m[i][i] for i in range(k))  # noqa: E731
    ecc = tr(rtc) / sqrt(tr(rtt) * tr(rcc))
    dens = [sqrt(rtt[i][i] * rcc[i][i]) for i in range(k)]
    mpc1 = tr(rtc) / sum(dens)
    mpc2 = sum(rtc[i][i] / d if d > 1e-15 else 0.0 for i, d in enumerate(dens)) / k
    return ecc, mpc1, mpc2


# -- second evaluation path for the bound formulas ---------------------------------


def mcc_bound_formula(t, c, w, eps):
    n = len(t)
    s = sum(w)
    ip = lambda a, b: sum(wi * ai * bi for wi, ai, bi in zip(w, a, b))  # noqa: E731
    one = [1] * n
    nt = [1 - x for x in t]
    nc = [1 - x for x in c]
    masses = [ip(t, c), ip(t, one), ip(one, c), ip(nt, one), ip(one, nc)]
    big_m, small_m = max(masses), min(masses)
    value = (ip(t, c) * ip(one, one) - ip(t, one) * ip(one, c)) / sqrt(
        ip(t, one) * ip(one, c) * ip(nt, one) * ip(one, nc)
    )
    k = (2**5) * (s**2) * n / (small_m**2)
    return abs(value) * k * (1 + big_m**2 * (1 + k * eps)) * eps


def _constants(t_cls, c_cls, k, w):
    n = len(t_cls)
    s = sum(w)
    t_bar, c_bar, rtt, rtc, rcc = covariance_loop(t_cls, c_cls, k, w)
    m_t = max(abs((1 if t_cls[i] == r else 0) - t_bar[r]) for i in range(n) for r in range(k))
    m_c = max(abs((1 if c_cls[i] == r else 0) - c_bar[r]) for i in range(n) for r in range(k))
    dtt = [rtt[i][i] for i in range(k)]
    dcc = [rcc[i][i] for i in range(k)]
    ca = m_t * m_t * sum(dcc) + m_c * m_c * sum(dtt) + 4 * n * n / (s * s)
    ck = [dtt[i] * m_c * m_c + dcc[i] * m_t * m_t + 4 * n / (s * s) for i in range(k)]
    csum = 0.0
    for i in range(k):
        if sqrt(dtt[i] * dcc[i]) > 1e-15:
            csum += ck[i] / sqrt(2 * dtt[i] * dcc[i])
    c_all = max([m_t * m_c, ca, csum] + ck)
    return n, s, m_t, m_c, rtt, rtc, rcc, c_all


def multiclass_bound_formulas(t_cls, c_cls, k, w, eps):
    """(ecc_bound, mpc1_bound, mpc2_bound) evaluated term by term."""
    n, s, m_t, m_c, rtt, rtc, rcc, C = _constants(t_cls, c_cls, k, w)
    e2 = eps * eps
    tr_tt = sum(rtt[i][i] for i in range(k))
    tr_cc = sum(rcc[i][i] for i in range(k))
    tr_tc = sum(rtc[i][i] for i in range(k))
    cross = 4 * n * n * m_t * m_c / (s * s)

    y = tr_tt * tr_cc
    rk = tr_tc / sqrt(y)
    a = abs(rk) * (
        16 * n * n * C / (y * sqrt(2) * s * s)
        + cross * (1 + 16 * n * C / (y * sqrt(2) * s * s) * e2)
    ) * e2

    y = sum(sqrt(rtt[i][i] * rcc[i][i]) for i in range(k))
    m1 = tr_tc / y
    b = abs(m1) * (16 * n * C / (y * s * s) + cross * (1 + 16 * n * C / (y * s * s) * e2)) * e2

    pref = 0.0
    for i in range(k):
        d = sqrt(rtt[i][i] * rcc[i][i])
        if d > 1e-15:
            pref += abs(rtc[i][i] / (k * d))
    lead = 16 * n * C / (s * s)
    c = pref * (lead + 4 * n * C / (s * s) * (1 + lead * e2)) * e2
    return a, b, c
