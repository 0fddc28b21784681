"""Self-normalized Wilcoxon change-point statistic and baselines.

For a split at k the statistic compares the Wilcoxon deviation |d[k]|
against a normalizer built from within-segment partial sums:

    S_t(1, k)   = -(d[t] - (t/k) d[k])
    S_t(k+1, n) = -(d[t] - ((n-t)/(n-k)) d[k])

    G_n(k) = |d[k]| / sqrt((1/n) [sum_{t<=k} S_t(1,k)^2
                                  + sum_{t>k} S_t(k+1,n)^2])

and T_n is the maximum of G_n(k) over a trimmed window of splits.
Expanding the squares turns each G_n(k) into a constant-time expression
in the profile moments; the whole scan is O(n) after ranking.

``naive_gn_oracle`` is an independent transcription of the definition
(explicit running sums of centered ranks), kept as a cross-check; the
fast path must agree with it to floating-point accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .rankstat import TimeSeries, build_profile, deviation_profile

#: scale factor of the degenerate-denominator threshold
DEN_TOL = 1e-12

#: numerator noise floor (relative to the running-sum magnitude) used to
#: distinguish "numerator is really zero" from cumsum rounding residue
#: in a degenerate split; far above n*eps, far below any real deviation
NUM_TOL = 1e-9


@dataclass(frozen=True)
class TestWindow:
    """Trimmed split range: k runs over [floor(n*tau1), floor(n*tau2)]."""

    tau1: float = 0.15
    tau2: float = 0.85

    def __post_init__(self):
        if not 0.0 < self.tau1 < self.tau2 < 1.0:
            raise ValueError(
                f"window must satisfy 0 < tau1 < tau2 < 1, "
                f"got ({self.tau1}, {self.tau2})"
            )

    def split_range(self, n):
        """Inclusive (k_lo, k_hi) for a length-n series."""
        k_lo = math.floor(n * self.tau1)
        k_hi = math.floor(n * self.tau2)
        if k_lo < 1 or k_hi > n - 1 or k_lo > k_hi:
            raise ValueError(
                f"window ({self.tau1}, {self.tau2}) is too narrow for "
                f"n={n}: admissible splits [{k_lo}, {k_hi}] must lie in "
                f"[1, {n - 1}]"
            )
        return k_lo, k_hi


@dataclass(frozen=True)
class TestResult:
    """Outcome of one statistic evaluation over a window."""

    statistic: float
    argmax_k: int
    profile: np.ndarray
    k_range: tuple
    tie_flag: bool
    degenerate_flag: bool
    critical_value: float = None
    reject: bool = None


def _gn_matrix(d, n, k_lo, k_hi, num_scale=0.0):
    """G_n(k) for each row of a (batch, n+1) deviation profile.

    Returns the (batch, k_hi-k_lo+1) matrix of statistic values and a
    per-row flag marking splits where the degenerate rule fired.
    ``num_scale`` (scalar or per-row column) sets the numerator noise
    floor for profiles built from raw values, whose cumsums carry
    rounding residue; rank profiles are exact and pass 0.
    """
    t = np.arange(n + 1, dtype=np.float64)
    prefix_q = np.cumsum(d * d, axis=-1)
    prefix_td = np.cumsum(t * d, axis=-1)
    cum_md = np.cumsum((n - t) * d, axis=-1)
    suffix_q = prefix_q[:, -1:] - prefix_q
    suffix_md = cum_md[:, -1:] - cum_md

    ks = np.arange(k_lo, k_hi + 1)
    kf = ks.astype(np.float64)
    mf = n - kf
    dk = d[:, ks]
    # sum_{t<=k} t^2 and sum_{t>k} (n-t)^2 in closed form
    sum_tsq = kf * (kf + 1.0) * (2.0 * kf + 1.0) / 6.0
    sum_msq = (mf - 1.0) * mf * (2.0 * mf - 1.0) / 6.0
    first = prefix_q[:, ks] - 2.0 * (dk / kf) * prefix_td[:, ks]
    first += (dk / kf) ** 2 * sum_tsq
    second = suffix_q[:, ks] - 2.0 * (dk / mf) * suffix_md[:, ks]
    second += (dk / mf) ** 2 * sum_msq
    denom = first + second

    tol = DEN_TOL * n * (1.0 + dk * dk)
    num_tol = NUM_TOL * (1.0 + np.asarray(num_scale, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        gn = np.abs(dk) / np.sqrt(denom / n)
    degenerate = denom < tol
    gn = np.where(degenerate, np.where(np.abs(dk) > num_tol, np.inf, 0.0), gn)
    return gn, degenerate.any(axis=-1)


def batch_tn_from_values(values, k_lo, k_hi, use_ranks):
    """T_n of each row of a (batch, n) value matrix; the hot loop.

    With ``use_ranks`` the Wilcoxon statistic is computed (midranks per
    row); without, the CUSUM variant on the raw rows, which is also the
    discretized limit functional when the rows are fBm increments.
    """
    values = np.asarray(values, dtype=np.float64)
    batch, n = values.shape
    t = np.arange(n + 1, dtype=np.float64)
    d = np.zeros((batch, n + 1))
    num_scale = 0.0
    if use_ranks:
        cumsum = np.cumsum(rankdata(values, method="average", axis=-1), axis=-1)
        d[:, 1:] = t[1:] * (n + 1) / 2.0 - cumsum
    else:
        cumsum = np.cumsum(values, axis=-1)
        d[:, 1:] = t[1:] / n * cumsum[:, -1:] - cumsum
        num_scale = np.abs(cumsum).max(axis=-1, keepdims=True)
    gn, _ = _gn_matrix(d, n, k_lo, k_hi, num_scale)
    return gn.max(axis=-1)


def gn_statistic(profile, k):
    """G_n(k) from a prebuilt RankProfile in O(1)."""
    n = profile.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"split k must lie in [1, {n - 1}], got {k}")
    dk = profile.d[k]
    m = n - k
    first = (
        profile.prefix_q[k]
        - 2.0 * (dk / k) * profile.prefix_td[k]
        + (dk / k) ** 2 * (k * (k + 1) * (2 * k + 1) / 6.0)
    )
    second = (
        profile.suffix_q[k]
        - 2.0 * (dk / m) * profile.suffix_md[k]
        + (dk / m) ** 2 * ((m - 1) * m * (2 * m - 1) / 6.0)
    )
    denom = first + second
    if denom < DEN_TOL * n * (1.0 + dk * dk):
        return math.inf if abs(dk) > 0.0 else 0.0
    return abs(dk) / math.sqrt(denom / n)


def _result_from_deviations(d, n, window, tie_flag, critical_value,
                            num_scale=0.0):
    k_lo, k_hi = window.split_range(n)
    gn, degenerate = _gn_matrix(d[np.newaxis, :], n, k_lo, k_hi, num_scale)
    values = gn[0]
    best = int(np.argmax(values))  # first maximum: smallest-k tie rule
    statistic = float(values[best])
    reject = None if critical_value is None else bool(statistic > critical_value)
    return TestResult(
        statistic=statistic,
        argmax_k=k_lo + best,
        profile=values,
        k_range=(k_lo, k_hi),
        tie_flag=tie_flag,
        degenerate_flag=bool(degenerate[0]),
        critical_value=critical_value,
        reject=reject,
    )


def tn_statistic(series, window=TestWindow(), critical_value=None):
    """T_n over the window: the self-normalized Wilcoxon test statistic."""
    profile = build_profile(series)
    return _result_from_deviations(
        profile.d, series.n, window, profile.tie_flag, critical_value
    )


def sn_cusum_statistic(series, window=TestWindow(), critical_value=None):
    """Self-normalized CUSUM baseline: same functional on raw values.

    Shares the limit distribution with the Wilcoxon form but is not rank
    invariant, hence less robust to outliers.
    """
    d = deviation_profile(series.values)
    num_scale = float(np.abs(np.cumsum(series.values)).max())
    return _result_from_deviations(
        d, series.n, window, False, critical_value, num_scale
    )


def naive_gn_oracle(series, k):
    """Direct transcription of the G_n(k) definition; O(n) per split.

    Test oracle only (exercised for n <= 500): computes the centered-rank
    running sums literally instead of through the profile moments.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(np.asarray(series, dtype=np.float64))
    ranks = rankdata(series.values, method="average")
    n = series.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"split k must lie in [1, {n - 1}], got {k}")
    # definitional form; exact in floats because midranks are half-integers
    numerator = abs(k * (n + 1) / 2.0 - ranks[:k].sum())

    mean_first = ranks[:k].mean()
    total = 0.0
    accum = 0.0
    for h in range(k):
        accum += ranks[h] - mean_first
        total += accum * accum
    mean_second = ranks[k:].mean()
    accum = 0.0
    for h in range(k, n):
        accum += ranks[h] - mean_second
        total += accum * accum

    if total < DEN_TOL * n * (1.0 + numerator * numerator):
        return math.inf if numerator > 0.0 else 0.0
    return numerator / math.sqrt(total / n)
