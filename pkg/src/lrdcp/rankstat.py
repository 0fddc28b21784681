"""Ranks and the partial-sum profile behind the self-normalized test.

The test statistic, its CUSUM counterpart, and the discretized limit
functional all reduce to one object: the deviation profile

    d[k] = k(n+1)/2 - sum_{i<=k} R_i,          k = 1..n,

whose absolute value equals the two-sample Wilcoxon double sum
|sum_{i<=k} sum_{j>k} (1{X_i <= X_j} - 1/2)| when there are no ties.
Prefix and suffix moments of d make every normalizer term evaluable in
constant time.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real observations; the test input.

    Rejects series shorter than 4 (the normalizer needs at least one
    interior index on each side of any tested split) and non-finite
    values.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError(f"expected a 1-d series, got shape {values.shape}")
        if values.shape[0] < 4:
            raise ValueError(
                f"need at least 4 observations, got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains NaN or infinite values")
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class RankProfile:
    """Ranks, deviation profile d, and its prefix/suffix moments.

    ``ranks`` has length n.  The other arrays have length n+1 and are
    indexed by the time index k = 1..n so formulas read like the math;
    d and the prefix arrays carry a zero at [0], the suffix arrays hold
    the full-tail sum there and a zero at [n].

    prefix_q[k]  = sum_{t<=k} d[t]^2
    prefix_td[k] = sum_{t<=k} t * d[t]
    suffix_q[k]  = sum_{t>k} d[t]^2
    suffix_md[k] = sum_{t>k} (n-t) * d[t]
    """

    ranks: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    prefix_q: np.ndarray = field(repr=False)
    prefix_td: np.ndarray = field(repr=False)
    suffix_q: np.ndarray = field(repr=False)
    suffix_md: np.ndarray = field(repr=False)
    tie_flag: bool

    @property
    def n(self):
        return self.ranks.shape[0]


def compute_ranks(values):
    """Midranks of the observations: R_i = #{j : X_j <= X_i}, ties averaged.

    Accepts a TimeSeries or any 1-d array-like.
    """
    if isinstance(values, TimeSeries):
        values = values.values
    return rankdata(np.asarray(values, dtype=np.float64), method="average")


def build_profile(series):
    """Build the RankProfile of a series in one O(n log n) pass."""
    ranks = compute_ranks(series)
    n = series.n
    t = np.arange(n + 1, dtype=np.float64)
    d = np.zeros(n + 1)
    d[1:] = t[1:] * (n + 1) / 2.0 - np.cumsum(ranks)
    tie_flag = bool(np.unique(series.values).shape[0] < n)
    return RankProfile(ranks, d, *_moments(d, t, n), tie_flag)


def deviation_profile(values):
    """Centered-partial-sum profile of raw values (CUSUM counterpart of d).

    d[k] = (k/n) * sum(values) - sum_{i<=k} values[i], so that the same
    normalizer algebra applies with observations in place of ranks.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    t = np.arange(n + 1, dtype=np.float64)
    d = np.zeros(n + 1)
    cumsum = np.cumsum(values)
    d[1:] = t[1:] / n * cumsum[-1] - cumsum
    return d


def _moments(d, t, n):
    prefix_q = np.cumsum(d * d)
    prefix_td = np.cumsum(t * d)
    cum_md = np.cumsum((n - t) * d)
    suffix_q = prefix_q[-1] - prefix_q
    suffix_md = cum_md[-1] - cum_md
    return prefix_q, prefix_td, suffix_q, suffix_md
