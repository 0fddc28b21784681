"""Exact fractional Gaussian noise sampling via circulant embedding.

Unit-variance fGn with Hurst parameter H has autocovariance

    gamma(k) = 0.5 * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).

The covariance of a length-n stretch is embedded in a circulant matrix of
size 2M (M the smallest power of two >= n), whose eigenvalues are the FFT
of the extended autocovariance sequence and are nonnegative for fGn.  One
draw then costs a single inverse real FFT of independent Gaussian spectral
amplitudes.

Randomness is counter based: every draw is keyed by a
(master_seed, replication, stream) triple through a Philox generator, so
replications can be produced in any batch layout, in any order, on any
number of workers, and still come out bit identical.  ``sample_fgn`` is
the (seed, replication=0, stream=0) special case.  Streams separate
consumers (0 = direct draws, 1 = limit-distribution simulation,
2 = experiment replications).
"""

from dataclasses import dataclass, field

import numpy as np

_KEY_MASK = (1 << 64) - 1
_REP_MASK = (1 << 48) - 1
_MAX_DOUBLINGS = 4

#: relative tolerance for clamping FFT round-off in the eigenvalues
EIG_TOL = 1e-8

#: stream identifiers, one per consumer of fGn draws
STREAM_DIRECT = 0
STREAM_LIMIT = 1
STREAM_EXPERIMENT = 2


def fgn_autocovariance(hurst, lags):
    """Autocovariance gamma(k) of unit-variance fGn at integer lags.

    Parameters
    ----------
    hurst : float in (0, 1)
    lags : int or array_like of int
        Nonnegative lags (negative lags are folded by symmetry).

    Returns
    -------
    float or ndarray matching the shape of ``lags``.
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    k = np.abs(np.asarray(lags, dtype=np.float64))
    two_h = 2.0 * hurst
    gam = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
    if np.ndim(lags) == 0:
        return float(gam)
    return gam


@dataclass(frozen=True)
class FgnParams:
    """Hurst parameter and series length for one sampler."""

    hurst: float
    length: int

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.length < 2:
            raise ValueError(f"length must be at least 2, got {self.length}")


@dataclass(frozen=True)
class FgnSampler:
    """Immutable sampler: parameters plus precomputed spectral weights.

    ``spectral_weights`` holds the 2M eigenvalues of the circulant
    embedding, clamped to be nonnegative.  Safe to share across workers.
    """

    params: FgnParams
    spectral_weights: np.ndarray = field(repr=False)

    @property
    def embedding_size(self):
        """M, half the circulant size; a power of two >= length."""
        return self.spectral_weights.shape[0] // 2


def build_sampler(params):
    """Precompute the spectral weights of the circulant embedding.

    The fGn embedding is provably nonnegative definite, so the doubling
    retry below is a numerical safety valve only; after four doublings a
    negative eigenvalue beyond FFT round-off is treated as a hard error.
    """
    m = 1
    while m < params.length:
        m <<= 1
    for _ in range(_MAX_DOUBLINGS + 1):
        gam = fgn_autocovariance(params.hurst, np.arange(m + 1))
        circ = np.concatenate([gam, gam[m - 1 : 0 : -1]])
        lam = np.fft.fft(circ).real
        tol = EIG_TOL * lam.max()
        if lam.min() >= -tol:
            return FgnSampler(params, np.clip(lam, 0.0, None))
        m <<= 1
    raise RuntimeError(
        f"circulant embedding failed for hurst={params.hurst}, "
        f"length={params.length}: negative eigenvalue persisted"
    )


def _generator(master_seed, replication, stream):
    key_hi = ((stream & 0xFFFF) << 48) | (replication & _REP_MASK)
    return np.random.Generator(
        np.random.Philox(key=[master_seed & _KEY_MASK, key_hi])
    )


def sample_fgn_block(sampler, master_seed, replications, stream=STREAM_DIRECT):
    """Draw one fGn series per replication index; shape (len, n).

    Row r is a pure function of (params, master_seed, replications[r],
    stream), independent of how the indices are grouped into blocks.
    """
    m = sampler.embedding_size
    n = sampler.params.length
    reps = list(replications)
    weights = np.sqrt(sampler.spectral_weights)
    # spectral amplitudes: one complex row per replication
    amps = np.empty((len(reps), m + 1), dtype=np.complex128)
    root_2m = np.sqrt(2.0 * m)
    root_m = np.sqrt(float(m))
    for i, rep in enumerate(reps):
        w = _generator(master_seed, rep, stream).standard_normal(2 * m)
        amps[i, 0] = root_2m * weights[0] * w[0]
        amps[i, m] = root_2m * weights[m] * w[1]
        amps[i, 1:m] = root_m * weights[1:m] * (w[2 : m + 1] + 1j * w[m + 1 :])
    return np.fft.irfft(amps, 2 * m, axis=-1)[:, :n]


def sample_fgn(sampler, seed):
    """One stationary Gaussian vector with mean 0 and autocovariance gamma.

    Deterministic in (sampler.params, seed); equals replication 0 of
    stream 0 under master seed ``seed``.
    """
    return sample_fgn_block(sampler, seed, [0])[0]


def sample_fbm_grid(hurst, grid_size, seed):
    """Fractional Brownian motion B_H(i/N) for i = 1..N, N = grid_size.

    Computed as N^{-H} times the running sum of a length-N fGn sample, by
    self-similarity; B_H(0) = 0 is implicit.
    """
    sampler = build_sampler(FgnParams(hurst, grid_size))
    increments = sample_fgn(sampler, seed)
    return np.cumsum(increments) * float(grid_size) ** (-hurst)
