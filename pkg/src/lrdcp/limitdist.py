"""Limit distribution of the test statistic and its critical values.

Under no change the statistic converges to

    sup_{lambda in [tau1, tau2]} |B_H(lambda) - lambda B_H(1)|
        / { int_0^lambda V^2(r; 0, lambda) dr
            + int_lambda^1 V^2(r; lambda, 1) dr }^{1/2}

with V(r; a, b) the fBm bridge over [a, b].  Discretized on the grid
{i/N} with the same step structure as the finite-sample statistic, the
functional is exactly the CUSUM form of the statistic applied to the
path's increments, so the simulation reuses the batched statistic kernel
on fGn series of length N (the functional is scale invariant, which
absorbs the N^{-H} self-similarity factor).

Critical values are upper empirical quantiles: the order statistic of
rank ceil((1 - level) * R), no interpolation.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _parallel
from .fgn import STREAM_LIMIT, FgnParams, build_sampler, sample_fgn_block
from .sntest import TestWindow, batch_tn_from_values

GENERATOR_ID = "fgn-circulant-embedding/philox"

DEFAULT_LEVELS = (0.10, 0.05, 0.01)


@dataclass(frozen=True)
class LimitSimSpec:
    """Parameters of one limit-distribution simulation."""

    hurst: float
    grid_size: int = 1000
    replications: int = 10000
    window: TestWindow = TestWindow()
    levels: tuple = DEFAULT_LEVELS
    master_seed: int = 0

    def __post_init__(self):
        if not 0.5 < self.hurst < 1.0:
            raise ValueError(
                f"hurst must lie in (0.5, 1) for a long-range dependent "
                f"limit, got {self.hurst}"
            )
        if self.grid_size < 100:
            raise ValueError(f"grid_size must be >= 100, got {self.grid_size}")
        if self.replications < 100:
            raise ValueError(
                f"replications must be >= 100, got {self.replications}"
            )
        levels = tuple(self.levels)
        if not levels or any(not 0.0 < lv < 1.0 for lv in levels):
            raise ValueError(f"levels must lie strictly in (0, 1), got {levels}")
        object.__setattr__(self, "levels", levels)


@dataclass(frozen=True)
class CriticalValueTable:
    """Simulated quantiles of the limit statistic for one Hurst value."""

    hurst: float
    window: TestWindow
    quantiles: dict = field(repr=False)
    replications: int = 0
    grid_size: int = 0
    master_seed: int = 0
    generator: str = GENERATOR_ID

    def critical_value(self, level):
        try:
            return self.quantiles[level]
        except KeyError:
            raise KeyError(
                f"missing critical value for level {level}; "
                f"table holds {sorted(self.quantiles)}"
            ) from None

    def to_json(self):
        payload = {
            "hurst": self.hurst,
            "window": [self.window.tau1, self.window.tau2],
            "grid": self.grid_size,
            "reps": self.replications,
            "seed": self.master_seed,
            "generator": self.generator,
            "quantiles": {f"{lv:g}": q for lv, q in self.quantiles.items()},
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        return cls(
            hurst=payload["hurst"],
            window=TestWindow(*payload["window"]),
            quantiles={float(lv): q for lv, q in payload["quantiles"].items()},
            replications=payload["reps"],
            grid_size=payload["grid"],
            master_seed=payload["seed"],
            generator=payload.get("generator", GENERATOR_ID),
        )


def _limit_chunk(task):
    hurst, grid_size, tau1, tau2, master_seed, lo, hi = task
    sampler = build_sampler(FgnParams(hurst, grid_size))
    increments = sample_fgn_block(
        sampler, master_seed, range(lo, hi), stream=STREAM_LIMIT
    )
    k_lo, k_hi = TestWindow(tau1, tau2).split_range(grid_size)
    return batch_tn_from_values(increments, k_lo, k_hi, use_ranks=False)


def limit_statistic_sample(spec, replication_index):
    """One draw of the discretized limit statistic."""
    task = (
        spec.hurst,
        spec.grid_size,
        spec.window.tau1,
        spec.window.tau2,
        spec.master_seed,
        replication_index,
        replication_index + 1,
    )
    return float(_limit_chunk(task)[0])


def simulate_limit_values(spec):
    """All replications of the limit statistic, in replication order."""
    tasks = [
        (
            spec.hurst,
            spec.grid_size,
            spec.window.tau1,
            spec.window.tau2,
            spec.master_seed,
            lo,
            hi,
        )
        for lo, hi in _parallel.chunk_ranges(spec.replications)
    ]
    return np.concatenate(_parallel.chunked_map(_limit_chunk, tasks))


def upper_quantile(sorted_values, level):
    """Order statistic of rank ceil((1 - level) * R), 1-based."""
    r = len(sorted_values)
    rank = min(max(math.ceil((1.0 - level) * r), 1), r)
    return float(sorted_values[rank - 1])


def critical_values(spec):
    """Simulate the limit distribution and tabulate its upper quantiles."""
    values = np.sort(simulate_limit_values(spec))
    quantiles = {level: upper_quantile(values, level) for level in spec.levels}
    return CriticalValueTable(
        hurst=spec.hurst,
        window=spec.window,
        quantiles=quantiles,
        replications=spec.replications,
        grid_size=spec.grid_size,
        master_seed=spec.master_seed,
    )
