"""Deterministic chunked parallelism for Monte Carlo replications.

Replication indices are split into fixed-size chunks before any
scheduling decision, each chunk is evaluated by a pure top-level function
of its index range, and results are concatenated in chunk order.  The
output is therefore bit-identical for any worker count; LRD_CP_THREADS
caps the workers (default: hardware parallelism), and a single worker
short-circuits to in-process evaluation.
"""

import os
from multiprocessing import Pool

#: replications per chunk; fixed so results never depend on worker count
CHUNK_SIZE = 500


def worker_count():
    env = os.environ.get("LRD_CP_THREADS")
    if env is not None:
        try:
            requested = int(env)
        except ValueError:
            raise ValueError(
                f"LRD_CP_THREADS must be an integer, got {env!r}"
            ) from None
        return max(1, requested)
    return os.cpu_count() or 1


def chunk_ranges(total, chunk_size=CHUNK_SIZE):
    """[(lo, hi), ...] covering range(total) in fixed-size pieces."""
    return [(lo, min(lo + chunk_size, total)) for lo in range(0, total, chunk_size)]


def chunked_map(func, tasks):
    """Map a picklable function over tasks, preserving task order."""
    workers = min(worker_count(), len(tasks))
    if workers <= 1:
        return [func(task) for task in tasks]
    with Pool(workers) as pool:
        return pool.map(func, tasks)
