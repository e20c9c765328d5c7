"""Optional thread fan-out for embarrassingly parallel sweeps."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "QUSENSE_THREADS"


def thread_cap() -> int:
    raw = os.environ.get(ENV_THREADS, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep_map(fn, xs):
    """Map ``fn`` over ``xs`` preserving order, threaded if QUSENSE_THREADS > 1."""
    xs = list(xs)
    workers = thread_cap()
    if workers <= 1 or len(xs) < 2 * workers:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, xs))
