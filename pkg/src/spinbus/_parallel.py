"""Order-preserving parallel map for grid sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "SPINBUS_THREADS"


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "")
        try:
            threads = int(raw) if raw.strip() else 1
        except ValueError:
            threads = 1
    return max(1, int(threads))


def ordered_map(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly on a thread pool.

    Each item is computed independently and results keep input order, so
    the output does not depend on the worker count.
    """
    items = list(items)
    workers = min(worker_count(threads), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chunks(seq, size: int):
    return [seq[k:k + size] for k in range(0, len(seq), size)]
