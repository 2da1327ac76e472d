"""Deterministic process-parallel map.

The pool is an implementation detail: results are gathered in submission
order and chunk boundaries depend only on the task list, never on the worker
count, so the numerical output of a scan is identical for 1 or 16 workers.

Workers are forked (POSIX); the callable must be a module-level function or a
`functools.partial` over one, since it crosses the process boundary.
"""

from __future__ import annotations

import multiprocessing as mp
import os
from typing import Callable, Sequence


def default_threads() -> int:
    env = os.environ.get("CANTORLAB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def pmap(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    """Ordered parallel map with a deterministic gather."""
    items = list(items)
    n = threads if threads is not None else default_threads()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    ctx = mp.get_context("fork")
    # items are independent and gathered in list order, so scheduling
    # granularity cannot change the numbers
    chunk = max(1, len(items) // (4 * n))
    with ctx.Pool(processes=min(n, len(items))) as pool:
        return pool.map(fn, items, chunksize=chunk)
