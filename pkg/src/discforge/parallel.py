"""Optional trial-level parallelism.

DISCFORGE_THREADS caps the worker count (default 1, i.e. sequential).
Trials are independent and carry their own derived random substreams, so
results never depend on scheduling order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["thread_count", "map_trials"]


def thread_count() -> int:
    raw = os.environ.get("DISCFORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_trials(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply fn to each item, in a thread pool when DISCFORGE_THREADS > 1.

    The result order always matches the input order.
    """
    workers = min(thread_count(), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
