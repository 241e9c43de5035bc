"""Thread-count configuration and order-preserving parallel map."""

from __future__ import annotations

import os
import threading
from contextlib import contextmanager
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "BLHARDY_THREADS"

_override = threading.local()


@contextmanager
def use_threads(n: int):
    """Temporarily fix the thread count for :func:`ordered_map` in this thread."""
    prev = getattr(_override, "n", None)
    _override.n = max(1, int(n))
    try:
        yield
    finally:
        _override.n = prev


def thread_count(default: int = 1) -> int:
    forced = getattr(_override, "n", None)
    if forced is not None:
        return forced
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, n)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """``[fn(x) for x in items]`` evaluated on a thread pool.

    Results come back in input order, so any reduction done by the caller
    over the returned list is independent of the thread count.
    """
    items = list(items)
    n = thread_count() if threads is None else max(1, int(threads))
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
