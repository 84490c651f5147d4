"""Deterministic chunked map over a process pool.

Work is cut into contiguous index ranges and mapped with `Pool.imap`, which
yields results in submission order; callers merge them in that order, so
nothing printed depends on how many workers ran.
"""
from __future__ import annotations

import logging
import multiprocessing
import os
from typing import Callable, Iterable, Iterator, List, Optional, Tuple, TypeVar

logger = logging.getLogger("Parallel")

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_CHUNK_SIZE = 4096


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r (not an integer)", name, raw)
        return default
    return max(1, value)


def default_workers() -> int:
    return _env_int("NONEX_THREADS", 1)


def default_chunk_size() -> int:
    return _env_int("NONEX_CHUNK_SIZE", DEFAULT_CHUNK_SIZE)


def default_seed() -> int:
    raw = os.getenv("NONEX_SEED")
    try:
        return int(raw) if raw else 0
    except ValueError:
        logger.warning("Ignoring NONEX_SEED=%r (not an integer)", raw)
        return 0


def chunk_ranges(total: int, chunk_size: Optional[int] = None) -> List[Tuple[int, int]]:
    """Split range(total) into [start, stop) pieces of at most chunk_size."""
    size = chunk_size or default_chunk_size()
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def parallel_map(function: Callable[[T], R], items: Iterable[T],
                 workers: Optional[int] = None) -> Iterator[R]:
    """Ordered map; runs in-process when a single worker is requested.

    `function` must be picklable (a module-level function or a
    functools.partial of one) when workers > 1.
    """
    workers = workers or default_workers()
    if workers <= 1:
        for item in items:
            yield function(item)
        return
    with multiprocessing.Pool(processes=workers) as pool:
        for result in pool.imap(function, items):
            yield result
