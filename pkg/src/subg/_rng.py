"""Counter-based random streams keyed by ``(seed, block)``.

Work is cut into fixed-size blocks; block ``b`` always draws from the Philox
stream keyed by ``(seed, b)``. Results therefore do not depend on how many
threads process the blocks or in which order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


def block_generator(seed: int, block: int) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, int(block) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def thread_count() -> int:
    """Worker count from ``SUBG_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("SUBG_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def map_blocks(fn: Callable[[int], T], blocks: Iterable[int]) -> list[T]:
    """``[fn(b) for b in blocks]``, possibly computed on a thread pool."""
    blocks = list(blocks)
    workers = min(thread_count(), len(blocks))
    if workers <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def block_ranges(total: int, size: int) -> list[tuple[int, int, int]]:
    """Split ``range(total)`` into ``(block, start, stop)`` pieces of ``size``."""
    return [(b, s, min(s + size, total)) for b, s in enumerate(range(0, total, size))]
