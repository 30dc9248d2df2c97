"""Deterministic block-parallel map used by the O(n^2) pair loops.

Work is always split into the same fixed-size row blocks no matter how many
worker threads run them, and partial results are returned in block order.
Reductions over the returned list are therefore bit-identical for any thread
count.
"""

from __future__ import annotations

import contextlib
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

BLOCK_ROWS = 128

_num_threads = 1


def get_num_threads() -> int:
    return _num_threads


def set_num_threads(n: int) -> None:
    global _num_threads
    if int(n) < 1:
        raise ValueError("thread count must be >= 1")
    _num_threads = int(n)


@contextlib.contextmanager
def num_threads(n: int) -> Iterator[None]:
    """Temporarily change the worker thread cap."""
    old = get_num_threads()
    set_num_threads(n)
    try:
        yield
    finally:
        set_num_threads(old)


def row_blocks(n_rows: int, block: int = BLOCK_ROWS) -> list[tuple[int, int]]:
    return [(r, min(r + block, n_rows)) for r in range(0, n_rows, block)]


def block_map(func: Callable[[int, int], T], n_rows: int,
              block: int = BLOCK_ROWS) -> list[T]:
    """Apply ``func(r0, r1)`` to every row block, results in block order."""
    blocks = row_blocks(n_rows, block)
    if _num_threads == 1 or len(blocks) == 1:
        return [func(r0, r1) for r0, r1 in blocks]
    with ThreadPoolExecutor(max_workers=_num_threads) as pool:
        return list(pool.map(lambda b: func(*b), blocks))


def ordered_sum(parts: Sequence[float]) -> float:
    """Exactly rounded sum of per-block partial sums."""
    return math.fsum(float(p) for p in parts)


def concat(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate(list(parts), axis=0)
