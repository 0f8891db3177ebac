"""Bitmask helpers shared by the enumeration kernels.

Element ``i`` (1-based) lives in bit ``i - 1``; a table index is the mask
value itself.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_N = 20
COST_WARN_N = 14

_threads = 1


def set_threads(count: int | None) -> None:
    """Set the worker count for chunked enumerations (``None`` = all cores)."""
    global _threads
    if count is None or count <= 0:
        count = os.cpu_count() or 1
    _threads = int(count)


def get_threads() -> int:
    return _threads


def chunked_map(fn: Callable, chunks: Sequence) -> list:
    """Apply ``fn`` to each chunk, preserving order, optionally on threads."""
    if _threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=_threads) as pool:
        return list(pool.map(fn, chunks))


def split(arr: np.ndarray, max_rows: int) -> list[np.ndarray]:
    if len(arr) <= max_rows:
        return [arr]
    return [arr[i:i + max_rows] for i in range(0, len(arr), max_rows)]


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        if e < 1:
            raise ValueError(f"elements are 1-based, got {e}")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc[1 << i:1 << (i + 1)] = pc[:1 << i] + 1
    pc.setflags(write=False)
    return pc


@lru_cache(maxsize=None)
def bit_matrix(n: int) -> np.ndarray:
    """Boolean array ``(2**n, n)``; entry ``[m, i]`` says bit ``i`` is in ``m``."""
    masks = np.arange(1 << n, dtype=np.int64)
    bm = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    bm.setflags(write=False)
    return bm


@lru_cache(maxsize=None)
def masks_of_size(n: int, k: int) -> np.ndarray:
    out = np.flatnonzero(popcounts(n) == k).astype(np.int64)
    out.setflags(write=False)
    return out


def submasks_of(mask: int) -> np.ndarray:
    """All submasks of ``mask`` in ascending order."""
    subs = [0]
    bit = 1
    while bit <= mask:
        if mask & bit:
            subs += [s | bit for s in subs]
        bit <<= 1
    return np.array(sorted(subs), dtype=np.int64)
