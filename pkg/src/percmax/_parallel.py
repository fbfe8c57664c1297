"""Deterministic block-parallel replica execution.

Replicas are partitioned into fixed-size blocks; each block's result depends
only on the replica indices it covers (streams are replica-keyed), so the
concatenated output is identical for any worker count.  Workers are threads:
the hot kernels are nogil.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

BLOCK_SIZE = 512


def map_blocks(
    replicas: int,
    fn: Callable[[int, int], T],
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> list[T]:
    """fn(lo, hi) over [0, replicas) in fixed blocks, results in block order."""
    spans = [(lo, min(lo + block_size, replicas)) for lo in range(0, replicas, block_size)]
    if workers <= 1 or len(spans) <= 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))
