"""Counter-based random substreams.

Samples are grouped into fixed-size blocks.  Block ``b`` of stream ``s`` under
root seed ``seed`` is drawn from a Philox generator keyed by ``(seed, s)`` with
its counter starting at ``b``, so every sample is a pure function of
``(seed, stream, index)``.  Workers can take blocks in any order or split them
across threads and the concatenated result is bit-identical to a serial run.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

BLOCK_SIZE = 8192

# Stream ids keep unrelated quantities from sharing random numbers.
STREAM_RAYLEIGH = 1
STREAM_WISHART = 2
STREAM_GRID = 3

_U64 = (1 << 64) - 1


def block_generator(seed: int, stream: int, block: int, retry: int = 0) -> np.random.Generator:
    """Generator for one block; ``retry`` selects an alternative draw of the same block."""
    if not 0 <= seed <= _U64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    key = (seed & _U64) | ((stream & 0xFFFFFFFF) << 64) | ((retry & 0xFFFFFFFF) << 96)
    # Block index lives in the third counter word; the low word advances
    # during generation and never reaches it.
    return np.random.Generator(np.random.Philox(key=key, counter=block << 128))


def generate(
    draw: Callable[[np.random.Generator, int, int], np.ndarray],
    count: int,
    seed: int,
    stream: int,
    threads: int = 1,
) -> np.ndarray:
    """Assemble ``count`` samples from per-block draws.

    ``draw(gen, n, block)`` must return ``n`` samples along axis 0 and consume
    the generator sequentially, so that a short final block is a prefix of a
    full one.
    """
    if count < 1:
        raise ValueError("sample count must be ≥ 1")
    nblocks = -(-count // BLOCK_SIZE)

    def one(b):
        n = min(BLOCK_SIZE, count - b * BLOCK_SIZE)
        return draw(block_generator(seed, stream, b), n, b)

    if threads > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(one, range(nblocks)))
    else:
        parts = [one(b) for b in range(nblocks)]
    return np.concatenate(parts, axis=0)
