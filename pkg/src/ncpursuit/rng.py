"""Counter-based random substreams.

Every random quantity in the package is drawn from a Philox stream addressed by
``(seed, tag, index)``. Column ``j`` of a generated block always comes from the
same counter range, so filling columns in any order (or in parallel) gives the
same matrix as a sequential pass.
"""
from __future__ import annotations

import zlib

import numpy as np


def _tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def _key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)


def substream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Generator for the named substream ``tag`` at position ``index``."""
    if index < 0:
        raise ValueError(f"substream index must be >= 0, got {index}")
    counter = np.array([0, 0, index, _tag_id(tag)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=_key(seed), counter=counter))


def column_normals(seed: int, tag: str, rows: int, cols: int) -> np.ndarray:
    """``rows x cols`` standard normals, column ``j`` taken from substream ``(tag, j)``."""
    key = _key(seed)
    tag_id = _tag_id(tag)
    out = np.empty((rows, cols))
    for j in range(cols):
        counter = np.array([0, 0, j, tag_id], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key, counter=counter))
        out[:, j] = gen.standard_normal(rows)
    return out


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed from an arbitrary tuple of ints/strings/floats."""
    words = [zlib.crc32(repr(p).encode("utf-8")) for p in parts]
    state = np.random.SeedSequence(words).generate_state(1, np.uint64)[0]
    return int(state >> np.uint64(1))
