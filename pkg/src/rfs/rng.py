"""Keyed counter-based random streams.

Each stream is a Philox-4x64 generator whose 128-bit key packs
(stream_index << 64) | master_seed, with the counter starting at zero.
Distinct (master_seed, stream_index) pairs therefore select distinct
Philox permutations; equal pairs replay the same sequence.

Normals come from numpy's ziggurat transform (Generator.standard_normal),
uniforms from Generator.random (53-bit doubles).  Reproducibility holds
for a fixed numpy version; it is not meant to be bit-exact elsewhere.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
TRIAL_BITS = 32


def trial_stream_index(cell: int, trial: int) -> int:
    """Stream index of trial ``trial`` in cell ``cell`` (cell * 2**32 + trial)."""
    if not 0 <= trial < (1 << TRIAL_BITS):
        raise ValueError(f"trial index out of range: {trial}")
    return ((cell << TRIAL_BITS) + trial) & MASK64


class RngStream:
    __slots__ = ("master_seed", "stream_index", "_gen")

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed) & MASK64
        self.stream_index = int(stream_index) & MASK64
        key = (self.stream_index << 64) | self.master_seed
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def normals(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(n)

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"
