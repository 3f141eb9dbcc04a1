"""Reproducible random streams.

Every stochastic routine takes a :class:`RandomSeed`. Draws come from
numpy's counter-based Philox generator keyed by ``(seed, stream)``, so a
sub-stream for chunk ``c`` is just a counter offset and never depends on
how work is split between workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomSeed:
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value!r}")

    def generator(self, block: int = 0) -> np.random.Generator:
        """Generator for sub-stream ``block`` of this (seed, stream) pair.

        Blocks are 2**128 draws apart in Philox counter space.
        """
        if not 0 <= block <= _MASK64:
            raise ValueError("block index must fit in 64 bits")
        bitgen = np.random.Philox(key=[self.seed, self.stream], counter=[0, 0, block, 0])
        return np.random.Generator(bitgen)

    def substream(self, stream: int) -> "RandomSeed":
        return RandomSeed(self.seed, stream & _MASK64)


def as_seed(rng: RandomSeed | int | None) -> RandomSeed:
    if rng is None:
        return RandomSeed()
    if isinstance(rng, RandomSeed):
        return rng
    return RandomSeed(int(rng))
