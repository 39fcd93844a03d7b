"""SplitMix64: the point-sampling generator.

A 64-bit state advanced by the golden-ratio increment and finalized with the
Stafford "mix13" bijection.  Each sample point gets its own stream, seeded by
mixing the scenario seed with the point index, so any point can be
regenerated on its own and the output does not depend on evaluation order.
The algorithm is a few integer operations, which keeps the sampled
parameters reproducible from any language.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
NAME = "SplitMix64"


def mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self, count: int) -> np.ndarray:
        """Doubles in [0, 1) from the top 53 bits of each output."""
        return np.array([(self.next_u64() >> 11) * 2.0**-53 for _ in range(count)])

    def stream(self, index: int) -> "SplitMix64":
        """Independent child stream for item ``index``; does not advance this generator."""
        return SplitMix64(mix64((self.state ^ mix64(int(index) + 1)) & MASK64))


def point_streams(seed: int, count: int) -> list[SplitMix64]:
    root = SplitMix64(seed)
    return [root.stream(i) for i in range(count)]
