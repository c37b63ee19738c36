"""Deterministic seed derivation for Monte Carlo campaigns.

Every random quantity in a campaign is drawn from a numpy ``PCG64`` stream
whose 64-bit seed is derived from ``(master_seed, *path)`` by chained
splitmix64 mixing::

    state = master_seed
    for component in path:
        state = splitmix64(state ^ splitmix64(component))

For a fixed master seed and fixed prefix, distinct trailing components give
distinct states because ``splitmix64`` is a bijection on 64-bit words. Trial
``i`` of a campaign uses the path ``(i, purpose)``; results therefore depend
only on the trial index, never on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

# stream purposes within one trial
DATA = 0
SELECT = 1
SIGNS = 2


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    """A master seed plus the derivation rule for per-trial substreams."""

    master_seed: int

    def __post_init__(self):
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")

    def derive(self, *path: int) -> int:
        state = self.master_seed
        for component in path:
            state = splitmix64(state ^ splitmix64(component & MASK64))
        return state

    def child(self, *path: int) -> "SeedSpec":
        return SeedSpec(self.derive(*path))

    def generator(self, *path: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.derive(*path)))


def as_generator(seed) -> np.random.Generator:
    """Accept a SeedSpec, a plain integer or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.generator()
    if isinstance(seed, (int, np.integer)):
        return SeedSpec(int(seed)).generator()
    raise TypeError(f"cannot build a random stream from {type(seed).__name__}")
