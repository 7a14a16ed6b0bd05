"""
Counter-based random streams.

Every path draws from its own Philox generator keyed by
(run seed, seed domain, *keys, path index), so a batch is reproducible no
matter how it is split into chunks or across workers. Seed domains keep the
training, verification and initialization streams disjoint.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple

import numpy as np


class SeedDomain(IntEnum):
    """Disjoint families of random streams."""
    TRAIN = 0
    VERIFY = 1
    NEIGHBORHOOD = 2
    INIT = 3
    DIAGNOSTIC = 4


@dataclass(frozen=True)
class RngStream:
    """Address of a family of substreams."""

    seed: int
    domain: SeedDomain = SeedDomain.TRAIN
    key: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    def substream(self, *keys: int) -> "RngStream":
        """A child stream, e.g. one per training step."""
        return RngStream(self.seed, self.domain, self.key + tuple(int(k) for k in keys))

    def generator(self, *keys: int) -> np.random.Generator:
        """Philox generator for the given counter keys (typically a path index)."""
        spawn_key = (int(self.domain),) + self.key + tuple(int(k) for k in keys)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=spawn_key)
        return np.random.Generator(np.random.Philox(sequence))


def stream_for(seed: int, domain: SeedDomain, *keys: int) -> RngStream:
    return RngStream(seed, domain, tuple(int(k) for k in keys))
