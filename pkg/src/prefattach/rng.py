"""Deterministic, independently seeded random streams."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RngStream:
    """A numpy ``Generator`` keyed by ``(master_seed, stream_id)``.

    Two streams built from the same pair produce identical sequences; distinct
    stream ids are statistically independent (``SeedSequence`` entropy mixing).
    A stream must not be shared between threads.
    """

    master_seed: int
    stream_id: int = 0
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("master_seed and stream_id must be nonnegative")
        ss = np.random.SeedSequence([self.master_seed, self.stream_id])
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.master_seed, stream_id)


def as_generator(rng: RngStream | np.random.Generator | int | None) -> np.random.Generator:
    """Accept a stream, a bare Generator, or an int seed."""
    if isinstance(rng, RngStream):
        return rng.gen
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
