"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from torusgen.samplers import RngStream


class CountingGenerator:
    """Wraps a numpy Generator and counts how many uniforms are consumed."""

    def __init__(self, generator: np.random.Generator):
        self._generator = generator
        self.draws = 0

    def _count(self, size) -> None:
        self.draws += 1 if size is None else int(np.prod(np.atleast_1d(size)))

    def uniform(self, low=0.0, high=1.0, size=None):
        self._count(size)
        return self._generator.uniform(low, high, size)

    def random(self, size=None):
        self._count(size)
        return self._generator.random(size)

    def permutation(self, x):
        return self._generator.permutation(x)


def counting_stream(seed: int) -> tuple[RngStream, CountingGenerator]:
    """An RngStream whose generator tallies every uniform drawn through it."""
    stream = RngStream(seed)
    counter = CountingGenerator(stream.generator)
    stream._generator = counter
    return stream, counter


@pytest.fixture
def rng() -> RngStream:
    return RngStream(12345)
