"""Seeded, splittable randomness. Every stochastic routine takes a
``numpy.random.Generator``; sub-streams come from labelled spawn keys so the
same (seed, label) always yields the same stream."""

from __future__ import annotations

import zlib

import numpy as np


def rng_for(seed: int, *labels: str) -> np.random.Generator:
    key = tuple(zlib.crc32(lab.encode()) for lab in labels)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
