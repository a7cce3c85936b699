"""Seed derivation for reproducible, purpose-separated random streams.

A master seed fans out into independent child seeds keyed by a purpose
tag (e.g. "noise", "reservoir") so that the same master seed drives the
same noisy observations regardless of which reservoir architecture is
being evaluated.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixing function."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, tag: str) -> int:
    """Derive a 64-bit child seed from (master, tag).

    Mixes the tag bytes into the master seed via repeated splitmix64
    steps; different tags give statistically independent streams.
    """
    state = splitmix64(master & _MASK64)
    for byte in tag.encode("utf-8"):
        state = splitmix64(state ^ byte)
    return state


def generator(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; the single PRNG used across the package."""
    return np.random.default_rng(seed & _MASK64)
