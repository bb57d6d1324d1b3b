"""Deterministic per-point random generators.

Every scan point draws from its own stream derived from (seed, index), so a
point's samples do not depend on how many points precede it.
"""
import numpy as np

from ..core.exceptions import OutOfRange


def derive_rng(seed: int, index: int = 0) -> np.random.Generator:
    if seed < 0:
        raise OutOfRange("seed must be non-negative", details={"seed": seed})
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def point_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [derive_rng(seed, i) for i in range(count)]
