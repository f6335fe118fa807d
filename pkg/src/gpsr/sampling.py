"""Seeded randomness helpers shared by the estimators and the GP engine."""

from __future__ import annotations

import numpy as np

__all__ = ["rng_for", "sample_ball", "project_ball"]


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent deterministic substream for a (seed, *key) address.

    Substreams are stable regardless of evaluation order, which keeps
    concurrent or reordered execution byte-reproducible.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def sample_ball(rng: np.random.Generator, p: int, radius: float) -> np.ndarray:
    """Uniform draw from the closed l2 ball of the given radius."""
    if p == 0:
        return np.zeros(0)
    v = rng.standard_normal(p)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return np.zeros(p)
    r = radius * rng.random() ** (1.0 / p)
    return (r / norm) * v


def project_ball(theta: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the closed l2 ball."""
    norm = np.linalg.norm(theta)
    if norm <= radius:
        return theta
    return theta * (radius / norm)
