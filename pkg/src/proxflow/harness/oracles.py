"""Brute-force references for the transport solver."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..measures import ParticleMeasure
from ..transport import squared_distances


def assignment_by_permutations(X, Y) -> float:
    """Squared ``d_W`` between uniform measures of equal size by enumerating permutations."""
    C = squared_distances(X, Y)
    n = len(C)
    rows = np.arange(n)
    best = math.inf
    for perm in itertools.permutations(range(n)):
        best = min(best, float(C[rows, list(perm)].sum()))
    return best / n


def assignment_by_hungarian(X, Y) -> float:
    """Same quantity as ``assignment_by_permutations`` for larger sizes."""
    C = squared_distances(X, Y)
    r, c = linear_sum_assignment(C)
    return float(C[r, c].sum()) / len(C)


def shard_distance(mu: ParticleMeasure, nu: ParticleMeasure, q: int) -> float:
    """``d_W`` after splitting both measures into ``q`` unit shards each."""
    return math.sqrt(max(assignment_by_hungarian(split_into_shards(mu, q), split_into_shards(nu, q)), 0.0))


def split_into_shards(mu: ParticleMeasure, q: int) -> np.ndarray:
    """Positions repeated ``m_i q`` times; requires every ``m_i q`` to be an integer."""
    counts = np.rint(mu.masses * q).astype(int)
    if np.max(np.abs(counts - mu.masses * q)) > 1e-9:
        raise ValueError(f"masses are not multiples of 1/{q}")
    return np.repeat(mu.positions, counts, axis=0)


def random_rational_masses(rng, n: int, q: int) -> np.ndarray:
    """Masses ``k_i / q`` with every ``k_i >= 1``."""
    if n > q:
        raise ValueError("need n <= q")
    k = np.ones(n, dtype=int)
    for idx in rng.integers(0, n, size=q - n):
        k[idx] += 1
    return k / q
