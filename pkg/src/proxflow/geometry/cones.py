"""Finitely generated normal cones and the Moreau split of a vector."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .tolerances import TOL_NUM


@dataclass(frozen=True)
class Cone:
    """Closed convex cone ``{sum a_k g_k : a_k >= 0}`` with apex at the origin.

    ``generators`` has shape ``(k, d)``; ``k == 0`` is the trivial cone ``{0}``.
    Generators are normalised on construction.
    """

    generators: np.ndarray
    dim: int

    def __init__(self, generators, dim: int | None = None):
        g = np.asarray(generators, dtype=float)
        if g.size == 0:
            if dim is None:
                raise ValueError("dimension required for the zero cone")
            g = np.zeros((0, dim))
        else:
            g = np.atleast_2d(g)
            norms = np.linalg.norm(g, axis=1)
            if np.any(norms == 0.0) or not np.all(np.isfinite(g)):
                raise ValueError("cone generators must be finite and nonzero")
            g = g / norms[:, None]
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "dim", g.shape[1] if dim is None else dim)

    @classmethod
    def zero(cls, dim: int) -> "Cone":
        return cls(np.zeros((0, dim)), dim)

    @property
    def is_zero(self) -> bool:
        return self.generators.shape[0] == 0

    def __len__(self) -> int:
        return self.generators.shape[0]

    def contains(self, v, tol: float = TOL_NUM) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(project_onto_cone(v, self) - v) <= tol * max(1.0, np.linalg.norm(v)))

    def in_polar(self, v, tol: float = TOL_NUM) -> bool:
        """True iff ``<v, g> <= 0`` for every generator (tangent-cone membership)."""
        if self.is_zero:
            return True
        return bool(np.all(self.generators @ np.asarray(v, dtype=float) <= tol))


def project_onto_cone(v: np.ndarray, cone: Cone) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``cone``.

    The projection lies in the relative interior of exactly one face, and
    every face of a finitely generated cone is spanned by a subset of the
    generators. We solve the unconstrained least-squares problem on each
    subset, keep the solutions with nonnegative coefficients, and return the
    closest one. With at most ``d <= 3`` generators this is at most eight
    tiny solves and gives the exact answer.
    """
    v = np.asarray(v, dtype=float)
    g = cone.generators
    k = g.shape[0]
    if k == 0:
        return np.zeros_like(v)
    best = np.zeros_like(v)
    best_dist = float(v @ v)
    for size in range(1, k + 1):
        for subset in combinations(range(k), size):
            basis = g[list(subset)]
            gram = basis @ basis.T
            if np.linalg.matrix_rank(gram) < size:
                continue
            coef = np.linalg.solve(gram, basis @ v)
            if np.any(coef < 0.0):
                continue
            cand = coef @ basis
            dist = float((v - cand) @ (v - cand))
            if dist < best_dist:
                best, best_dist = cand, dist
    return best


def moreau_decompose(v, n_cone: Cone) -> tuple[np.ndarray, np.ndarray]:
    """Split ``v`` into ``(v_T, v_N)`` with ``v_N`` in the cone and ``v_T`` in its polar.

    The two parts are orthogonal and sum to ``v``.
    """
    v = np.asarray(v, dtype=float)
    k = len(n_cone)
    if k == 0:
        return v.copy(), np.zeros_like(v)
    if k == 1:
        n = n_cone.generators[0]
        s = float(n @ v)
        v_n = max(s, 0.0) * n
        return v - v_n, v_n
    v_n = project_onto_cone(v, n_cone)
    return v - v_n, v_n
