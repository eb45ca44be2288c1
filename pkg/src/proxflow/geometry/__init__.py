"""Domains, normal cones and tangent-cone projection."""

from __future__ import annotations

import numpy as np

from .cones import Cone, moreau_decompose, project_onto_cone
from .domains import (
    AnnulusSector,
    Ball,
    Box,
    ConvexPolygon,
    DiskWithBite,
    Domain,
    HalfSpace,
    PacManSector,
    PlanarDomain,
    make_domain,
    sharpness_sector,
)
from .tolerances import TOL_CORNER, TOL_GEOM, TOL_NUM

__all__ = [
    "AnnulusSector",
    "Ball",
    "Box",
    "Cone",
    "ConvexPolygon",
    "DiskWithBite",
    "Domain",
    "HalfSpace",
    "PacManSector",
    "PlanarDomain",
    "TOL_CORNER",
    "TOL_GEOM",
    "TOL_NUM",
    "contains",
    "make_domain",
    "moreau_decompose",
    "normal_cone",
    "product_projection_check",
    "project_onto_cone",
    "project_onto_domain",
    "project_tangent",
    "project_tangent_many",
    "sharpness_sector",
]


def contains(domain: Domain, p) -> bool:
    return domain.contains(p)


def project_onto_domain(domain: Domain, p) -> np.ndarray:
    return domain.project(p)


def normal_cone(domain: Domain, x) -> Cone:
    return domain.normal_cone(x)


def project_tangent(domain: Domain, x, v) -> np.ndarray:
    """Projection of ``v`` onto the tangent cone of ``domain`` at ``x``."""
    v_t, _ = moreau_decompose(v, domain.normal_cone(x))
    return v_t


def project_tangent_many(domain: Domain, X, Vel) -> np.ndarray:
    """Row-wise tangent projection of ``Vel`` at the points ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.array(Vel, dtype=float, copy=True)
    gens = domain.normal_generators_many(X)
    if gens is None:
        for i in np.flatnonzero(domain.boundary_mask(X)):
            out[i], _ = moreau_decompose(out[i], domain.normal_cone(X[i]))
        return out
    G, count = gens
    return out - _normal_part_2gen(out, G, count)


def _normal_part_2gen(V, G, count):
    """Projection onto cones with at most two unit generators, face by face."""
    N = np.zeros_like(V)
    p0 = np.einsum("ij,ij->i", V, G[:, 0])
    p1 = np.einsum("ij,ij->i", V, G[:, 1])
    one = count == 1
    N[one] = np.maximum(p0[one], 0.0)[:, None] * G[one, 0]
    two = count == 2
    if np.any(two):
        g0, g1 = G[two, 0], G[two, 1]
        q0, q1 = p0[two], p1[two]
        c = np.einsum("ij,ij->i", g0, g1)
        det = 1.0 - c * c
        ok = det > 1e-14
        sdet = np.where(ok, det, 1.0)
        a = (q0 - c * q1) / sdet
        b = (q1 - c * q0) / sdet
        interior = ok & (a >= 0.0) & (b >= 0.0)
        r0 = np.maximum(q0, 0.0)
        r1 = np.maximum(q1, 0.0)
        ray = np.where((r0 >= r1)[:, None], r0[:, None] * g0, r1[:, None] * g1)
        N[two] = np.where(interior[:, None], a[:, None] * g0 + b[:, None] * g1, ray)
    return N


def product_projection_check(domain: Domain, points, displacement, rng=None, n_samples: int = 4096,
                             tol: float = TOL_NUM) -> bool:
    """Check that projecting onto the product set ``domain^n`` is componentwise.

    The stacked point ``Y = points + displacement`` is projected component by
    component to get ``Z``. ``Z`` is accepted when

    * every component lies in the domain,
    * the stacked residual ``Y - Z`` lies in the product normal cone, i.e.
      each block's tangential part vanishes, and
    * no candidate of the product set built from independent samples of the
      domain (boundary and interior, shuffled across blocks) is strictly
      closer to ``Y`` than ``Z``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    X = np.atleast_2d(np.asarray(points, dtype=float))
    Y = X + np.atleast_2d(np.asarray(displacement, dtype=float))
    Z, _ = domain.project_many(Y, warn=False)
    if not np.all(domain.contains_many(Z)):
        return False
    R = Y - Z
    for z, r in zip(Z, R):
        if np.linalg.norm(r) <= tol:
            continue
        r_t, _ = moreau_decompose(r, domain.normal_cone(z))
        if np.linalg.norm(r_t) > tol * max(1.0, np.linalg.norm(r)):
            return False
    stacked = float(np.sum(R**2))
    pool = np.concatenate(
        [domain.sample_boundary(rng, n_samples), domain.sample_interior(rng, n_samples // 4)]
    )
    # best sampled candidate for each block, then random recombinations
    D = np.sum((pool[None, :, :] - Y[:, None, :]) ** 2, axis=2)
    best_blocks = D.min(axis=1)
    if np.sum(best_blocks) < stacked - tol:
        return False
    idx = rng.integers(0, len(pool), size=(256, len(Y)))
    combos = np.sum(D[np.arange(len(Y))[None, :], idx], axis=1)
    return bool(np.all(combos >= stacked - tol))
