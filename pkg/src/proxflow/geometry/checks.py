"""Randomised checks of the prox-regularity constant and cone identities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import moreau_decompose
from .domains import Domain, PlanarDomain
from .tolerances import TOL_GEOM, TOL_NUM


@dataclass
class SampleResult:
    name: str
    samples: int
    worst: float
    passed: bool

    def __str__(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.samples} samples, worst excess {self.worst:.3e}"


def boundary_normals(domain: Domain, rng, k: int):
    """``k`` boundary points with a random unit vector from each normal cone.

    A tenth of the draws sit exactly on vertices so corner cones are covered.
    Points whose cone is trivial (inside corners) are dropped.
    """
    pts = [domain.sample_boundary(rng, k)]
    if isinstance(domain, PlanarDomain) and domain.vertices:
        vx = np.array([v.point for v in domain.vertices])
        pts.append(vx[rng.integers(0, len(vx), size=max(1, k // 10))])
    X = np.concatenate(pts)[:k]
    fast = domain.normal_generators_many(X)
    if fast is not None:
        G, count = fast
        w = rng.random((len(X), 2)) * (np.arange(2)[None, :] < count[:, None])
        V = np.einsum("ik,ikd->id", w, G)
        nv = np.linalg.norm(V, axis=1)
        ok = nv > 0.0
        return X[ok], V[ok] / nv[ok, None]
    keep, normals = [], []
    for i, x in enumerate(X):
        gens = domain.normal_cone(x).generators
        if len(gens) == 0:
            continue
        w = rng.random(len(gens))
        v = w @ gens
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        keep.append(i)
        normals.append(v / nv)
    return X[keep], np.array(normals)


def prox_inequality_sample(domain: Domain, rng, n: int = 10_000, eta: float | None = None,
                           tol: float = TOL_NUM) -> SampleResult:
    """Check ``<v, y - x> <= |y - x|^2 / (2 eta)`` on random triples.

    ``x`` is on the boundary, ``v`` a unit normal at ``x``, ``y`` in the
    domain. Half of the ``y`` are drawn near ``x`` and half from the boundary,
    where violations of an overstated ``eta`` show up first.
    """
    eta = domain.eta if eta is None else eta
    X, Vn = boundary_normals(domain, rng, n)
    m = len(X)
    Y = np.concatenate([domain.sample_boundary(rng, m // 2), domain.sample_interior(rng, m - m // 2)])
    rng.shuffle(Y)
    lhs = np.einsum("ij,ij->i", Vn, Y - X)
    rhs = np.zeros(m) if math.isinf(eta) else np.sum((Y - X) ** 2, axis=1) / (2.0 * eta)
    excess = lhs - rhs
    worst = float(excess.max())
    return SampleResult(f"prox inequality on {domain.kind} (eta={eta:.6g})", m, worst, worst <= tol)


def ball_exclusion_sample(domain: Domain, rng, n: int = 2_000, pool: int = 4_000,
                          eta: float | None = None) -> SampleResult:
    """No sampled point of the domain lies in the open ball ``B_eta(x + eta v)``."""
    eta = domain.eta if eta is None else eta
    X, Vn = boundary_normals(domain, rng, n)
    P = np.concatenate([domain.sample_boundary(rng, pool), domain.sample_interior(rng, pool)])
    worst = -math.inf
    if math.isinf(eta):
        # the ball degenerates to the open half-space {<v, y - x> > 0}
        for x, v in zip(X, Vn):
            worst = max(worst, float(np.max((P - x) @ v)))
    else:
        for x, v in zip(X, Vn):
            c = x + eta * v
            worst = max(worst, float(eta - np.min(np.linalg.norm(P - c, axis=1))))
    return SampleResult(f"ball exclusion on {domain.kind}", len(X), worst, worst <= TOL_GEOM + 1e-12)


def moreau_sample(domain: Domain, rng, n: int = 10_000, tol: float = TOL_NUM) -> SampleResult:
    """Orthogonality, Pythagoras and idempotence of the tangent projection."""
    X, _ = boundary_normals(domain, rng, n)
    worst = 0.0
    for x in X:
        cone = domain.normal_cone(x)
        v = rng.standard_normal(domain.dim) * rng.uniform(0.1, 10.0)
        vt, vn = moreau_decompose(v, cone)
        scale = max(1.0, float(v @ v))
        worst = max(
            worst,
            abs(float(vt @ vn)) / scale,
            abs(float(v @ v) - float(vt @ vt) - float(vn @ vn)) / scale,
            float(np.linalg.norm(moreau_decompose(vt, cone)[0] - vt)) / math.sqrt(scale),
        )
    return SampleResult(f"Moreau identities on {domain.kind}", len(X), worst, worst <= tol)


def slope_convexity_sample(domain: Domain, rng, n: int = 10_000, tol: float = TOL_NUM) -> SampleResult:
    """Convexity of ``v -> |P_x(v)|^2`` along random segments."""
    X, _ = boundary_normals(domain, rng, n)
    worst = -math.inf
    for x in X:
        cone = domain.normal_cone(x)
        v1, v2 = rng.standard_normal((2, domain.dim)) * 3.0
        th = rng.random()
        f = lambda v: float(np.sum(moreau_decompose(v, cone)[0] ** 2))  # noqa: E731
        excess = f((1 - th) * v1 + th * v2) - ((1 - th) * f(v1) + th * f(v2))
        worst = max(worst, excess)
    return SampleResult(f"|P_x(v)|^2 convexity on {domain.kind}", len(X), worst, worst <= tol)


def convex_monotonicity_sample(domain: Domain, rng, n: int = 2_000, pool: int = 500,
                               tol: float = TOL_NUM) -> SampleResult:
    """On convex domains ``<v - P_x(v), y - x> <= 0`` for every ``y`` in the domain."""
    X, _ = boundary_normals(domain, rng, n)
    Y = domain.sample_interior(rng, pool)
    worst = -math.inf
    for x in X:
        v = rng.standard_normal(domain.dim) * 3.0
        vt, _ = moreau_decompose(v, domain.normal_cone(x))
        worst = max(worst, float(np.max((Y - x) @ (v - vt))))
    return SampleResult(f"convex monotonicity on {domain.kind}", len(X), worst, worst <= tol)
