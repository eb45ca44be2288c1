"""Analytic domains with exact projection and normal-cone queries.

Convex kinds (``HalfSpace``, ``Ball``, ``Box``) work in any dimension. The
planar kinds are described by a counter-clockwise chain of boundary pieces
(segments and circular arcs) plus a vertex table. Projection of an outside
point is the closest point over all pieces, which is exact for closed sets
because the closest point of an outside point is always on the boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import AmbiguousProjectionWarning, PointOutsideDomain
from .cones import Cone
from .tolerances import TOL_CORNER, TOL_GEOM

TWO_PI = 2.0 * math.pi


def _unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def _rot_cw(v):
    """Rotate a planar vector by -90 degrees."""
    return np.array([v[1], -v[0]])


# ---------------------------------------------------------------------------
# boundary pieces


@dataclass(frozen=True)
class Segment:
    """Boundary segment traversed from ``a`` to ``b`` with the interior on its left."""

    a: np.ndarray
    b: np.ndarray

    @property
    def normal(self) -> np.ndarray:
        d = self.b - self.a
        return _rot_cw(d) / np.linalg.norm(d)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def closest_many(self, P):
        d = self.b - self.a
        s = np.clip((P - self.a) @ d / (d @ d), 0.0, 1.0)
        return self.a + s[:, None] * d

    def normal_at(self, q):
        return self.normal

    def normal_many(self, Q):
        return np.broadcast_to(self.normal, np.shape(Q)).copy()

    def point_at(self, s):
        s = np.asarray(s, dtype=float)
        return self.a + s[..., None] * (self.b - self.a)


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius * u(theta)`` for theta in ``[theta0, theta0 + span]``.

    ``concave`` arcs bound the domain from outside the circle, so their
    outward normal points toward the center.
    """

    center: np.ndarray
    radius: float
    theta0: float
    span: float
    concave: bool = False

    @property
    def endpoints(self):
        return (
            self.center + self.radius * _unit(self.theta0),
            self.center + self.radius * _unit(self.theta0 + self.span),
        )

    @property
    def length(self) -> float:
        return self.radius * self.span

    def closest_many(self, P):
        rel = P - self.center
        r = np.hypot(rel[:, 0], rel[:, 1])
        phi = np.mod(np.arctan2(rel[:, 1], rel[:, 0]) - self.theta0, TWO_PI)
        on_arc = (phi <= self.span) & (r > 0.0)
        out = np.empty_like(P)
        safe_r = np.where(r > 0.0, r, 1.0)
        out[on_arc] = self.center + self.radius * rel[on_arc] / safe_r[on_arc, None]
        e0, e1 = self.endpoints
        off = ~on_arc
        if np.any(off):
            d0 = np.sum((P[off] - e0) ** 2, axis=1)
            d1 = np.sum((P[off] - e1) ** 2, axis=1)
            out[off] = np.where((d0 <= d1)[:, None], e0, e1)
        return out

    def normal_at(self, q):
        u = (np.asarray(q) - self.center) / self.radius
        u = u / np.linalg.norm(u)
        return -u if self.concave else u

    def normal_many(self, Q):
        U = np.asarray(Q) - self.center
        U = U / np.linalg.norm(U, axis=1)[:, None]
        return -U if self.concave else U

    def point_at(self, s):
        s = np.asarray(s, dtype=float)
        th = self.theta0 + s * self.span
        return self.center + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)


@dataclass(frozen=True)
class Vertex:
    point: np.ndarray
    normals: tuple
    reflex: bool = False


# ---------------------------------------------------------------------------
# domain base


class Domain:
    """Closed subset of R^d with projection and normal-cone queries."""

    kind: str = "Domain"
    dim: int
    eta: float
    diameter: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.diameter)

    @property
    def prox_regular(self) -> bool:
        return self.eta > 0.0

    @property
    def convex(self) -> bool:
        return math.isinf(self.eta)

    # subclasses implement the vectorised primitives below
    def contains_many(self, P) -> np.ndarray:
        raise NotImplementedError

    def _project_outside(self, P):
        """Closest points for rows of ``P`` lying outside; returns ``(Z, ambiguous)``."""
        raise NotImplementedError

    def boundary_mask(self, X, tol: float = TOL_CORNER) -> np.ndarray:
        raise NotImplementedError

    def normal_cone(self, x) -> Cone:
        raise NotImplementedError

    def bounding_box(self, window: float = 2.0):
        raise NotImplementedError

    def normal_generators_many(self, X):
        """Vectorised normal cones with at most two generators, or ``None`` if unsupported."""
        return None

    def sample_boundary(self, rng, k: int) -> np.ndarray:
        raise NotImplementedError

    # shared behaviour
    def contains(self, p) -> bool:
        return bool(self.contains_many(np.atleast_2d(np.asarray(p, dtype=float)))[0])

    def project_many(self, P, warn: bool = True):
        """Project every row of ``P`` onto the domain.

        Returns ``(Z, ambiguous)`` where ``ambiguous`` flags rows whose closest
        point was not unique; those rows get the lexicographically smallest
        candidate.
        """
        P = np.atleast_2d(np.asarray(P, dtype=float))
        Z = P.copy()
        amb = np.zeros(len(P), dtype=bool)
        outside = ~self.contains_many(P)
        if np.any(outside):
            Z[outside], amb[outside] = self._project_outside(P[outside])
        if warn and np.any(amb):
            warnings.warn(
                f"{self.kind}: {int(amb.sum())} point(s) have no unique projection; "
                "picked the lexicographically smallest candidate",
                AmbiguousProjectionWarning,
                stacklevel=2,
            )
        return Z, amb

    def project(self, p) -> np.ndarray:
        Z, _ = self.project_many(np.atleast_2d(np.asarray(p, dtype=float)))
        return Z[0]

    def sample_interior(self, rng, k: int, window: float = 2.0) -> np.ndarray:
        """Uniform samples from the domain (clipped to ``window`` when unbounded)."""
        lo, hi = self.bounding_box(window)
        out = []
        need = k
        while need > 0:
            cand = rng.uniform(lo, hi, size=(max(4 * need, 64), len(lo)))
            cand = cand[self.contains_many(cand)]
            out.append(cand[:need])
            need -= len(out[-1])
        return np.concatenate(out, axis=0)

    def _check_inside(self, x):
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise PointOutsideDomain(f"{x.tolist()} is not in {self.kind}")
        return x

    def __repr__(self) -> str:
        return f"{self.kind}(eta={self.eta}, diameter={self.diameter})"


# ---------------------------------------------------------------------------
# convex kinds in R^d


class HalfSpace(Domain):
    """``{x : <a, x> <= b}`` with ``a`` normalised."""

    kind = "HalfSpace"

    def __init__(self, normal, offset: float = 0.0):
        a = np.asarray(normal, dtype=float)
        nrm = np.linalg.norm(a)
        if nrm == 0.0:
            raise ValueError("half-space normal must be nonzero")
        self.a = a / nrm
        self.b = float(offset) / nrm
        self.dim = len(a)
        self.eta = math.inf
        self.diameter = math.inf

    def contains_many(self, P):
        return np.atleast_2d(P) @ self.a <= self.b + TOL_GEOM

    def _project_outside(self, P):
        s = P @ self.a - self.b
        return P - s[:, None] * self.a, np.zeros(len(P), dtype=bool)

    def boundary_mask(self, X, tol=TOL_CORNER):
        return np.abs(np.atleast_2d(X) @ self.a - self.b) <= tol

    def normal_cone(self, x):
        x = self._check_inside(x)
        if abs(x @ self.a - self.b) <= TOL_CORNER:
            return Cone(self.a[None, :])
        return Cone.zero(self.dim)

    def normal_generators_many(self, X):
        on = self.boundary_mask(X)
        G = np.zeros((len(on), 2, self.dim))
        G[on, 0] = self.a
        return G, on.astype(int)

    def bounding_box(self, window=2.0):
        lo = -window * np.ones(self.dim)
        hi = window * np.ones(self.dim)
        return lo, hi

    def sample_boundary(self, rng, k):
        lo, hi = self.bounding_box()
        P = rng.uniform(lo, hi, size=(k, self.dim))
        return self._project_outside(P)[0] if k else P


class Ball(Domain):
    kind = "Ball"

    def __init__(self, radius: float = 1.0, center=None, dim: int = 2):
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        self.center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = len(self.center)
        self.eta = math.inf
        self.diameter = 2.0 * self.radius

    def contains_many(self, P):
        return np.linalg.norm(np.atleast_2d(P) - self.center, axis=1) <= self.radius + TOL_GEOM

    def _project_outside(self, P):
        rel = P - self.center
        r = np.linalg.norm(rel, axis=1)
        return self.center + self.radius * rel / r[:, None], np.zeros(len(P), dtype=bool)

    def boundary_mask(self, X, tol=TOL_CORNER):
        return np.abs(np.linalg.norm(np.atleast_2d(X) - self.center, axis=1) - self.radius) <= tol

    def normal_cone(self, x):
        x = self._check_inside(x)
        rel = x - self.center
        if abs(np.linalg.norm(rel) - self.radius) <= TOL_CORNER:
            return Cone(rel[None, :])
        return Cone.zero(self.dim)

    def bounding_box(self, window=2.0):
        return self.center - self.radius, self.center + self.radius

    def normal_generators_many(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        rel = X - self.center
        r = np.linalg.norm(rel, axis=1)
        on = np.abs(r - self.radius) <= TOL_CORNER
        G = np.zeros((len(X), 2, self.dim))
        G[on, 0] = rel[on] / r[on, None]
        return G, on.astype(int)

    def sample_boundary(self, rng, k):
        g = rng.standard_normal((k, self.dim))
        return self.center + self.radius * g / np.linalg.norm(g, axis=1)[:, None]


class Box(Domain):
    kind = "Box"

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ValueError("box needs lo < hi componentwise")
        self.dim = len(self.lo)
        self.eta = math.inf
        self.diameter = float(np.linalg.norm(self.hi - self.lo))

    def contains_many(self, P):
        P = np.atleast_2d(P)
        return np.all((P >= self.lo - TOL_GEOM) & (P <= self.hi + TOL_GEOM), axis=1)

    def _project_outside(self, P):
        return np.clip(P, self.lo, self.hi), np.zeros(len(P), dtype=bool)

    def boundary_mask(self, X, tol=TOL_CORNER):
        X = np.atleast_2d(X)
        return np.any((X <= self.lo + tol) | (X >= self.hi - tol), axis=1)

    def normal_cone(self, x):
        x = self._check_inside(x)
        gens = []
        for k in range(self.dim):
            e = np.zeros(self.dim)
            if x[k] >= self.hi[k] - TOL_CORNER:
                e[k] = 1.0
                gens.append(e)
            elif x[k] <= self.lo[k] + TOL_CORNER:
                e[k] = -1.0
                gens.append(e)
        return Cone(np.array(gens), self.dim) if gens else Cone.zero(self.dim)

    def bounding_box(self, window=2.0):
        return self.lo.copy(), self.hi.copy()

    def sample_boundary(self, rng, k):
        P = rng.uniform(self.lo, self.hi, size=(k, self.dim))
        axis = rng.integers(0, self.dim, size=k)
        side = rng.integers(0, 2, size=k)
        rows = np.arange(k)
        P[rows, axis] = np.where(side == 1, self.hi[axis], self.lo[axis])
        return P


# ---------------------------------------------------------------------------
# planar piecewise kinds


class PlanarDomain(Domain):
    """Planar domain bounded by a closed chain of segments and arcs."""

    dim = 2
    pieces: list
    vertices: list

    def _inside_strict(self, P) -> np.ndarray:
        raise NotImplementedError

    def _closest_candidates(self, P):
        C = np.stack([pc.closest_many(P) for pc in self.pieces], axis=0)
        D = np.sum((C - P[None, :, :]) ** 2, axis=2)
        return C, D

    def boundary_distance(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        _, D = self._closest_candidates(P)
        return np.sqrt(D.min(axis=0))

    def contains_many(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        ok = self._inside_strict(P)
        if not np.all(ok):
            bad = ~ok
            ok[bad] = self.boundary_distance(P[bad]) <= TOL_GEOM
        return ok

    def _project_outside(self, P):
        C, D = self._closest_candidates(P)
        dist = np.sqrt(D)
        j = np.argmin(dist, axis=0)
        cols = np.arange(P.shape[0])
        Z = C[j, cols]
        tied = dist <= dist[j, cols] + TOL_GEOM
        # adjacent pieces meeting at a vertex return the same point
        apart = np.linalg.norm(C - Z[None, :, :], axis=2) > TOL_GEOM
        amb = np.any(tied & apart, axis=0)
        for i in np.flatnonzero(amb):
            cands = C[tied[:, i], i, :]
            order = np.lexsort((cands[:, 1], cands[:, 0]))
            Z[i] = cands[order[0]]
        return Z, amb

    def normal_generators_many(self, X):
        """Up to two outward normals per row of ``X``; ``count`` is 0 for interior rows."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        n = len(X)
        G = np.zeros((n, 2, 2))
        count = np.zeros(n, dtype=int)
        C, D = self._closest_candidates(X)
        j = np.argmin(D, axis=0)
        on = np.sqrt(D[j, np.arange(n)]) <= TOL_CORNER
        for k, pc in enumerate(self.pieces):
            sel = on & (j == k)
            if np.any(sel):
                G[sel, 0] = pc.normal_many(C[k, sel])
        count[on] = 1
        for vx in self.vertices:
            at = np.linalg.norm(X - vx.point, axis=1) <= TOL_CORNER
            if not np.any(at):
                continue
            if vx.reflex:
                count[at] = 0
            else:
                G[at, 0], G[at, 1] = vx.normals
                count[at] = 2
        return G, count

    def boundary_mask(self, X, tol=TOL_CORNER):
        return self.boundary_distance(X) <= tol

    def normal_cone(self, x):
        x = self._check_inside(x)
        for vx in self.vertices:
            if np.linalg.norm(x - vx.point) <= TOL_CORNER:
                if vx.reflex:
                    # the proximal normal cone at an inside corner is trivial
                    return Cone.zero(2)
                return Cone(np.array(vx.normals))
        C, D = self._closest_candidates(x[None, :])
        j = int(np.argmin(D[:, 0]))
        if math.sqrt(D[j, 0]) <= TOL_CORNER:
            return Cone(self.pieces[j].normal_at(C[j, 0])[None, :])
        return Cone.zero(2)

    def bounding_box(self, window=2.0):
        pts = np.concatenate([pc.point_at(np.linspace(0, 1, 257)) for pc in self.pieces])
        return pts.min(axis=0), pts.max(axis=0)

    def sample_boundary(self, rng, k):
        lengths = np.array([pc.length for pc in self.pieces])
        which = rng.choice(len(self.pieces), size=k, p=lengths / lengths.sum())
        s = rng.uniform(0.0, 1.0, size=k)
        out = np.empty((k, 2))
        for j, pc in enumerate(self.pieces):
            m = which == j
            if np.any(m):
                out[m] = pc.point_at(s[m])
        return out

    def _sampled_diameter(self) -> float:
        from scipy.spatial import ConvexHull

        pts = np.concatenate(
            [pc.point_at(np.linspace(0, 1, 4097)) for pc in self.pieces]
            + [np.array([v.point for v in self.vertices])]
        )
        hull = pts[ConvexHull(pts).vertices]
        diff = hull[:, None, :] - hull[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff**2, axis=2))))


class ConvexPolygon(PlanarDomain):
    kind = "ConvexPolygon"

    def __init__(self, vertices):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
            raise ValueError("polygon needs at least three planar vertices")
        area2 = np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1])
        if area2 < 0:
            V = V[::-1]
        self.V = V
        n = len(V)
        self.pieces = [Segment(V[i], V[(i + 1) % n]) for i in range(n)]
        for i in range(n):
            e1 = V[(i + 1) % n] - V[i]
            e2 = V[(i + 2) % n] - V[(i + 1) % n]
            if e1[0] * e2[1] - e1[1] * e2[0] < -1e-14:
                raise ValueError("polygon is not convex")
        self.vertices = [
            Vertex(V[i], (self.pieces[i - 1].normal, self.pieces[i].normal)) for i in range(n)
        ]
        self.eta = math.inf
        diff = V[:, None, :] - V[None, :, :]
        self.diameter = float(np.sqrt(np.max(np.sum(diff**2, axis=2))))

    def _inside_strict(self, P):
        ok = np.ones(len(P), dtype=bool)
        for seg in self.pieces:
            ok &= (P - seg.a) @ seg.normal <= 0.0
        return ok


class AnnulusSector(PlanarDomain):
    """``{r u(theta) : r_in <= r <= r_out, theta_min <= theta <= theta_max}``.

    The concave inner arc limits prox-regularity to ``r_in``. When the opening
    exceeds a half turn the two inner corners face each other across the
    hole and the constant drops to half their distance,
    ``r_in * sin(span / 2)``.
    """

    kind = "AnnulusSector"

    def __init__(self, r_in, r_out, theta_min, theta_max, eta_override=None):
        if not 0.0 < r_in < r_out:
            raise ValueError("need 0 < r_in < r_out")
        span = theta_max - theta_min
        if not 0.0 < span < TWO_PI:
            raise ValueError("angular span must lie in (0, 2*pi)")
        self.r_in, self.r_out = float(r_in), float(r_out)
        self.theta_min, self.theta_max, self.span = float(theta_min), float(theta_max), float(span)
        u0, u1 = _unit(theta_min), _unit(theta_max)
        outer = Arc(np.zeros(2), r_out, theta_min, span)
        inner = Arc(np.zeros(2), r_in, theta_min, span, concave=True)
        seg_max = Segment(r_out * u1, r_in * u1)
        seg_min = Segment(r_in * u0, r_out * u0)
        self.pieces = [outer, seg_max, inner, seg_min]
        self.vertices = [
            Vertex(r_out * u1, (u1, seg_max.normal)),
            Vertex(r_in * u1, (seg_max.normal, -u1)),
            Vertex(r_in * u0, (-u0, seg_min.normal)),
            Vertex(r_out * u0, (seg_min.normal, u0)),
        ]
        self.eta_declared = self.r_in * math.sin(span / 2.0) if span > math.pi else self.r_in
        self.eta = float(eta_override) if eta_override is not None else self.eta_declared
        self.diameter = 2.0 * self.r_out if span >= math.pi else self._sampled_diameter()

    def _inside_strict(self, P):
        r = np.hypot(P[:, 0], P[:, 1])
        phi = np.mod(np.arctan2(P[:, 1], P[:, 0]) - self.theta_min, TWO_PI)
        return (r >= self.r_in) & (r <= self.r_out) & (phi <= self.span)


class DiskWithBite(PlanarDomain):
    """Disk ``|x| <= R`` with the open disk ``|x - c| < rho`` removed.

    The bite circle must cross the outer circle at two points. The concave
    bite arc gives prox-regularity constant ``rho``.
    """

    kind = "DiskWithBite"

    def __init__(self, R=1.0, c=(2.0, 0.0), rho=1.5, eta_override=None):
        c = np.asarray(c, dtype=float)
        d = float(np.linalg.norm(c))
        if not abs(R - rho) < d < R + rho:
            raise ValueError("bite circle must cross the outer circle twice")
        self.R, self.c, self.rho = float(R), c, float(rho)
        ch = c / d
        cperp = np.array([-ch[1], ch[0]])
        a = (R * R - rho * rho + d * d) / (2.0 * d)
        h = math.sqrt(R * R - a * a)
        p_plus = a * ch + h * cperp
        p_minus = a * ch - h * cperp
        half_out = math.atan2(h, a)
        phi_c = math.atan2(ch[1], ch[0])
        outer = Arc(np.zeros(2), R, phi_c + half_out, TWO_PI - 2.0 * half_out)
        alpha = math.atan2(h, d - a)
        bite = Arc(c, rho, phi_c + math.pi - alpha, 2.0 * alpha, concave=True)
        self.pieces = [outer, bite]
        self.vertices = [
            Vertex(p_minus, (p_minus / R, (c - p_minus) / rho)),
            Vertex(p_plus, ((c - p_plus) / rho, p_plus / R)),
        ]
        self.corners = (p_plus, p_minus)
        self.eta_declared = self.rho
        self.eta = float(eta_override) if eta_override is not None else self.eta_declared
        self.diameter = 2.0 * self.R if outer.span >= math.pi else self._sampled_diameter()

    def _inside_strict(self, P):
        return (np.hypot(P[:, 0], P[:, 1]) <= self.R) & (
            np.hypot(P[:, 0] - self.c[0], P[:, 1] - self.c[1]) >= self.rho
        )


class PacManSector(PlanarDomain):
    """Closed disk sector with an inside corner at the origin.

    Not prox-regular: ``eta`` is the sentinel ``0``. Projection is not unique
    along the bisector of the missing wedge.
    """

    kind = "PacManSector"

    def __init__(self, r_max=1.0, theta_min=math.pi / 4, theta_max=7 * math.pi / 4):
        span = theta_max - theta_min
        if not math.pi < span < TWO_PI:
            raise ValueError("PacManSector needs an opening between pi and 2*pi")
        self.r_max, self.theta_min, self.theta_max, self.span = (
            float(r_max),
            float(theta_min),
            float(theta_max),
            float(span),
        )
        u0, u1 = _unit(theta_min), _unit(theta_max)
        arc = Arc(np.zeros(2), r_max, theta_min, span)
        seg_in = Segment(r_max * u1, np.zeros(2))
        seg_out = Segment(np.zeros(2), r_max * u0)
        self.pieces = [arc, seg_in, seg_out]
        self.vertices = [
            Vertex(r_max * u1, (u1, seg_in.normal)),
            Vertex(np.zeros(2), (seg_in.normal, seg_out.normal), reflex=True),
            Vertex(r_max * u0, (seg_out.normal, u0)),
        ]
        self.eta = 0.0
        self.diameter = 2.0 * self.r_max

    def _inside_strict(self, P):
        r = np.hypot(P[:, 0], P[:, 1])
        phi = np.mod(np.arctan2(P[:, 1], P[:, 0]) - self.theta_min, TWO_PI)
        return (r <= self.r_max) & ((phi <= self.span) | (r == 0.0))


# ---------------------------------------------------------------------------
# construction from a parameter mapping


def _eta_wrap(dom: Domain, eta_override):
    if eta_override is not None:
        dom.eta = float(eta_override)
    return dom


def make_domain(kind: str, params: dict | None = None) -> Domain:
    """Build a domain from its kind name and a flat parameter mapping."""
    p = dict(params or {})
    eta_override = p.pop("eta_override", None)
    if kind == "HalfSpace":
        return _eta_wrap(HalfSpace(p.pop("normal", (1.0, 0.0)), p.pop("offset", 0.0)), eta_override)
    if kind == "Ball":
        center = p.pop("center", None)
        return _eta_wrap(
            Ball(p.pop("radius", 1.0), center=center, dim=int(p.pop("dim", 2))), eta_override
        )
    if kind == "Box":
        return _eta_wrap(Box(p.pop("lo"), p.pop("hi")), eta_override)
    if kind == "ConvexPolygon":
        return _eta_wrap(ConvexPolygon(p.pop("vertices")), eta_override)
    if kind == "AnnulusSector":
        return AnnulusSector(
            p.pop("r_in"), p.pop("r_out"), p.pop("theta_min"), p.pop("theta_max"), eta_override
        )
    if kind == "DiskWithBite":
        return DiskWithBite(
            p.pop("R", 1.0), p.pop("c", (2.0, 0.0)), p.pop("rho", 1.5), eta_override
        )
    if kind == "PacManSector":
        return PacManSector(
            p.pop("r_max", 1.0), p.pop("theta_min", math.pi / 4), p.pop("theta_max", 7 * math.pi / 4)
        )
    raise ValueError(f"unknown domain kind {kind!r}")


def sharpness_sector(eps: float) -> AnnulusSector:
    """The thin half-annulus whose two inner corners trap a stationary pair."""
    return AnnulusSector(1.0 - eps, 1.0, -eps, math.pi + eps)
