"""Weighted point clouds, the interaction energy and its metric slope."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptySample, PointOutsideDomain
from .geometry import Domain, project_tangent_many
from .potentials import Potential

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ParticleMeasure:
    """``sum_i m_i delta_{x_i}`` with ``positions`` of shape ``(n, d)``.

    Instances are immutable; the arrays are flagged read-only.
    """

    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        X = np.array(self.positions, dtype=float, copy=True)
        if X.ndim == 1:
            X = X[None, :]
        m = np.array(self.masses, dtype=float, copy=True).reshape(-1)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError("a measure needs at least one particle")
        if len(m) != len(X):
            raise ValueError("positions and masses differ in length")
        if not np.all(np.isfinite(X)):
            raise ValueError("positions must be finite")
        if np.any(m <= 0.0):
            raise ValueError("masses must be positive")
        if abs(m.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {m.sum()!r}, expected 1")
        X.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "positions", X)
        object.__setattr__(self, "masses", m)

    @classmethod
    def uniform(cls, positions) -> "ParticleMeasure":
        X = np.atleast_2d(np.asarray(positions, dtype=float))
        return cls(X, np.full(len(X), 1.0 / len(X)))

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def with_positions(self, X) -> "ParticleMeasure":
        return ParticleMeasure(X, self.masses)

    def center_of_mass(self) -> np.ndarray:
        return self.masses @ self.positions

    def support_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.positions, axis=1)))

    def check_in(self, domain: Domain) -> None:
        bad = ~domain.contains_many(self.positions)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise PointOutsideDomain(f"particle {i} at {self.positions[i].tolist()} is outside {domain.kind}")


def _pairwise(X):
    return X[:, None, :] - X[None, :, :]


def energy(mu: ParticleMeasure, W: Potential, V: Potential, t: float = 0.0) -> float:
    """``1/2 sum_ij m_i m_j W(x_i - x_j) + sum_i m_i V(x_i)``, diagonal included."""
    m = mu.masses
    interaction = 0.0
    if not W.is_zero:
        interaction = 0.5 * float(m @ W.eval(_pairwise(mu.positions), t) @ m)
    external = 0.0 if V.is_zero else float(m @ V.eval(mu.positions, t))
    return interaction + external


def velocity_field(mu: ParticleMeasure, W: Potential, V: Potential, t: float = 0.0) -> np.ndarray:
    """``v_i = -sum_j m_j grad W(x_i - x_j) - grad V(x_i)`` for every particle."""
    X = mu.positions
    v = np.zeros_like(X)
    if not W.is_zero:
        # einsum fixes the summation order over j for every i
        v -= np.einsum("ijk,j->ik", W.grad(_pairwise(X), t), mu.masses)
    if not V.is_zero:
        v -= V.grad(X, t)
    return v


def projected_velocity(mu: ParticleMeasure, domain: Domain, W: Potential, V: Potential,
                       t: float = 0.0) -> np.ndarray:
    return project_tangent_many(domain, mu.positions, velocity_field(mu, W, V, t))


def dissipation(mu: ParticleMeasure, domain: Domain, W: Potential, V: Potential, t: float = 0.0) -> float:
    """Discrete metric slope ``sum_i m_i |P_{x_i}(v_i)|^2``."""
    pv = projected_velocity(mu, domain, W, V, t)
    return float(mu.masses @ np.sum(pv * pv, axis=1))


def discretize_initial(spec: dict, domain: Domain) -> ParticleMeasure:
    """Quantise an initial datum into equal- or explicit-mass particles.

    Recipes (``spec["recipe"]``):

    ``explicit``
        ``positions`` and optional ``masses`` (uniform otherwise).
    ``grid``
        ``per_axis`` nodes per axis over the domain's bounding box (or over
        ``lo``/``hi`` when given), cell-centred, keeping those inside.
    ``random``
        ``n`` uniform points with ``seed``, optionally restricted to the ball
        ``center``/``radius``, or split evenly over several balls given as
        ``centers`` with a common ``radius``.
    """
    recipe = spec.get("recipe", "random")
    if recipe == "explicit":
        X = np.atleast_2d(np.asarray(spec["positions"], dtype=float))
        masses = spec.get("masses")
        mu = ParticleMeasure.uniform(X) if masses is None else ParticleMeasure(X, masses)
        mu.check_in(domain)
        return mu
    if recipe == "grid":
        k = int(spec["per_axis"])
        lo, hi = domain.bounding_box(float(spec.get("window", 2.0)))
        lo = np.asarray(spec.get("lo", lo), dtype=float)
        hi = np.asarray(spec.get("hi", hi), dtype=float)
        axes = [lo[a] + (np.arange(k) + 0.5) * (hi[a] - lo[a]) / k for a in range(len(lo))]
        X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
        X = X[domain.contains_many(X)]
        if len(X) == 0:
            raise EmptySample("grid recipe produced no points inside the domain")
        return ParticleMeasure.uniform(X)
    if recipe == "random":
        n = int(spec["n"])
        rng = np.random.default_rng(int(spec.get("seed", 0)))
        if "centers" in spec:
            centers = np.atleast_2d(np.asarray(spec["centers"], dtype=float))
            counts = [n // len(centers) + (k < n % len(centers)) for k in range(len(centers))]
            X = np.concatenate([
                _sample_in_ball(rng, domain, cnt, {"center": c, "radius": spec["radius"]})
                for c, cnt in zip(centers, counts)
            ])
        elif "radius" in spec:
            X = _sample_in_ball(rng, domain, n, spec)
        else:
            X = domain.sample_interior(rng, n, float(spec.get("window", 2.0)))
        return ParticleMeasure.uniform(X)
    raise ValueError(f"unknown initial recipe {recipe!r}")


def _sample_in_ball(rng, domain, n, spec):
    r = float(spec["radius"])
    c = np.asarray(spec.get("center", np.zeros(domain.dim)), dtype=float)
    out, need, tries = [], n, 0
    while need > 0:
        cand = c + rng.uniform(-r, r, size=(max(8 * need, 64), domain.dim))
        cand = cand[(np.linalg.norm(cand - c, axis=1) <= r) & domain.contains_many(cand)]
        out.append(cand[:need])
        need -= len(out[-1])
        tries += 1
        if tries > 200 and need == n:
            raise EmptySample("ball recipe never hit the domain")
    return np.concatenate(out)


def read_measure_csv(path) -> ParticleMeasure:
    """Read ``x1,...,xd,mass`` rows; masses are renormalised only if off by rounding."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1].strip() != "mass":
            raise ValueError(f"{path}: last header column must be 'mass'")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no particles")
    A = np.asarray(rows)
    m = A[:, -1]
    if abs(m.sum() - 1.0) <= 1e-9:
        m = m / m.sum()
    return ParticleMeasure(A[:, :-1], m)


def write_measure_csv(mu: ParticleMeasure, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{k + 1}" for k in range(mu.dim)] + ["mass"])
        for x, m in zip(mu.positions, mu.masses):
            w.writerow([repr(float(v)) for v in x] + [repr(float(m))])
