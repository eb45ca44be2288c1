"""Interaction and external potentials.

A :class:`Potential` bundles a C^1 function with its gradient, a declared
geodesic-convexity constant, a bound on ``sup |grad|`` over centered balls and
a linear-growth constant ``C`` with ``|grad f(x)| <= C (1 + |x|)``. All
callables accept arrays of shape ``(..., d)`` and an optional time argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnboundedDomain, UnknownPotential
from .geometry import Domain


@dataclass(frozen=True)
class Potential:
    name: str
    value: Callable
    gradient: Callable
    lam: float
    grad_sup_bound: Callable[[float], float]
    growth: float = math.inf
    hessian_min: Callable[[float], float] | None = None
    time_dependent: bool = False
    params: dict = field(default_factory=dict)

    def eval(self, x, t: float = 0.0):
        x = np.asarray(x, dtype=float)
        return self.value(x, t) if self.time_dependent else self.value(x)

    def grad(self, x, t: float = 0.0):
        x = np.asarray(x, dtype=float)
        return self.gradient(x, t) if self.time_dependent else self.gradient(x)

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"


def _norm(x):
    return np.sqrt(np.sum(x * x, axis=-1))


def quadratic(strength: float = 1.0, center=None) -> Potential:
    """``k/2 |x - c|^2``; used both as interaction (``c = 0``) and as a confining field."""
    k = float(strength)
    c = None if center is None else np.asarray(center, dtype=float)
    cn = 0.0 if c is None else float(np.linalg.norm(c))

    def value(x):
        y = x if c is None else x - c
        return 0.5 * k * np.sum(y * y, axis=-1)

    def gradient(x):
        return k * (x if c is None else x - c)

    return Potential(
        "quadratic",
        value,
        gradient,
        lam=k,
        grad_sup_bound=lambda r: k * (r + cn),
        growth=k * max(1.0, cn),
        hessian_min=lambda r: k,
        params={"strength": k, "center": None if c is None else c.tolist()},
    )


def zero() -> Potential:
    return Potential(
        "zero",
        lambda x: np.zeros(np.shape(x)[:-1]),
        lambda x: np.zeros_like(x),
        lam=0.0,
        grad_sup_bound=lambda r: 0.0,
        growth=0.0,
        hessian_min=lambda r: 0.0,
    )


def linear_drift(a) -> Potential:
    """``<a, x>``: a constant force ``-a``."""
    a = np.asarray(a, dtype=float)
    an = float(np.linalg.norm(a))
    return Potential(
        "linear_drift",
        lambda x: x @ a,
        lambda x: np.broadcast_to(a, np.shape(x)).copy(),
        lam=0.0,
        grad_sup_bound=lambda r: an,
        growth=an,
        hessian_min=lambda r: 0.0,
        params={"a": a.tolist()},
    )


def power_attraction(p: float = 2.0) -> Potential:
    """``|x|^p / p`` for ``p >= 2``.

    The Hessian has eigenvalues ``|x|^(p-2)`` (tangential) and
    ``(p-1)|x|^(p-2)`` (radial), so its minimum over any ball around the
    origin is ``1`` for ``p = 2`` and ``0`` otherwise.
    """
    p = float(p)
    if p < 2.0:
        raise ValueError("power_attraction needs p >= 2")

    def value(x):
        return _norm(x) ** p / p

    def gradient(x):
        if p == 2.0:
            return np.array(x, dtype=float)
        return (_norm(x) ** (p - 2.0))[..., None] * x

    lam = 1.0 if p == 2.0 else 0.0
    return Potential(
        "power_attraction",
        value,
        gradient,
        lam=lam,
        grad_sup_bound=lambda r: r ** (p - 1.0),
        growth=1.0 if p == 2.0 else math.inf,
        hessian_min=lambda r: lam,
        params={"p": p},
    )


def time_dependent(name: str, value: Callable, gradient: Callable, lam: float,
                   grad_sup_bound: Callable[[float], float], growth: float = math.inf) -> Potential:
    """Wrap user callables ``f(x, t)`` and ``grad f(x, t)``; constants are taken as declared."""
    return Potential(name, value, gradient, lam, grad_sup_bound, growth, time_dependent=True)


_BUILTINS = {
    "quadratic": quadratic,
    "zero": zero,
    "linear_drift": linear_drift,
    "power_attraction": power_attraction,
}


def builtin_potential(name: str, params: dict | None = None) -> Potential:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownPotential(name) from None
    return factory(**(params or {}))


def grad_sup_on_difference_set(W: Potential, domain: Domain) -> float:
    """Upper bound for ``sup |grad W(x - y)|`` over ``x, y`` in the domain."""
    if not domain.bounded:
        raise UnboundedDomain(f"{domain.kind} has infinite diameter")
    return float(W.grad_sup_bound(domain.diameter))


def grad_sup_on_domain(V: Potential, domain: Domain) -> float:
    """Upper bound for ``sup |grad V|`` over the domain, via the enclosing centered ball."""
    if V.is_zero:
        return 0.0
    if not domain.bounded:
        raise UnboundedDomain(f"{domain.kind} has infinite diameter")
    lo, hi = domain.bounding_box()
    # the farthest box corner bounds |x| over the domain
    r = float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))
    return float(V.grad_sup_bound(r))


def _eta_term(bound: float, eta: float) -> float:
    if bound == 0.0 or math.isinf(eta):
        return 0.0
    return bound / eta


def contraction_exponent(W: Potential, V: Potential, domain: Domain) -> float:
    """Growth rate ``kappa`` of the stability bound ``d(t) <= exp(kappa t) d(0)``.

    ``kappa = -min(lam_W, 0) - lam_V + (|grad W|_{Omega - Omega} + |grad V|_Omega) / eta``;
    the boundary term drops out on convex domains.
    """
    lam_w_minus = min(W.lam, 0.0)
    base = -lam_w_minus - V.lam
    if domain.convex:
        return base
    bound = grad_sup_on_difference_set(W, domain) + grad_sup_on_domain(V, domain)
    return base + _eta_term(bound, domain.eta)


def singleton_exponent(W: Potential, domain: Domain) -> float:
    """Rate in ``d(mu(t), Xi) <= exp(rate t) d(mu_0, Xi)`` with the full boundary term ``|grad W| / eta``."""
    base = -W.lam
    if domain.convex:
        return base
    return base + _eta_term(grad_sup_on_difference_set(W, domain), domain.eta)


def aggregation_exponent(W: Potential, domain: Domain) -> float:
    """``-lam_W + |grad W|_{Omega - Omega} / (2 eta)``; negative means guaranteed aggregation."""
    base = -W.lam
    if domain.convex:
        return base
    return base + 0.5 * _eta_term(grad_sup_on_difference_set(W, domain), domain.eta)


def evi_constant(W: Potential, V: Potential, domain: Domain) -> float:
    """Coefficient of ``d_W^2(mu(t), nu)`` in the evolution variational inequality."""
    base = 0.5 * min(W.lam, 0.0) + 0.5 * V.lam
    if domain.convex:
        return base
    bound = grad_sup_on_difference_set(W, domain) + grad_sup_on_domain(V, domain)
    return base - 0.5 * _eta_term(bound, domain.eta)


def support_growth_constant(W: Potential, V: Potential) -> float:
    """``C`` with ``d/dt (1 + r) <= C (1 + r)`` for the support radius ``r``.

    A particle at the maximal radius ``r`` sees
    ``|sum_j m_j grad W(x_i - x_j)| <= C_W (1 + 2 r)`` and
    ``|grad V(x_i)| <= C_V (1 + r)``, and projection onto a convex set
    containing the origin does not increase ``|x|``, so ``C = 2 C_W + C_V``.
    """
    return 2.0 * W.growth + V.growth


@dataclass(frozen=True)
class ConvexityLadder:
    """Per-level convexity constants on nested centered balls ``B(r_k)``.

    Requests past the last radius extend the ladder by doubling.
    """

    radii: tuple
    lambdas_W: tuple
    lambdas_V: tuple
    W: Potential = field(repr=False, compare=False)
    V: Potential = field(repr=False, compare=False)

    @classmethod
    def build(cls, W: Potential, V: Potential, radii) -> "ConvexityLadder":
        radii = tuple(float(r) for r in radii)
        if not radii or any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
            raise ValueError("ladder radii must be positive and strictly increasing")
        # K_k - K_k is the ball of radius 2 r_k
        lw = tuple(_level_lambda(W, 2.0 * r) for r in radii)
        lv = tuple(_level_lambda(V, r) for r in radii)
        return cls(radii, lw, lv, W, V)

    def extended(self, radius: float) -> "ConvexityLadder":
        radii = list(self.radii)
        while radii[-1] < radius:
            radii.append(2.0 * radii[-1])
        return ConvexityLadder.build(self.W, self.V, radii)

    def constants_for(self, radius: float) -> tuple[float, float, float]:
        """``(r_k, lambda_W_k, lambda_V_k)`` for the smallest level covering ``radius``."""
        lad = self if radius <= self.radii[-1] else self.extended(radius)
        k = next(i for i, r in enumerate(lad.radii) if radius <= r)
        return lad.radii[k], lad.lambdas_W[k], lad.lambdas_V[k]


def _level_lambda(f: Potential, r: float) -> float:
    if f.hessian_min is not None:
        return float(f.hessian_min(r))
    return f.lam


def local_contraction_exponent(ladder: ConvexityLadder, domain: Domain, radius: float) -> float:
    """Stability exponent using the convexity constants of the level covering ``radius``."""
    r_k, lw, lv = ladder.constants_for(radius)
    base = -min(lw, 0.0) - lv
    if domain.convex:
        return base
    bound = ladder.W.grad_sup_bound(2.0 * r_k) + ladder.V.grad_sup_bound(r_k)
    return base + _eta_term(bound, domain.eta)
