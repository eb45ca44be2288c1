"""Particle simulation of nonlocal interaction equations on prox-regular domains."""

from .dynamics import SchemeConfig, simulate, stability_experiment
from .geometry import make_domain
from .measures import ParticleMeasure, energy, velocity_field
from .potentials import builtin_potential
from .transport import wasserstein2

__all__ = [
    "ParticleMeasure",
    "SchemeConfig",
    "builtin_potential",
    "energy",
    "make_domain",
    "simulate",
    "stability_experiment",
    "velocity_field",
    "wasserstein2",
]
