"""Time stepping of the projected particle system.

``catching_up`` moves every particle by ``dt`` times its velocity and
projects back onto the domain. ``projected_euler`` first removes the
outward normal part of the velocity and then projects, which only corrects
the curvature drift off the boundary.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FeasibilityBreach, NonProxRegularWarning, StepTooLarge
from .geometry import Domain, PacManSector, project_tangent_many
from .measures import ParticleMeasure, dissipation, energy, velocity_field, write_measure_csv
from .potentials import Potential, contraction_exponent
from .transport import distance_to_singletons, squared_distances, transport_simplex

log = logging.getLogger(__name__)

SCHEMES = ("catching_up", "projected_euler")


@dataclass(frozen=True)
class SimState:
    time: float
    measure: ParticleMeasure
    step_count: int = 0


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str = "catching_up"
    dt: float = 1e-3
    t_end: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_end / self.dt - 1e-9))


@dataclass(frozen=True)
class Record:
    t: float
    measure: ParticleMeasure
    energy: float
    dissipation: float
    dw_singleton: float
    support_radius: float


@dataclass
class Trajectory:
    records: list = field(default_factory=list)
    ambiguous_projections: int = 0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    @property
    def final(self) -> Record:
        return self.records[-1]

    def write_csv(self, path, snapshot_dir=None) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "energy", "dissipation", "dw_singleton", "support_radius"])
            for r in self.records:
                w.writerow([repr(r.t), repr(r.energy), repr(r.dissipation), repr(r.dw_singleton),
                            repr(r.support_radius)])
        if snapshot_dir is not None:
            snapshot_dir = Path(snapshot_dir)
            snapshot_dir.mkdir(parents=True, exist_ok=True)
            for k, r in enumerate(self.records):
                write_measure_csv(r.measure, snapshot_dir / f"measure_{k:05d}.csv")


def step_size_bound(eta: float, v_bound: float) -> float:
    """``min(0.1, eta / (2 v_bound))``."""
    if math.isinf(eta) or v_bound == 0.0:
        return 0.1
    return min(0.1, eta / (2.0 * v_bound))


def step_size_safety(domain: Domain, W: Potential, V: Potential, r_support: float) -> float:
    """Largest ``dt`` keeping a step inside the unique-projection band of the domain.

    The velocity is bounded by ``sup |grad W|`` over ``B(2 r)`` (differences of
    two points of ``B(r)``) plus ``sup |grad V|`` over ``B(r)``.
    """
    if isinstance(domain, PacManSector) or not domain.prox_regular:
        warnings.warn("domain is not prox-regular; using the fixed step 0.01", NonProxRegularWarning,
                      stacklevel=2)
        return 0.01
    v_bound = W.grad_sup_bound(2.0 * r_support) + V.grad_sup_bound(r_support)
    return step_size_bound(domain.eta, v_bound)


def _advance(state: SimState, X_new, dt, domain: Domain, amb_counter=None) -> SimState:
    Z, amb = domain.project_many(X_new)
    if amb_counter is not None:
        amb_counter.append(int(amb.sum()))
    return SimState(state.time + dt, state.measure.with_positions(Z), state.step_count + 1)


def catching_up_step(state: SimState, dt: float, domain: Domain, W: Potential, V: Potential,
                     _amb=None) -> SimState:
    """``x_i <- proj(x_i + dt v_i)`` with the velocity frozen at the start of the step."""
    X = state.measure.positions
    v = velocity_field(state.measure, W, V, state.time)
    return _advance(state, X + dt * v, dt, domain, _amb)


def projected_euler_step(state: SimState, dt: float, domain: Domain, W: Potential, V: Potential,
                         _amb=None) -> SimState:
    """``x_i <- proj(x_i + dt P_{x_i}(v_i))``."""
    X = state.measure.positions
    v = velocity_field(state.measure, W, V, state.time)
    pv = project_tangent_many(domain, X, v)
    return _advance(state, X + dt * pv, dt, domain, _amb)


_STEPPERS = {"catching_up": catching_up_step, "projected_euler": projected_euler_step}


def _record(state: SimState, domain, W, V) -> Record:
    mu = state.measure
    return Record(
        t=state.time,
        measure=mu,
        energy=energy(mu, W, V, state.time),
        dissipation=dissipation(mu, domain, W, V, state.time),
        dw_singleton=distance_to_singletons(mu)[0],
        support_radius=mu.support_radius(),
    )


def simulate(initial: ParticleMeasure, cfg: SchemeConfig, domain: Domain, W: Potential, V: Potential,
             check_step: bool = True, support_limit=None) -> Trajectory:
    """Integrate from ``initial`` to ``cfg.t_end`` recording every ``cfg.record_every`` steps.

    ``support_limit(t)``, when given, is asserted against the support radius
    at each record (used on unbounded domains).
    """
    initial.check_in(domain)
    if check_step and domain.prox_regular:
        if domain.bounded:
            lo, hi = domain.bounding_box()
            r0 = float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))
        else:
            r0 = initial.support_radius()
        dt_max = step_size_safety(domain, W, V, r0)
        if cfg.dt > dt_max * (1 + 1e-12):
            raise StepTooLarge(f"dt={cfg.dt} exceeds the safe step {dt_max}")
    step = _STEPPERS[cfg.scheme]
    state = SimState(0.0, initial, 0)
    traj = Trajectory()
    traj.records.append(_record(state, domain, W, V))
    amb: list[int] = []
    n_steps = cfg.n_steps
    with warnings.catch_warnings():
        if isinstance(domain, PacManSector):
            warnings.simplefilter("ignore")
        for k in range(1, n_steps + 1):
            state = step(state, cfg.dt, domain, W, V, amb)
            # time from the step count avoids accumulating rounding in t
            state = SimState(k * cfg.dt, state.measure, k)
            if k % cfg.record_every == 0 or k == n_steps:
                inside = domain.contains_many(state.measure.positions)
                if not np.all(inside):
                    raise FeasibilityBreach(f"particle left {domain.kind} at t={state.time}")
                rec = _record(state, domain, W, V)
                if support_limit is not None and rec.support_radius > support_limit(rec.t) * (1 + 1e-12):
                    raise FeasibilityBreach(
                        f"support radius {rec.support_radius} exceeds bound {support_limit(rec.t)} at t={rec.t}"
                    )
                traj.records.append(rec)
    traj.ambiguous_projections = int(sum(amb))
    if traj.ambiguous_projections:
        log.warning("%d ambiguous projections on %s", traj.ambiguous_projections, domain.kind)
    return traj


def support_radius_bound(r0: float, C: float, t: float) -> float:
    """``(r0 + 1) exp(C t)``."""
    if r0 < 0 or C < 0:
        raise ValueError("need r0 >= 0 and C >= 0")
    return (r0 + 1.0) * math.exp(C * t)


class TrajectoryDistance:
    """Exact ``d_W`` between paired snapshots, warm-starting each solve from the last basis.

    Masses are fixed along a trajectory, so the previous optimal basis stays
    feasible and usually needs only a few pivots.
    """

    def __init__(self):
        self._cells = None

    def __call__(self, mu: ParticleMeasure, nu: ParticleMeasure) -> float:
        C = squared_distances(mu.positions, nu.positions)
        if mu.n == 1 or nu.n == 1:
            return math.sqrt(float(mu.masses @ C @ nu.masses))
        G, u, v, cells = transport_simplex(mu.masses, nu.masses, C, basis_cells=self._cells)
        self._cells = cells
        return math.sqrt(max(float(np.sum(np.clip(G, 0.0, None) * C)), 0.0))


@dataclass
class StabilityReport:
    times: np.ndarray
    distances: np.ndarray
    envelope: np.ndarray
    kappa: float
    max_ratio: float
    violated: bool
    tolerance: float = 1e-2


def stability_experiment(mu1_0: ParticleMeasure, mu2_0: ParticleMeasure, cfg: SchemeConfig, domain: Domain,
                         W: Potential, V: Potential, kappa: float | None = None,
                         tolerance: float = 1e-2) -> StabilityReport:
    """Co-simulate two data and compare ``d_W`` with ``exp(kappa t) d_W(0)``."""
    kappa = contraction_exponent(W, V, domain) if kappa is None else kappa
    t1 = simulate(mu1_0, cfg, domain, W, V)
    t2 = simulate(mu2_0, cfg, domain, W, V)
    dist = TrajectoryDistance()
    times = t1.times
    d = np.array([dist(a.measure, b.measure) for a, b in zip(t1.records, t2.records)])
    env = np.exp(kappa * times) * d[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(env > 0, d / env, np.where(d > 0, np.inf, 0.0))
    max_ratio = float(np.max(ratio))
    return StabilityReport(times, d, env, kappa, max_ratio, max_ratio > 1.0 + tolerance, tolerance)
