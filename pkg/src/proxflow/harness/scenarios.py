"""Experiment runners: each executes a scenario, writes CSVs and returns its checks."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dynamics import (
    SchemeConfig,
    SimState,
    TrajectoryDistance,
    catching_up_step,
    projected_euler_step,
    simulate,
    stability_experiment,
    support_radius_bound,
)
from ..errors import ConfigError, FeasibilityBreach, ProxFlowError, ScenarioError
from ..geometry import sharpness_sector
from ..measures import ParticleMeasure, discretize_initial
from ..potentials import (
    aggregation_exponent,
    evi_constant,
    singleton_exponent,
    support_growth_constant,
)
from ..transport import evi_residual, fit_decay_rate, w2
from .config import ScenarioConfig

OUTPUT_ENV = "PROXFLOW_OUTPUT"


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class ScenarioReport:
    scenario: str
    kind: str
    checks: list = field(default_factory=list)
    output_dir: Path | None = None

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str) -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c

    def lines(self) -> list[str]:
        head = f"[{self.kind}] {self.scenario}"
        return [head] + ["  " + c.line() for c in self.checks]


def initial_measure(cfg: ScenarioConfig, second: bool = False, offset: int = 0) -> ParticleMeasure:
    """Quantise ``[initial]`` (or ``[initial.2]``) with a seed derived from the scenario seed."""
    block = dict(cfg.initial2 if second else cfg.initial)
    if "seed" in block:
        raise ConfigError([("initial.seed" if not second else "initial.2.seed",
                            "set experiment.seed instead so --seed controls every draw")])
    block["seed"] = cfg.seed + offset + (7919 if second else 0)
    return discretize_initial(block, cfg.domain)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def energy_identity_residual(traj) -> tuple[float, float]:
    """``(|dE + int diss|, |dE|)`` with the dissipation integrated by the trapezoid rule."""
    t = traj.times
    E = traj.column("energy")
    D = traj.column("dissipation")
    dE = E[-1] - E[0]
    integral = float(np.sum(0.5 * (D[1:] + D[:-1]) * np.diff(t)))
    return abs(dE + integral), abs(dE)


def _halved(cfg: SchemeConfig) -> SchemeConfig:
    return SchemeConfig(cfg.scheme, cfg.dt / 2, cfg.t_end, cfg.record_every * 2)


def run_simulate(cfg: ScenarioConfig, report: ScenarioReport, out: Path) -> None:
    mu0 = initial_measure(cfg)
    limit = None
    if cfg.check.get("support_bound", False):
        r0 = mu0.support_radius()
        C = support_growth_constant(cfg.W, cfg.V)
        limit = lambda t: support_radius_bound(r0, C, t)  # noqa: E731
    try:
        traj = simulate(mu0, cfg.scheme, cfg.domain, cfg.W, cfg.V, support_limit=limit)
    except FeasibilityBreach as exc:
        report.add("feasibility", False, str(exc))
        return
    snapshots = out / "snapshots" if cfg.experiment.get("snapshots", False) else None
    traj.write_csv(out / "trajectory.csv", snapshots)
    report.add("feasibility", True, f"{mu0.n} particles stayed in {cfg.domain.kind} up to t={traj.final.t:g}")
    if limit is not None:
        r = traj.column("support_radius")
        ratio = float(np.max(r / np.array([limit(t) for t in traj.times])))
        report.add("support growth", ratio <= 1.0,
                   f"max radius / (r0+1)exp(Ct) = {ratio:.4f} with C = {support_growth_constant(cfg.W, cfg.V):g}")
    if "energy_step_tol" in cfg.check:
        rise = float(np.max(np.diff(traj.column("energy")), initial=0.0))
        tol = float(cfg.check["energy_step_tol"])
        report.add("energy monotonicity", rise <= tol, f"largest energy increase {rise:.3e} (tol {tol:g})")
    if "energy_rel_tol" in cfg.check:
        res, dE = energy_identity_residual(traj)
        tol = float(cfg.check["energy_rel_tol"])
        report.add("energy identity", res <= tol * dE,
                   f"|dE + int diss| = {res:.3e} vs {tol:g}*|dE| = {tol * dE:.3e}")
        if "refine_factor" in cfg.check:
            fine = simulate(mu0, _halved(cfg.scheme), cfg.domain, cfg.W, cfg.V)
            res2, _ = energy_identity_residual(fine)
            factor = res / res2 if res2 > 0 else math.inf
            need = float(cfg.check["refine_factor"])
            report.add("energy identity refinement", factor >= need,
                       f"residual {res:.3e} -> {res2:.3e} at dt/2, shrink {factor:.2f}x (need {need:g}x)")


def run_stability(cfg: ScenarioConfig, report: ScenarioReport, out: Path) -> None:
    pairs = int(cfg.experiment.get("pairs", 1))
    slack = float(cfg.check.get("slack", 1.01))
    kappa = cfg.check.get("kappa")
    worst, rates, kap = 0.0, [], None
    for k in range(pairs):
        mu1 = initial_measure(cfg, offset=k)
        mu2 = initial_measure(cfg, second=True, offset=k)
        rep = stability_experiment(mu1, mu2, cfg.scheme, cfg.domain, cfg.W, cfg.V, kappa=kappa,
                                   tolerance=slack - 1.0)
        kap = rep.kappa
        worst = max(worst, rep.max_ratio)
        _write_rows(out / f"pair_{k:03d}.csv", ["t", "distance", "envelope"],
                    zip(rep.times, rep.distances, rep.envelope))
        if "rate_max" in cfg.check and np.all(rep.distances > 0):
            rates.append(fit_decay_rate(np.column_stack([rep.times, rep.distances])))
    report.add("contraction envelope", worst <= slack,
               f"max d/(exp(kappa t) d0) = {worst:.4f} over {pairs} pair(s), kappa = {kap:.4f}, slack {slack:g}")
    if "rate_max" in cfg.check:
        need = float(cfg.check["rate_max"])
        top = max(rates) if rates else math.inf
        report.add("fitted contraction rate", len(rates) == pairs and top <= need,
                   f"largest fitted rate {top:.4f} (need <= {need:g})")


def run_aggregate(cfg: ScenarioConfig, report: ScenarioReport, out: Path) -> None:
    mu0 = initial_measure(cfg)
    traj = simulate(mu0, cfg.scheme, cfg.domain, cfg.W, cfg.V)
    traj.write_csv(out / "trajectory.csv")
    t = traj.times
    d = traj.column("dw_singleton")
    slack = float(cfg.check.get("slack", 1.01))
    C = aggregation_exponent(cfg.W, cfg.domain)
    ratio = float(np.max(d / (d[0] * np.exp(C * t))))
    report.add("aggregation envelope", ratio <= slack,
               f"max d(t,Xi)/(d0 exp(C t)) = {ratio:.4f} with C = {C:.4f}, slack {slack:g}")
    C1 = singleton_exponent(cfg.W, cfg.domain)
    ratio1 = float(np.max(d / (d[0] * np.exp(C1 * t))))
    report.add("singleton envelope", ratio1 <= slack,
               f"max d(t,Xi)/(d0 exp(C' t)) = {ratio1:.4f} with C' = {C1:.4f}")
    rate = fit_decay_rate(np.column_stack([t, d]))
    need = float(cfg.check.get("rate_max", C + 0.05))
    report.add("fitted aggregation rate", rate <= need, f"fitted rate {rate:.4f} (need <= {need:.4f})")


def sharpness_initial(eps: float) -> ParticleMeasure:
    """Two equal masses at the inner corners of the thin half-annulus."""
    r = 1.0 - eps
    return ParticleMeasure.uniform([[r * math.cos(-eps), r * math.sin(-eps)],
                                    [r * math.cos(math.pi + eps), r * math.sin(math.pi + eps)]])


def run_sharpness(cfg: ScenarioConfig, report: ScenarioReport, out: Path) -> None:
    eps = float(cfg.experiment.get("eps", 0.1))
    if cfg.domain is None:
        cfg.domain = sharpness_sector(eps)
    mu0 = initial_measure(cfg) if cfg.initial else sharpness_initial(eps)
    traj = simulate(mu0, cfg.scheme, cfg.domain, cfg.W, cfg.V)
    traj.write_csv(out / "trajectory.csv")
    disp = max(float(np.max(np.linalg.norm(r.measure.positions - mu0.positions, axis=1)))
               for r in traj.records)
    diss = float(np.max(traj.column("dissipation")))
    drop = max(float(np.max(-np.diff(traj.column("dw_singleton")), initial=0.0)), 0.0) + 0.0
    dtol = float(cfg.check.get("displacement_tol", 1e-6))
    stol = float(cfg.check.get("dissipation_tol", 1e-10))
    report.add("stationary pair", disp < dtol, f"max displacement {disp:.3e} (need < {dtol:g})")
    report.add("zero dissipation", diss < stol, f"max dissipation {diss:.3e} (need < {stol:g})")
    report.add("no aggregation", drop <= 1e-12,
               f"d(mu(t),Xi) stays at {traj.final.dw_singleton:.6f}, largest drop {drop:.3e}")


def run_instability(cfg: ScenarioConfig, report: ScenarioReport, out: Path) -> None:
    mu1 = initial_measure(cfg)
    mu2 = initial_measure(cfg, second=True)
    t1 = simulate(mu1, cfg.scheme, cfg.domain, cfg.W, cfg.V)
    t2 = simulate(mu2, cfg.scheme, cfg.domain, cfg.W, cfg.V)
    dist = TrajectoryDistance()
    d = np.array([dist(a.measure, b.measure) for a, b in zip(t1.records, t2.records)])
    _write_rows(out / "distance.csv", ["t", "distance"], zip(t1.times, d))
    t_check = float(cfg.experiment.get("t_check", cfg.scheme.t_end))
    k = int(np.argmin(np.abs(t1.times - t_check)))
    need = float(cfg.check.get("min_separation", 0.5))
    report.add("trajectories separate", d[k] >= need,
               f"distance {d[0]:.3e} at t=0 grows to {d[k]:.4f} at t={t1.times[k]:g} (need >= {need:g})")


def run_evi(cfg: ScenarioConfig, report: ScenarioReport, out: Path) -> None:
    mu0 = initial_measure(cfg)
    traj = simulate(mu0, cfg.scheme, cfg.domain, cfg.W, cfg.V)
    mu_t, t = traj.final.measure, traj.final.t
    h = float(cfg.experiment.get("h", 1e-4))
    step = catching_up_step if cfg.scheme.scheme == "catching_up" else projected_euler_step
    mu_th = step(SimState(t, mu_t), h, cfg.domain, cfg.W, cfg.V).measure
    kappa = float(cfg.check.get("kappa_evi", evi_constant(cfg.W, cfg.V, cfg.domain)))
    n_refs = int(cfg.experiment.get("n_refs", 20))
    n_ref = int(cfg.experiment.get("n_ref", 20))
    rng = np.random.default_rng(cfg.seed + 104729)
    rows = []
    for k in range(n_refs):
        X = cfg.domain.sample_interior(rng, n_ref)
        nu = ParticleMeasure(X, rng.dirichlet(np.ones(n_ref)))
        res = evi_residual(mu_t, mu_th, h, nu, kappa, cfg.W, cfg.V, t)
        rows.append((k, res, w2(mu_t, nu)))
    _write_rows(out / "evi.csv", ["reference", "residual", "distance"], rows)
    worst = max(r[1] for r in rows)
    tol = float(cfg.check.get("residual_tol", 1e-2))
    report.add("EVI residual", worst <= tol,
               f"max residual {worst:.3e} over {n_refs} references at t={t:g}, h={h:g}, kappa={kappa:.4f} "
               f"(need <= {tol:g})")


RUNNERS = {
    "simulate": run_simulate,
    "stability": run_stability,
    "aggregate": run_aggregate,
    "sharpness": run_sharpness,
    "instability": run_instability,
    "evi_check": run_evi,
}


def run_scenario(cfg: ScenarioConfig, root: Path | None = None, echo: bool = True) -> ScenarioReport:
    """Run ``cfg`` and print one PASS/FAIL line per asserted envelope."""
    root = output_root() if root is None else Path(root)
    out = root / cfg.output
    out.mkdir(parents=True, exist_ok=True)
    name = Path(cfg.source).stem if cfg.source else cfg.output
    report = ScenarioReport(name, cfg.kind, output_dir=out)
    try:
        RUNNERS[cfg.kind](cfg, report, out)
    except ConfigError:
        raise
    except ProxFlowError as exc:
        raise ScenarioError(f"scenario {name!r} ({cfg.kind}): {type(exc).__name__}: {exc}") from exc
    (out / "report.txt").write_text("\n".join(report.lines()) + "\n", encoding="utf-8")
    if echo:
        print("\n".join(report.lines()))
    return report
