"""Fixed-seed property suites over every module."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import SchemeConfig, simulate
from ..geometry import Ball, Box, ConvexPolygon, DiskWithBite, HalfSpace, sharpness_sector
from ..geometry.checks import (
    ball_exclusion_sample,
    convex_monotonicity_sample,
    moreau_sample,
    prox_inequality_sample,
    slope_convexity_sample,
)
from ..measures import ParticleMeasure, discretize_initial
from ..potentials import linear_drift, quadratic, zero
from ..transport import w2, wasserstein2
from .oracles import assignment_by_permutations, random_rational_masses, shard_distance
from .scenarios import Check


@dataclass
class SuiteReport:
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, detail) -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c

    def lines(self) -> list[str]:
        tail = f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed in {self.seconds:.1f}s"
        return [c.line() for c in self.checks] + [tail]


def builtin_domains():
    """One instance of every prox-regular built-in kind."""
    return [
        DiskWithBite(),
        sharpness_sector(0.1),
        Ball(1.0),
        Ball(1.0, dim=3),
        Box([-1.0, -1.0], [1.0, 2.0]),
        ConvexPolygon([[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [1.0, 2.0], [-0.5, 1.0]]),
        HalfSpace([1.0, 0.0], 0.0),
    ]


def geometry_suite(report: SuiteReport, domains, rng, n_prox=10_000, n_cone=2_000) -> None:
    for dom in domains:
        for res in (
            prox_inequality_sample(dom, rng, n_prox),
            moreau_sample(dom, rng, n_cone),
            slope_convexity_sample(dom, rng, n_cone),
            ball_exclusion_sample(dom, rng, n_cone // 4),
        ):
            report.add("geometry", res.passed, str(res)[5:])
        if dom.convex:
            res = convex_monotonicity_sample(dom, rng, n_cone // 2)
            report.add("geometry", res.passed, str(res)[5:])


def transport_suite(report: SuiteReport, rng, instances=100, n=6, q=12, shard_instances=30) -> None:
    worst = 0.0
    for _ in range(instances):
        k = int(rng.integers(2, n + 1))
        X, Y = rng.normal(size=(2, k, 2))
        d2 = w2(ParticleMeasure.uniform(X), ParticleMeasure.uniform(Y)) ** 2
        worst = max(worst, abs(d2 - assignment_by_permutations(X, Y)))
    report.add("transport", worst <= 1e-10,
               f"simplex vs permutation enumeration on {instances} instances (n <= {n}): max gap {worst:.2e}")
    worst = marg = 0.0
    for _ in range(shard_instances):
        m1 = random_rational_masses(rng, int(rng.integers(2, 7)), q)
        m2 = random_rational_masses(rng, int(rng.integers(2, 7)), q)
        mu = ParticleMeasure(rng.normal(size=(len(m1), 2)), m1)
        nu = ParticleMeasure(rng.normal(size=(len(m2), 2)), m2)
        d, plan = wasserstein2(mu, nu)
        worst = max(worst, abs(d - shard_distance(mu, nu, q)))
        G = plan.dense()
        marg = max(marg, float(np.max(np.abs(G.sum(1) - m1))), float(np.max(np.abs(G.sum(0) - m2))))
    report.add("transport", worst <= 1e-10,
               f"simplex vs shard reduction on {shard_instances} instances (q = {q}): max gap {worst:.2e}")
    report.add("transport", marg <= 1e-9, f"plan marginals: max error {marg:.2e}")


def _bite_clusters(n):
    return discretize_initial({"recipe": "random", "n": n, "seed": 1, "radius": 0.15,
                               "centers": [[0.6, 0.7], [0.6, -0.7]]}, DiskWithBite())


def dynamics_suite(report: SuiteReport) -> None:
    dom, W, V = DiskWithBite(), quadratic(), zero()
    mu0 = _bite_clusters(40)
    dt = 1e-3
    E = simulate(mu0, SchemeConfig("catching_up", dt, 1.0, 1), dom, W, V).column("energy")
    rise = float(np.max(np.diff(E)))
    report.add("dynamics", rise <= W.lam * dt**2,
               f"energy monotonicity on DiskWithBite: largest step change {rise:.3e} (allowed {W.lam * dt**2:.1e})")

    cases = [
        ("Ball", Ball(1.0), linear_drift([-1.0, -0.5]), discretize_initial({"recipe": "random", "n": 20, "seed": 2},
                                                                           Ball(1.0))),
        ("DiskWithBite", dom, V, mu0),
    ]
    for name, d, pot_v, mu in cases:
        gaps, finals = [], []
        for h in (4e-3, 2e-3, 1e-3):
            a = simulate(mu, SchemeConfig("catching_up", h, 1.0, 10**6), d, W, pot_v).final.measure
            b = simulate(mu, SchemeConfig("projected_euler", h, 1.0, 10**6), d, W, pot_v).final.measure
            gaps.append(w2(a, b))
            finals.append(a)
        ratios = [gaps[i] / gaps[i + 1] for i in range(len(gaps) - 1)]
        ok = all(1.5 <= r <= 2.5 for r in ratios)
        report.add("dynamics", ok, f"scheme consistency on {name}: gap ratios under halving "
                                   + ", ".join(f"{r:.3f}" for r in ratios))
        steps = [w2(finals[i], finals[i + 1]) for i in range(len(finals) - 1)]
        report.add("dynamics", steps[1] < steps[0],
                   f"step refinement on {name}: successive differences " + ", ".join(f"{s:.2e}" for s in steps))


def verify_all(corrupt_eta: float | None = None, quick: bool = False, echo: bool = True) -> SuiteReport:
    """Run every suite; ``corrupt_eta`` scales the declared constant of DiskWithBite."""
    start = time.perf_counter()
    rng = np.random.default_rng(20240917)
    report = SuiteReport()
    domains = builtin_domains()
    if corrupt_eta is not None:
        domains[0] = DiskWithBite(eta_override=corrupt_eta * DiskWithBite().eta)
    n_prox, n_cone = (2_000, 500) if quick else (10_000, 2_000)
    geometry_suite(report, domains, rng, n_prox, n_cone)
    transport_suite(report, rng, instances=30 if quick else 100, shard_instances=10 if quick else 30)
    dynamics_suite(report)
    report.seconds = time.perf_counter() - start
    if echo:
        print("\n".join(report.lines()))
    return report
