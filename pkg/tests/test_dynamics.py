import math
import warnings

import numpy as np
import pytest

from proxflow.dynamics import (
    SchemeConfig,
    SimState,
    TrajectoryDistance,
    catching_up_step,
    projected_euler_step,
    simulate,
    stability_experiment,
    step_size_bound,
    step_size_safety,
    support_radius_bound,
)
from proxflow.errors import FeasibilityBreach, NonProxRegularWarning, StepTooLarge
from proxflow.geometry import Ball, DiskWithBite, HalfSpace, PacManSector, sharpness_sector
from proxflow.measures import ParticleMeasure, discretize_initial
from proxflow.potentials import linear_drift, quadratic, zero
from proxflow.transport import w2


def state(points, masses=None):
    X = np.atleast_2d(np.asarray(points, dtype=float))
    mu = ParticleMeasure.uniform(X) if masses is None else ParticleMeasure(X, masses)
    return SimState(0.0, mu)


# --- step size rule --------------------------------------------------------

@pytest.mark.parametrize(
    "eta, bound, expected",
    [(math.inf, 5.0, 0.1), (1.5, 2.0, 0.1), (0.05, 2.0, 0.0125), (1.0, 0.0, 0.1)],
)
def test_step_size_bound(eta, bound, expected):
    assert step_size_bound(eta, bound) == pytest.approx(expected)


def test_step_size_safety():
    assert step_size_safety(Ball(1.0), quadratic(), quadratic(), 1.0) == 0.1
    # support radius 3: |grad W| <= 6 on differences, so dt = eta / 12
    dom = sharpness_sector(0.1)
    assert step_size_safety(dom, quadratic(), zero(), 3.0) == pytest.approx(dom.eta / 12.0)
    with pytest.warns(NonProxRegularWarning):
        assert step_size_safety(PacManSector(), quadratic(), zero(), 1.0) == 0.01


def test_simulate_rejects_unsafe_step():
    mu = ParticleMeasure.uniform([[0.0, 0.95], [0.1, 0.95]])
    with pytest.raises(StepTooLarge):
        simulate(mu, SchemeConfig("catching_up", 0.5, 1.0), sharpness_sector(0.1), quadratic(), zero())


@pytest.mark.parametrize("field, value", [("scheme", "rk4"), ("dt", 0.0), ("t_end", -1.0), ("record_every", 0)])
def test_scheme_config_validation(field, value):
    kwargs = {"scheme": "catching_up", "dt": 0.01, "t_end": 1.0, "record_every": 1}
    kwargs[field] = value
    with pytest.raises(ValueError):
        SchemeConfig(**kwargs)


# --- single steps ----------------------------------------------------------

@pytest.mark.parametrize("step", [catching_up_step, projected_euler_step])
def test_interior_step_is_plain_euler(step):
    s = state([[0.1, 0.2], [-0.1, 0.0]])
    V = quadratic()
    out = step(s, 0.01, Ball(1.0), quadratic(), V)
    X = s.measure.positions
    v = -0.5 * ((X[:, None] - X[None]).sum(axis=1)) - X
    np.testing.assert_allclose(out.measure.positions, X + 0.01 * v, atol=1e-15)
    assert out.time == pytest.approx(0.01) and out.step_count == 1


def test_catching_up_pushes_back_on_boundary():
    out = catching_up_step(state([[1.0, 0.0]]), 0.1, Ball(1.0), zero(), linear_drift([-1.0, 0.0]))
    np.testing.assert_allclose(out.measure.positions, [[1.0, 0.0]], atol=1e-15)


def test_sharpness_pair_does_not_move():
    eps = 0.1
    r = 1 - eps
    s = state([[-r * math.cos(eps), -r * math.sin(eps)], [r * math.cos(eps), -r * math.sin(eps)]])
    for step in (catching_up_step, projected_euler_step):
        out = step(s, 0.01, sharpness_sector(eps), quadratic(), zero())
        np.testing.assert_allclose(out.measure.positions, s.measure.positions, atol=1e-12)


def test_projected_euler_slides_along_circle():
    dom = Ball(1.0)
    V = linear_drift([0.0, -1.0])
    mu = ParticleMeasure.uniform([[1.0, 0.0]])
    dt = 1e-3
    traj = simulate(mu, SchemeConfig("projected_euler", dt, 0.5, 500), dom, zero(), V)
    x = traj.final.measure.positions[0]
    assert abs(np.linalg.norm(x) - 1.0) <= 1e-12
    # speed along the circle is |P_x(0, 1)| = cos(theta); the arc length solves theta' = cos(theta)
    theta = 2 * math.atan(math.tanh(0.25))
    assert math.atan2(x[1], x[0]) == pytest.approx(theta, abs=2 * dt)


def test_inward_velocity_schemes_agree_to_second_order():
    dom = Ball(1.0)
    s = state([[1.0, 0.0], [0.0, 1.0]])
    V = linear_drift([0.3, 0.2])
    for dt in (1e-2, 1e-3):
        a = catching_up_step(s, dt, dom, zero(), V).measure.positions
        b = projected_euler_step(s, dt, dom, zero(), V).measure.positions
        assert np.max(np.abs(a - b)) <= 5 * dt**2


# --- trajectories ----------------------------------------------------------

def test_single_particle_relaxes_to_minimum():
    mu = ParticleMeasure.uniform([[0.6, 0.0]])
    traj = simulate(mu, SchemeConfig("catching_up", 1e-3, 3.0, 100), Ball(1.0), zero(), quadratic())
    assert traj.final.measure.positions[0, 0] == pytest.approx(0.6 * math.exp(-3.0), rel=5e-3)
    assert np.all(np.diff(traj.column("energy")) < 0)
    assert traj.times[-1] == pytest.approx(3.0)


def test_two_body_pair_distance_decays_at_unit_rate():
    mu = ParticleMeasure.uniform([[0.5, 0.0], [-0.5, 0.0]])
    traj = simulate(mu, SchemeConfig("catching_up", 1e-4, 2.0, 1000), Ball(1.0), quadratic(), zero())
    gaps = [np.linalg.norm(r.measure.positions[0] - r.measure.positions[1]) for r in traj.records]
    np.testing.assert_allclose(gaps, np.exp(-traj.times), rtol=2e-4)


def test_pacman_split_dirac_separates():
    dom = PacManSector()
    mu = ParticleMeasure.uniform([[0.0, 1e-6], [0.0, -1e-6]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        traj = simulate(mu, SchemeConfig("catching_up", 1e-2, 1.0, 10), dom, quadratic(), linear_drift([-2.0, 0.0]))
    X = traj.final.measure.positions
    assert np.linalg.norm(X[0] - X[1]) > 0.5
    # each particle follows a mouth edge
    np.testing.assert_allclose(np.abs(X[:, 1]), X[:, 0], atol=1e-12)


def test_trajectory_csv(tmp_path):
    mu = discretize_initial({"recipe": "random", "n": 5, "seed": 1}, Ball(1.0))
    traj = simulate(mu, SchemeConfig("catching_up", 0.01, 0.1, 2), Ball(1.0), quadratic(), zero())
    traj.write_csv(tmp_path / "t.csv", tmp_path / "snaps")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,energy,dissipation,dw_singleton,support_radius"
    assert len(lines) == len(traj.records) + 1
    assert len(list((tmp_path / "snaps").glob("measure_*.csv"))) == len(traj.records)


def test_simulation_is_deterministic():
    mu = discretize_initial({"recipe": "random", "n": 30, "seed": 4}, DiskWithBite())
    cfg = SchemeConfig("catching_up", 1e-3, 0.2, 50)
    a = simulate(mu, cfg, DiskWithBite(), quadratic(), zero()).final.measure.positions
    b = simulate(mu, cfg, DiskWithBite(), quadratic(), zero()).final.measure.positions
    assert a.tobytes() == b.tobytes()


def test_feasibility_on_nonconvex_domain():
    dom = DiskWithBite()
    mu = discretize_initial({"recipe": "random", "n": 60, "seed": 2}, dom)
    traj = simulate(mu, SchemeConfig("catching_up", 1e-2, 2.0, 1), dom, quadratic(), linear_drift([-1.0, 0.0]))
    for r in traj.records:
        assert np.all(dom.contains_many(r.measure.positions))


# --- support growth --------------------------------------------------------

@pytest.mark.parametrize("r0, C, t, expected", [(2.0, 3.0, 0.0, 3.0), (1.5, 0.0, 10.0, 2.5), (1.0, 1.0, math.log(2), 4.0)])
def test_support_radius_bound(r0, C, t, expected):
    assert support_radius_bound(r0, C, t) == pytest.approx(expected)


def test_support_limit_breach_is_reported():
    mu = ParticleMeasure.uniform([[-1.0, 0.0]])
    with pytest.raises(FeasibilityBreach):
        simulate(mu, SchemeConfig("catching_up", 1e-2, 1.0, 1), HalfSpace([1.0, 0.0]), zero(),
                 linear_drift([1.0, 0.0]), support_limit=lambda t: 1.0)


# --- consistency under refinement -----------------------------------------

def test_scheme_gap_halves_with_dt():
    dom = Ball(1.0)
    mu = discretize_initial({"recipe": "random", "n": 15, "seed": 8}, dom)
    V = linear_drift([-1.0, -0.5])
    gaps, finals = [], []
    for dt in (4e-3, 2e-3, 1e-3):
        a = simulate(mu, SchemeConfig("catching_up", dt, 1.0, 10**6), dom, quadratic(), V).final.measure
        b = simulate(mu, SchemeConfig("projected_euler", dt, 1.0, 10**6), dom, quadratic(), V).final.measure
        gaps.append(w2(a, b))
        finals.append(a)
    for g0, g1 in zip(gaps, gaps[1:]):
        assert 2 / 1.25 <= g0 / g1 <= 2 * 1.25
    steps = [w2(finals[i], finals[i + 1]) for i in range(2)]
    assert steps[1] < steps[0]


# --- stability experiment ---------------------------------------------------

def test_identical_data_have_zero_distance():
    dom = Ball(1.0)
    mu = discretize_initial({"recipe": "random", "n": 10, "seed": 1}, dom)
    rep = stability_experiment(mu, mu, SchemeConfig("catching_up", 1e-2, 0.5, 5), dom, quadratic(), zero())
    assert np.all(rep.distances == 0.0) and not rep.violated


def test_contraction_on_disk():
    dom = Ball(1.0)
    mu1 = discretize_initial({"recipe": "random", "n": 15, "seed": 1}, dom)
    mu2 = discretize_initial({"recipe": "random", "n": 15, "seed": 2}, dom)
    rep = stability_experiment(mu1, mu2, SchemeConfig("catching_up", 1e-3, 1.0, 50), dom, zero(), quadratic())
    assert rep.kappa == -1.0
    assert not rep.violated


def test_nonconvex_envelope_holds():
    dom = DiskWithBite()
    mu1 = discretize_initial({"recipe": "random", "n": 12, "seed": 1}, dom)
    mu2 = discretize_initial({"recipe": "random", "n": 12, "seed": 2}, dom)
    rep = stability_experiment(mu1, mu2, SchemeConfig("catching_up", 1e-3, 1.0, 50), dom, quadratic(), zero())
    assert rep.kappa > 0 and not rep.violated


def test_trajectory_distance_warm_start_matches_cold(rng):
    dom = Ball(1.0)
    dist = TrajectoryDistance()
    mu = ParticleMeasure.uniform(dom.sample_interior(rng, 20))
    nu = ParticleMeasure.uniform(dom.sample_interior(rng, 20))
    for _ in range(5):
        mu = mu.with_positions(mu.positions * 0.95)
        assert dist(mu, nu) == pytest.approx(w2(mu, nu), abs=1e-12)
