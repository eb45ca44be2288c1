import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxflow.errors import AmbiguousProjectionWarning, PointOutsideDomain
from proxflow.geometry import (
    AnnulusSector,
    Ball,
    Box,
    Cone,
    ConvexPolygon,
    DiskWithBite,
    HalfSpace,
    PacManSector,
    contains,
    make_domain,
    moreau_decompose,
    normal_cone,
    product_projection_check,
    project_onto_cone,
    project_onto_domain,
    project_tangent,
    project_tangent_many,
    sharpness_sector,
)
from proxflow.geometry.checks import (
    ball_exclusion_sample,
    convex_monotonicity_sample,
    moreau_sample,
    prox_inequality_sample,
    slope_convexity_sample,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
vec2 = st.tuples(finite, finite).map(np.array)


def unit_disk():
    return Ball(1.0)


# --- containment -----------------------------------------------------------

@pytest.mark.parametrize(
    "domain, p, expected",
    [
        (unit_disk(), (0.0, 0.0), True),
        (unit_disk(), (2.0, 0.0), False),
        (unit_disk(), (1.0 + 5e-13, 0.0), True),
        (unit_disk(), (1.0 + 1e-9, 0.0), False),
        (sharpness_sector(0.1), (0.95 * math.cos(math.pi / 2), 0.95 * math.sin(math.pi / 2)), True),
        (sharpness_sector(0.1), (0.5, 0.0), False),
        (HalfSpace([1.0, 0.0]), (-3.0, 7.0), True),
        (HalfSpace([1.0, 0.0]), (0.1, 0.0), False),
        (DiskWithBite(), (-0.5, 0.0), True),
        (DiskWithBite(), (0.8, 0.0), False),
        (PacManSector(), (0.0, 0.0), True),
        (PacManSector(), (0.5, 0.0), False),
    ],
)
def test_contains(domain, p, expected):
    assert contains(domain, p) is expected


# --- projection ------------------------------------------------------------

@pytest.mark.parametrize(
    "domain, p, expected",
    [
        (unit_disk(), (2.0, 0.0), (1.0, 0.0)),
        (HalfSpace([1.0, 0.0]), (3.0, 5.0), (0.0, 5.0)),
        (Box([-1, -1], [1, 1]), (3.0, -4.0), (1.0, -1.0)),
        (Ball(2.0, center=[1.0, 1.0]), (1.0, 5.0), (1.0, 3.0)),
    ],
)
def test_project_simple(domain, p, expected):
    np.testing.assert_allclose(project_onto_domain(domain, p), expected, atol=1e-12)


@pytest.mark.parametrize("domain", [unit_disk(), DiskWithBite(), sharpness_sector(0.1), Box([0, 0], [1, 2])])
def test_projection_is_identity_inside(domain, rng):
    X = domain.sample_interior(rng, 200)
    Z, amb = domain.project_many(X)
    np.testing.assert_array_equal(Z, X)
    assert not amb.any()


def test_bite_projection_matches_dense_boundary_argmin():
    dom = DiskWithBite()
    # points just inside the removed bite disk, near its arc
    angles = np.linspace(math.pi - 0.5, math.pi + 0.5, 21)
    P = dom.c + (dom.rho - 0.05) * np.column_stack([np.cos(angles), np.sin(angles)])
    P = P[np.hypot(P[:, 0], P[:, 1]) < 1.0]
    B = np.concatenate([piece.point_at(np.linspace(0.0, 1.0, 200_001)) for piece in dom.pieces])
    for p in P:
        z = dom.project(p)
        assert abs(np.hypot(*(z - dom.c)) - dom.rho) < 1e-12  # lands on the bite arc
        best = np.min(np.linalg.norm(B - p, axis=1))
        assert np.linalg.norm(z - p) <= best + 1e-9


def test_projection_on_pacman_bisector_is_flagged():
    dom = PacManSector()
    with pytest.warns(AmbiguousProjectionWarning):
        Z, amb = dom.project_many(np.array([[0.3, 0.0]]))
    assert amb[0]
    # lexicographic choice between the two mirror images
    assert Z[0, 1] < 0


def test_projection_in_uniqueness_band_is_not_flagged(rng):
    dom = DiskWithBite()
    X = dom.sample_boundary(rng, 500)
    G, count = dom.normal_generators_many(X)
    P = X + 0.5 * dom.eta * G[:, 0] * (count[:, None] > 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        Z, amb = dom.project_many(P)
    assert not amb.any()
    assert np.all(dom.contains_many(Z))


def test_projection_is_idempotent(rng):
    for dom in (DiskWithBite(), sharpness_sector(0.1), Box([-1, -1], [1, 1]), ConvexPolygon([[0, 0], [1, 0], [0, 1]])):
        P = rng.uniform(-2, 2, size=(300, 2))
        Z, _ = dom.project_many(P, warn=False)
        Z2, _ = dom.project_many(Z, warn=False)
        np.testing.assert_array_equal(Z, Z2)


# --- normal cones ----------------------------------------------------------

def test_normal_cone_smooth_boundary_and_interior():
    np.testing.assert_allclose(normal_cone(unit_disk(), (1.0, 0.0)).generators, [[1.0, 0.0]])
    assert normal_cone(unit_disk(), (0.0, 0.0)).is_zero


def test_box_corner_cone_matches_definition(rng):
    dom = Box([-1, -1], [1, 1])
    x = np.array([1.0, 1.0])
    cone = normal_cone(dom, x)
    assert len(cone) == 2
    assert {tuple(g) for g in np.rint(cone.generators).astype(int)} == {(1, 0), (0, 1)}
    for _ in range(200):
        th = rng.uniform(0, math.pi / 2)
        v = np.array([math.cos(th), math.sin(th)])
        alpha = rng.uniform(0.01, 5.0)
        np.testing.assert_allclose(dom.project(x + alpha * v), x, atol=1e-12)


def test_normal_cone_outside_raises():
    with pytest.raises(PointOutsideDomain):
        normal_cone(unit_disk(), (3.0, 0.0))


def test_bite_corner_cone_has_two_generators():
    dom = DiskWithBite()
    for vx in dom.vertices:
        inward = -(vx.normals[0] + vx.normals[1])
        for x in (vx.point, vx.point + 1e-11 * inward / np.linalg.norm(inward)):
            assert len(normal_cone(dom, x)) == 2


def test_reflex_corner_has_trivial_cone():
    assert normal_cone(PacManSector(), (0.0, 0.0)).is_zero


# --- Moreau decomposition --------------------------------------------------

@pytest.mark.parametrize(
    "v, gens, vn, vt",
    [
        ((1.0, 1.0), [[1.0, 0.0]], (1.0, 0.0), (0.0, 1.0)),
        ((3.0, -2.0), np.zeros((0, 2)), (0.0, 0.0), (3.0, -2.0)),
        ((-1.0, -1.0), [[1.0, 0.0], [0.0, 1.0]], (0.0, 0.0), (-1.0, -1.0)),
        ((2.0, 3.0), [[1.0, 0.0], [0.0, 1.0]], (2.0, 3.0), (0.0, 0.0)),
        ((2.0, -3.0), [[1.0, 0.0], [0.0, 1.0]], (2.0, 0.0), (0.0, -3.0)),
    ],
)
def test_moreau_examples(v, gens, vn, vt):
    got_t, got_n = moreau_decompose(np.array(v), Cone(gens, 2))
    np.testing.assert_allclose(got_n, vn, atol=1e-15)
    np.testing.assert_allclose(got_t, vt, atol=1e-15)


def test_polar_case_is_optimal_on_grid():
    # v in the polar cone projects to 0; check against a brute-force grid over the cone
    cone = Cone([[1.0, 0.0], [0.0, 1.0]])
    v = np.array([-1.0, -1.0])
    a = np.linspace(0, 3, 301)
    A, B = np.meshgrid(a, a)
    dist = np.hypot(v[0] - A, v[1] - B)
    i = np.unravel_index(np.argmin(dist), dist.shape)
    assert A[i] == 0 and B[i] == 0
    np.testing.assert_allclose(project_onto_cone(v, cone), 0.0)


def test_three_generator_cone_in_3d_satisfies_kkt(rng):
    # p is the projection iff p = G^T c with c >= 0, <v - p, g> <= 0 for all g and <v - p, p> = 0
    for _ in range(500):
        G = rng.normal(size=(3, 3))
        G /= np.linalg.norm(G, axis=1)[:, None]
        v = rng.normal(size=3) * 3
        p = project_onto_cone(v, Cone(G))
        coef = np.linalg.solve(G.T, p)
        assert np.all(coef >= -1e-10)
        assert np.all(G @ (v - p) <= 1e-10)
        assert abs((v - p) @ p) <= 1e-10


@settings(max_examples=300, deadline=None)
@given(v=vec2, t0=st.floats(0, 2 * math.pi), span=st.floats(0.05, math.pi - 0.05))
def test_moreau_orthogonal_and_idempotent(v, t0, span):
    cone = Cone([[math.cos(t0), math.sin(t0)], [math.cos(t0 + span), math.sin(t0 + span)]])
    vt, vn = moreau_decompose(v, cone)
    scale = max(1.0, float(v @ v))
    assert abs(vt @ vn) <= 1e-10 * scale
    assert abs(v @ v - vt @ vt - vn @ vn) <= 1e-10 * scale
    np.testing.assert_allclose(vt + vn, v, atol=1e-12 * math.sqrt(scale))
    assert cone.in_polar(vt, tol=1e-9 * math.sqrt(scale))
    vt2, _ = moreau_decompose(vt, cone)
    np.testing.assert_allclose(vt2, vt, atol=1e-10 * math.sqrt(scale))


@settings(max_examples=200, deadline=None)
@given(v1=vec2, v2=vec2, th=st.floats(0, 1), t0=st.floats(0, 2 * math.pi), span=st.floats(0.05, 3.0))
def test_tangent_slope_is_convex(v1, v2, th, t0, span):
    cone = Cone([[math.cos(t0), math.sin(t0)], [math.cos(t0 + span), math.sin(t0 + span)]])

    def f(v):
        return float(np.sum(moreau_decompose(v, cone)[0] ** 2))

    lhs = f((1 - th) * v1 + th * v2)
    rhs = (1 - th) * f(v1) + th * f(v2)
    assert lhs <= rhs + 1e-10 * max(1.0, rhs)


# --- tangent projection ----------------------------------------------------

@pytest.mark.parametrize(
    "x, v, expected",
    [
        ((0.2, 0.3), (5.0, -1.0), (5.0, -1.0)),
        ((1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
        ((1.0, 0.0), (-1.0, 0.0), (-1.0, 0.0)),
    ],
)
def test_project_tangent_on_disk(x, v, expected):
    np.testing.assert_allclose(project_tangent(unit_disk(), x, v), expected, atol=1e-15)


@pytest.mark.parametrize("dom", [DiskWithBite(), sharpness_sector(0.1), Box([-1, -1], [1, 1]), unit_disk(),
                                 HalfSpace([0.6, 0.8], 0.5), ConvexPolygon([[0, 0], [2, 0], [1, 1]])])
def test_vectorised_tangent_projection_matches_pointwise(dom, rng):
    X = np.concatenate([dom.sample_boundary(rng, 300), dom.sample_interior(rng, 50)])
    if hasattr(dom, "vertices"):
        X = np.concatenate([X, [v.point for v in dom.vertices]])
    Vel = rng.normal(size=X.shape) * 2
    fast = project_tangent_many(dom, X, Vel)
    slow = np.array([project_tangent(dom, x, v) for x, v in zip(X, Vel)])
    np.testing.assert_allclose(fast, slow, atol=1e-12)
    assert np.all(np.linalg.norm(fast, axis=1) <= np.linalg.norm(Vel, axis=1) + 1e-12)


# --- product projection ----------------------------------------------------

def test_product_projection_single_point_is_plain_projection():
    dom = unit_disk()
    assert product_projection_check(dom, [[0.5, 0.0]], [[1.0, 0.0]])
    np.testing.assert_allclose(dom.project([1.5, 0.0]), [1.0, 0.0])


def test_product_projection_interior_points_identity():
    assert product_projection_check(unit_disk(), [[0.1, 0.0], [0.0, -0.2]], [[0.01, 0.0], [0.0, 0.01]])


def test_product_projection_radial_on_ball(rng):
    dom = unit_disk()
    pts = np.array([[1.0, 0.0], [0.0, 1.0]])
    disp = np.array([[0.3, 0.0], [0.1, 0.4]])
    assert product_projection_check(dom, pts, disp, rng=rng)
    Z, _ = dom.project_many(pts + disp)
    np.testing.assert_allclose(Z, (pts + disp) / np.linalg.norm(pts + disp, axis=1)[:, None])


def test_product_projection_on_bite(rng):
    dom = DiskWithBite()
    pts = dom.sample_boundary(rng, 5)
    assert product_projection_check(dom, pts, rng.normal(size=pts.shape) * 0.2, rng=rng)


# --- domain constants ------------------------------------------------------

@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
def test_sharpness_sector_constant(eps):
    dom = sharpness_sector(eps)
    assert dom.eta == pytest.approx((1 - eps) * math.cos(eps), rel=1e-14)
    assert dom.diameter == pytest.approx(2.0)


def test_bite_constants():
    dom = DiskWithBite()
    assert dom.eta == 1.5 and dom.diameter == pytest.approx(2.0)


def test_convex_kinds_have_infinite_eta():
    for dom in (unit_disk(), Box([0, 0], [1, 1]), HalfSpace([1, 0]), ConvexPolygon([[0, 0], [1, 0], [0, 1]])):
        assert dom.convex and math.isinf(dom.eta)
    assert not PacManSector().prox_regular


def test_make_domain_and_override():
    dom = make_domain("DiskWithBite", {"R": 1.0, "c": [2.0, 0.0], "rho": 1.5, "eta_override": 15.0})
    assert isinstance(dom, DiskWithBite) and dom.eta == 15.0
    assert isinstance(make_domain("AnnulusSector", {"r_in": 0.9, "r_out": 1.0, "theta_min": -0.1,
                                                    "theta_max": math.pi + 0.1}), AnnulusSector)
    with pytest.raises(ValueError):
        make_domain("Torus", {})


# --- sampled prox-regularity ----------------------------------------------

DOMAINS = [DiskWithBite(), sharpness_sector(0.1), unit_disk(), Ball(1.0, dim=3), Box([-1, -1], [1, 2]),
           ConvexPolygon([[0, 0], [2, 0], [2.5, 1], [1, 2], [-0.5, 1]]), HalfSpace([1.0, 0.0])]


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: f"{d.kind}{d.dim}")
def test_prox_inequality_holds_with_declared_eta(dom, rng):
    assert prox_inequality_sample(dom, rng, 10_000).passed


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: f"{d.kind}{d.dim}")
def test_ball_exclusion_and_cone_identities(dom, rng):
    assert ball_exclusion_sample(dom, rng, 300).passed
    assert moreau_sample(dom, rng, 1000).passed
    assert slope_convexity_sample(dom, rng, 1000).passed


@pytest.mark.parametrize("dom", [d for d in DOMAINS if d.convex], ids=lambda d: f"{d.kind}{d.dim}")
def test_convex_monotonicity(dom, rng):
    assert convex_monotonicity_sample(dom, rng, 500).passed


def test_overstated_eta_is_caught(rng):
    res = prox_inequality_sample(DiskWithBite(eta_override=15.0), rng, 10_000)
    assert not res.passed and res.worst > 0.1
    assert not ball_exclusion_sample(DiskWithBite(eta_override=15.0), rng, 300).passed


def test_sector_eta_is_tight(rng):
    # a 5% larger constant already fails near the inner corners
    dom = sharpness_sector(0.1)
    assert not ball_exclusion_sample(dom, rng, 2000, eta=1.05 * dom.eta).passed
