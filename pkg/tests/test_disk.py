import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bcmap.disk import (
    HyperbolicBall,
    Mobius,
    ball_boundary,
    ball_points,
    ball_to_euclidean,
    check_disk,
    geodesic_point,
    hyperbolic_ball_area,
    hyperbolic_distance,
    hyperbolic_polar_grid,
    mobius_apply,
    mobius_to_origin,
    normalize_angle,
    one_minus_rho2,
    pseudohyperbolic_distance,
)
from bcmap.errors import DomainError
from strategies import disk_points


def _mp_rho(z, w):
    import mpmath

    mpmath.mp.dps = 40
    z, w = mpmath.mpc(z), mpmath.mpc(w)
    return abs(z - w) / abs(1 - mpmath.conj(z) * w)


@pytest.mark.parametrize(
    "z,w,expected",
    [(0, 0.5, 0.5), (0.5, -0.5, 0.8), (0.3 + 0.2j, 0.3 + 0.2j, 0.0)],
)
def test_pseudohyperbolic_examples(z, w, expected):
    assert pseudohyperbolic_distance(z, w) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "z,w,expected",
    [(0, 0.5, math.log(3)), (0.5, -0.5, math.log(9)), (-0.7j, -0.7j, 0.0)],
)
def test_hyperbolic_examples(z, w, expected):
    assert hyperbolic_distance(z, w) == pytest.approx(expected, abs=1e-14)


def test_distance_near_boundary_uses_accurate_complement():
    # two points 1e-10 from the circle, a tiny angle apart
    r = 1 - 1e-10
    z, w = r, r * complex(math.cos(1e-9), math.sin(1e-9))
    import mpmath

    mpmath.mp.dps = 50
    rho = _mp_rho(z, w)
    exact = float(mpmath.log((1 + rho) / (1 - rho)))
    assert hyperbolic_distance(z, w) == pytest.approx(exact, rel=1e-6)


@given(disk_points(), disk_points())
def test_one_minus_rho2_identity(z, w):
    rho = pseudohyperbolic_distance(z, w)
    assert abs(1 - rho**2 - one_minus_rho2(z, w)) <= 1e-12


@given(disk_points(), disk_points(), disk_points())
def test_triangle_inequality(a, b, c):
    assert hyperbolic_distance(a, c) <= hyperbolic_distance(a, b) + hyperbolic_distance(b, c) + 1e-9


@given(disk_points(0.9), disk_points(0.9), disk_points(0.9), st.floats(0, 2 * math.pi))
def test_mobius_is_isometry(a, z, w, theta):
    m = Mobius(a, theta)
    assert hyperbolic_distance(m(z), m(w)) == pytest.approx(hyperbolic_distance(z, w), rel=1e-8, abs=1e-10)


@given(disk_points(0.95), disk_points(0.95), st.floats(0, 2 * math.pi))
def test_mobius_inverse(a, z, theta):
    m = Mobius(a, theta)
    assert abs(m.inverse()(m(z)) - z) < 1e-10


def test_mobius_examples():
    assert mobius_apply(Mobius(0.5, 0.0), 0.5) == 0
    assert mobius_apply(Mobius(0.0, math.pi), 0.3) == pytest.approx(-0.3)
    assert mobius_apply(mobius_to_origin(0.5), 0.0) == pytest.approx(-0.5)


def test_domain_checks():
    with pytest.raises(DomainError):
        check_disk(1.0)
    with pytest.raises(DomainError):
        check_disk(1 - 1e-13)
    with pytest.raises(DomainError):
        check_disk(complex("nan"))
    check_disk(1 - 2e-12)


def test_ball_to_euclidean_at_origin():
    c, r = ball_to_euclidean(HyperbolicBall(0, 1))
    assert c == 0 and r == pytest.approx(math.tanh(0.5))
    c, r = ball_to_euclidean(HyperbolicBall(0, 2))
    assert r == pytest.approx(math.tanh(1.0))


def test_ball_to_euclidean_membership_oracle(rng):
    b = HyperbolicBall(0.5, 1.0)
    c, r = ball_to_euclidean(b)
    pts = 0.999 * np.sqrt(rng.uniform(0, 1, 10_000)) * np.exp(2j * np.pi * rng.uniform(0, 1, 10_000))
    by_dh = hyperbolic_distance(0.5, pts) < 1.0
    by_euclid = np.abs(pts - c) < r
    # disagreements can only come from points on the boundary circle itself
    margin = np.abs(np.abs(pts - c) - r)
    assert np.all((by_dh == by_euclid) | (margin < 1e-12))


@given(disk_points(0.99), st.floats(0.05, 4.0))
def test_ball_boundary_is_at_radius(z, R):
    w, om2 = ball_boundary(z, R, 16)
    assert np.allclose(hyperbolic_distance(z, w), R, rtol=1e-7)
    assert np.allclose(om2, 1 - np.abs(w) ** 2, atol=1e-12)


def test_ball_points_preserve_distance():
    zeta = np.array([0.1, 0.5j, -0.3 - 0.3j])
    w, _ = ball_points(0.6 + 0.2j, zeta)
    assert np.allclose(hyperbolic_distance(0.6 + 0.2j, w), hyperbolic_distance(0, zeta))


def test_hyperbolic_ball_area():
    assert hyperbolic_ball_area(1.0) == pytest.approx(3.41228, abs=1e-5)


def test_geodesic_examples():
    t = np.array([0.0, 0.5, 1.0, 3.0])
    assert np.allclose(geodesic_point(0, 0.0, t), np.tanh(t / 2))
    assert geodesic_point(0, 0.0, math.log(3)) == pytest.approx(0.5)
    assert geodesic_point(0.2 + 0.1j, 1.0, 0.0) == 0.2 + 0.1j


@given(disk_points(0.9), st.floats(0, 2 * math.pi), st.floats(0, 10), st.floats(0, 10))
def test_geodesic_is_unit_speed(z, xi, t1, t2):
    p1, p2 = geodesic_point(z, xi, t1), geodesic_point(z, xi, t2)
    assert hyperbolic_distance(p1, p2) == pytest.approx(abs(t1 - t2), abs=1e-6 * (1 + max(t1, t2)))


def test_geodesic_heads_to_endpoint():
    w = geodesic_point(0.3 - 0.4j, 2.0, 30.0)
    assert abs(w - complex(math.cos(2.0), math.sin(2.0))) < 1e-9


def test_normalize_angle():
    assert 0.0 <= normalize_angle(-1e-20) < 2 * math.pi
    assert np.all((normalize_angle(np.array([-7.0, 0.0, 7.0])) >= 0))
    assert normalize_angle(2 * math.pi) == 0.0


def test_polar_grid_mesh():
    pts = hyperbolic_polar_grid(0.9, 0.25)
    assert np.max(np.abs(pts)) <= 0.9 + 1e-15
    assert pts[0] == 0
