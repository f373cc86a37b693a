import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcmap.blaschke import BlaschkeProduct, jensen_circle_terms
from bcmap.disk import Mobius
from bcmap.errors import DomainError, SingularInputError
from bcmap.families import random_product
from strategies import disk_points, products


def _mp_eval(F, z):
    mpmath.mp.dps = 40
    z = mpmath.mpc(z)
    out = mpmath.expjpi(mpmath.mpf(F.prefactor_angle) / mpmath.pi)
    for a in F.zeros:
        a = mpmath.mpc(a)
        out *= (z - a) / (1 - mpmath.conj(a) * z)
    return out


def _poly_critical_points(F):
    """Roots of P'Q - PQ' inside the disk for F = P/Q; independent of the pencil method."""
    P = np.poly(F.zeros)
    Q = np.array([1.0 + 0j])
    for a in F.zeros:
        Q = np.convolve(Q, [-np.conj(a), 1.0])
    num = np.polysub(np.polymul(np.polyder(P), Q), np.polymul(P, np.polyder(Q)))
    r = np.roots(num)
    return np.sort_complex(r[np.abs(r) < 1])


def test_evaluate_examples():
    assert BlaschkeProduct([0])(0.3 + 0.4j) == pytest.approx(0.3 + 0.4j)
    assert BlaschkeProduct([0, 0])(0.5) == pytest.approx(0.25)
    assert BlaschkeProduct([0.5])(0.0) == pytest.approx(-0.5)


def test_needs_a_zero_inside():
    with pytest.raises(ValueError):
        BlaschkeProduct([])
    with pytest.raises(DomainError):
        BlaschkeProduct([1.0])


@given(products(), disk_points(0.999))
def test_evaluate_matches_extended_precision(F, z):
    assert abs(F(z) - complex(_mp_eval(F, z))) <= 1e-13


@given(products(), disk_points(0.9999))
def test_one_minus_abs2_relative_accuracy(F, z):
    exact = 1 - abs(_mp_eval(F, z)) ** 2
    got = F.one_minus_abs2(z)
    assert got == pytest.approx(float(exact), rel=1e-9, abs=1e-300)


def test_one_minus_abs2_near_boundary():
    F = BlaschkeProduct([0.3, -0.2j, 0.5 + 0.5j])
    z = (1 - 1e-11) * complex(math.cos(0.7), math.sin(0.7))
    exact = float(1 - abs(_mp_eval(F, z)) ** 2)
    assert F.one_minus_abs2(z, gap=1e-11) == pytest.approx(exact, rel=1e-4)


def test_derivative_examples():
    assert BlaschkeProduct([0]).derivative(0.4j) == pytest.approx(1.0)
    assert BlaschkeProduct([0, 0]).derivative(0.5) == pytest.approx(1.0)
    F = BlaschkeProduct([0, 0.5])
    h = 1e-6
    fd = (F(h) - F(-h)) / (2 * h)
    assert abs(F.derivative(0.0) - fd) <= 1e-6 * abs(fd)


def _mp_derivative(F, z):
    # product rule with factor derivatives (1 - |a|^2) / (1 - conj(a) z)^2
    mpmath.mp.dps = 40
    z = mpmath.mpc(z)
    facs = [(z - mpmath.mpc(a)) / (1 - mpmath.conj(a) * z) for a in F.zeros]
    ders = [(1 - abs(mpmath.mpc(a)) ** 2) / (1 - mpmath.conj(a) * z) ** 2 for a in F.zeros]
    total = 0
    for k in range(len(facs)):
        term = ders[k]
        for j, f in enumerate(facs):
            if j != k:
                term *= f
        total += term
    return complex(total * mpmath.expjpi(mpmath.mpf(F.prefactor_angle) / mpmath.pi))


@given(products(), disk_points(0.99))
def test_derivative_against_mpmath(F, z):
    exact = _mp_derivative(F, z)
    assert abs(F.derivative(z) - exact) <= 1e-9 * max(1.0, abs(exact))


def test_derivative_at_a_zero_is_finite():
    F = BlaschkeProduct([0.5, 0.5, -0.3])
    assert F.derivative(0.5) == pytest.approx(0.0, abs=1e-14)
    G = BlaschkeProduct([0.5, -0.3])
    exact = _mp_derivative(G, 0.5)
    assert G.derivative(0.5) == pytest.approx(exact, rel=1e-12)


def test_hyperbolic_derivative_examples():
    assert BlaschkeProduct([0]).hyperbolic_derivative(0.77j) == pytest.approx(1.0, abs=1e-14)
    F = BlaschkeProduct([0, 0])
    assert F.hyperbolic_derivative(0.5) == pytest.approx(0.8)
    assert F.hyperbolic_derivative(0.0) == 0.0


@given(products(max_degree=12), disk_points(0.999))
def test_schwarz_pick(F, z):
    assert F.hyperbolic_derivative(z) <= 1 + 1e-12


def test_surrogate_examples():
    assert BlaschkeProduct([0, 0]).zero_sum_surrogate(0.0) == pytest.approx(2.0)
    assert BlaschkeProduct([0]).zero_sum_surrogate(0.5) == pytest.approx(0.75)


@given(disk_points(0.99), disk_points(0.999))
def test_surrogate_single_zero_is_exact(a, z):
    F = BlaschkeProduct([a])
    assert F.zero_sum_surrogate(z) == pytest.approx(F.one_minus_abs2(z), rel=1e-10)


@given(products(max_degree=12), disk_points(0.999))
def test_surrogate_comparability(F, z):
    if abs(F(z)) > 0.5:
        ratio = F.one_minus_abs2(z) / F.zero_sum_surrogate(z)
        assert 0.54 <= ratio <= 1.85


def test_log_derivative_sum_examples():
    assert abs(BlaschkeProduct([0]).log_derivative_sum(0.5)) == pytest.approx(1.5)
    assert abs(BlaschkeProduct([0, 0]).log_derivative_sum(0.5)) == pytest.approx(3.0)
    F = BlaschkeProduct([0.5])
    z = 0.9
    direct = (1 - z * z) * abs(F.derivative(z) / F(z))
    assert abs(F.log_derivative_sum(z)) == pytest.approx(direct, rel=1e-10)
    with pytest.raises(SingularInputError):
        F.log_derivative_sum(0.5)


@given(products(), disk_points(0.99))
def test_log_derivative_modulus(F, z):
    Fz = F(z)
    if min(np.abs(z - F.zeros)) > 1e-3:
        direct = (1 - abs(z) ** 2) * abs(F.derivative(z)) / abs(Fz)
        assert abs(F.log_derivative_sum(z)) == pytest.approx(direct, rel=1e-8)


def test_critical_point_examples():
    assert np.allclose(BlaschkeProduct([0, 0]).critical_points().points, [0])
    assert BlaschkeProduct([0]).critical_points().points.size == 0
    F = BlaschkeProduct([0.5, -0.5])
    crit = F.critical_points().points
    assert crit.size == 1
    # argument principle for F' on |z| = 0.999
    t = np.exp(2j * np.pi * np.arange(1 << 14) / (1 << 14)) * 0.999
    d = F.derivative(t)
    wind = np.angle(np.roll(d, -1) / d).sum() / (2 * np.pi)
    assert round(wind) == 1
    assert abs(crit[0]) < 1e-12


@settings(max_examples=40)
@given(products(max_degree=9, r_max=0.9))
def test_critical_points_match_polynomial_oracle(F):
    clusters, _ = F.zero_clusters()
    if clusters.size != F.degree:
        return
    ours = np.sort_complex(F.critical_points().points)
    oracle = _poly_critical_points(F)
    assert ours.size == F.degree - 1 == oracle.size
    for c in oracle:
        assert np.min(np.abs(ours - c)) < 1e-7


def test_critical_points_with_multiplicity():
    F = BlaschkeProduct([0.3, 0.3, 0.3, -0.4j])
    crit = F.critical_points().points
    assert crit.size == 3
    assert np.sum(np.abs(crit - 0.3) < 1e-12) == 2
    assert abs(F.derivative(complex(crit[np.argmax(np.abs(crit - 0.3))]))) < 1e-10


def test_critical_points_high_degree(rng):
    F = random_product(rng, 50)
    crit = F.critical_points().points
    assert crit.size == 49
    assert np.all(np.abs(crit) < 1)


@pytest.mark.parametrize("d", [1, 2, 5])
def test_boundary_phase_speed_power(d):
    F = BlaschkeProduct(np.zeros(d))
    th = np.linspace(0, 2 * np.pi, 17)
    assert np.allclose(F.boundary_phase_speed(th), d)


def test_boundary_phase_speed_single_zero():
    F = BlaschkeProduct([0.5])
    assert F.boundary_phase_speed(0.0) == pytest.approx(3.0)
    assert F.boundary_phase_speed(math.pi) == pytest.approx(1 / 3)


@given(products())
def test_boundary_phase_lift(F):
    th = np.linspace(0, 2 * np.pi, 2049)
    ph = F.boundary_phase(th)
    assert np.all(np.diff(ph) > 0)
    assert ph[-1] - ph[0] == pytest.approx(2 * np.pi * F.degree)
    vals = F.evaluate_all(0.9999999 * np.exp(1j * th[:5]))[0]
    assert np.allclose(np.exp(1j * ph[:5]), vals / np.abs(vals), atol=1e-5)


@given(products(max_degree=5), disk_points(0.8), st.floats(0, 2 * np.pi), disk_points(0.9))
def test_precompose(F, a, theta, z):
    m = Mobius(a, theta)
    G = F.precompose(m)
    assert abs(G(z) - F(m(z))) < 1e-9


@given(products(max_degree=5, r_max=0.8), disk_points(0.8), st.floats(0, 2 * np.pi), disk_points(0.9))
def test_postcompose(F, a, theta, z):
    tau = Mobius(a, theta)
    G = F.postcompose(tau)
    assert abs(G(z) - tau(F(z))) < 1e-8


def test_solve():
    F = BlaschkeProduct([0.2, -0.5j, 0.7])
    roots = F.solve(0.3 + 0.1j)
    assert roots.size == 3
    assert np.allclose(F.evaluate(roots), 0.3 + 0.1j, atol=1e-12)


def test_backends_agree(rng):
    from bcmap import kernels

    F = random_product(rng, 20)
    z = 0.999 * np.sqrt(rng.uniform(0, 1, 500)) * np.exp(2j * np.pi * rng.uniform(0, 1, 500))
    outs = [F.evaluate_all(z, backend=b) for b in kernels.BACKENDS]
    for o in outs[1:]:
        for x, y in zip(outs[0], o):
            assert np.allclose(x, y, rtol=1e-12, atol=1e-15)


def test_jensen_circle_mean_for_zero_free_derivative():
    F = BlaschkeProduct([0.5])
    assert jensen_circle_terms(F, 0.9) == pytest.approx(math.log(0.75), abs=1e-12)
