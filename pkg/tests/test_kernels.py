import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcmap import kernels
from strategies import disk_points


def _naive_eval(zeros, z, phase):
    m = (z[:, None] - zeros[None, :]) / (1 - np.conj(zeros)[None, :] * z[:, None])
    F = phase * m.prod(axis=1)
    dm = (1 - np.abs(zeros) ** 2)[None, :] / (1 - np.conj(zeros)[None, :] * z[:, None]) ** 2
    dF = np.zeros(z.size, dtype=complex)
    for k in range(zeros.size):
        others = np.delete(m, k, axis=1).prod(axis=1)
        dF += dm[:, k] * others
    return F, phase * dF


def _rand_disk(rng, n, r):
    return r * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def test_fallback_is_always_available():
    assert "python" in kernels.BACKENDS
    assert kernels.BACKEND in kernels.BACKENDS


def test_eval_against_naive(backend, rng):
    zeros = _rand_disk(rng, 9, 0.95)
    z = _rand_disk(rng, 300, 0.99)
    phase = np.exp(0.3j)
    F, dF, omf2 = kernels.blaschke_eval(zeros, z, phase=phase, backend=backend)
    nF, ndF = _naive_eval(zeros, z, phase)
    assert np.allclose(F, nF, atol=1e-14)
    assert np.allclose(dF, ndF, rtol=1e-10, atol=1e-13)
    assert np.allclose(omf2, 1 - np.abs(nF) ** 2, atol=1e-13)


def test_eval_on_a_zero(backend):
    zeros = np.array([0.5, 0.5, -0.3j])
    F, dF, omf2 = kernels.blaschke_eval(zeros, np.array([0.5 + 0j]), backend=backend)
    assert F[0] == 0 and dF[0] == 0 and omf2[0] == 1.0
    F, dF, _ = kernels.blaschke_eval(zeros[1:], np.array([0.5 + 0j]), backend=backend)
    assert abs(dF[0] - _naive_eval(zeros[1:], np.array([0.5 + 1e-300j]), 1.0)[1][0]) < 1e-12


def test_eval_boundary_gap(backend):
    # 1 - |F|^2 stays relatively accurate when the caller supplies the exact gap
    gap = np.array([1e-13])
    z = (1 - gap) * np.exp(0.4j)
    _, dF, omf2 = kernels.blaschke_eval(np.array([0.0]), z, gap=gap, backend=backend)
    assert omf2[0] == pytest.approx(gap[0] * (2 - gap[0]), rel=1e-12)


def test_eval_empty_input(backend):
    F, dF, omf2 = kernels.blaschke_eval(np.array([0.1]), np.array([], dtype=complex), backend=backend)
    assert F.size == dF.size == omf2.size == 0


@settings(max_examples=30)
@given(st.lists(disk_points(0.99), min_size=2, max_size=20))
def test_pairwise_min_omrho2(pts):
    w = np.array(pts, dtype=complex)
    om2 = 1 - np.abs(w) ** 2
    brute = min(
        om2[i] * om2[j] / abs(1 - np.conj(w[i]) * w[j]) ** 2 for i in range(w.size) for j in range(i + 1, w.size)
    )
    for b in kernels.BACKENDS:
        assert kernels.pairwise_min_omrho2(w, om2, backend=b) == pytest.approx(brute, rel=1e-12)


@settings(max_examples=30)
@given(st.lists(disk_points(0.99), min_size=2, max_size=20))
def test_pairwise_max_rho2(pts):
    w = np.array(pts, dtype=complex)
    brute = max(
        abs(w[i] - w[j]) ** 2 / abs(1 - np.conj(w[i]) * w[j]) ** 2 for i in range(w.size) for j in range(i + 1, w.size)
    )
    for b in kernels.BACKENDS:
        assert kernels.pairwise_max_rho2(w, backend=b) == pytest.approx(brute, rel=1e-12, abs=1e-300)


def test_pairwise_degenerate(backend):
    assert kernels.pairwise_min_omrho2([0.1], [0.99], backend=backend) == math.inf
    assert kernels.pairwise_max_rho2([0.1], backend=backend) == 0.0


def test_winding_circle(backend):
    t = 2 * np.pi * np.arange(400) / 400
    circle = 0.5 * np.exp(1j * t)
    q = np.array([0.0, 0.2 + 0.1j, 0.7, -0.9j])
    counts, dist = kernels.winding_numbers(circle, q, backend=backend)
    assert list(counts) == [1, 1, 0, 0]
    assert dist[0] == pytest.approx(0.5, rel=1e-4)
    assert dist[2] == pytest.approx(0.2, rel=1e-3)
    twice, _ = kernels.winding_numbers(np.concatenate([circle, circle]), q, backend=backend)
    assert list(twice) == [2, 2, 0, 0]
    back, _ = kernels.winding_numbers(circle[::-1], q, backend=backend)
    assert list(back) == [-1, -1, 0, 0]


def test_winding_argument_oracle(rng):
    # winding of F(circle) about q equals the number of preimages of q inside, by the argument principle
    zeros = _rand_disk(rng, 5, 0.6)
    t = 2 * np.pi * np.arange(4096) / 4096
    curve, _, _ = kernels.blaschke_eval(zeros, 0.8 * np.exp(1j * t))
    q = _rand_disk(rng, 50, 0.9)
    outs = [kernels.winding_numbers(curve, q, backend=b) for b in kernels.BACKENDS]
    for c, d in outs[1:]:
        assert np.array_equal(c, outs[0][0]) and np.allclose(d, outs[0][1], rtol=1e-12)
    dense = np.exp(1j * np.linspace(0, 2 * np.pi, 1 << 15, endpoint=False))
    for k in range(q.size):
        vals, _, _ = kernels.blaschke_eval(zeros, 0.8 * dense)
        phase = np.angle(np.roll(vals - q[k], -1) / (vals - q[k])).sum() / (2 * np.pi)
        assert outs[0][0][k] == round(phase)


def test_backends_agree_on_eval(rng):
    zeros = _rand_disk(rng, 30, 0.97)
    z = _rand_disk(rng, 2000, 0.9999)
    outs = [kernels.blaschke_eval(zeros, z, backend=b) for b in kernels.BACKENDS]
    for o in outs[1:]:
        for x, y in zip(outs[0], o):
            assert np.allclose(x, y, rtol=1e-12, atol=1e-15)
