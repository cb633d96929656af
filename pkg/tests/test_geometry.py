import numpy as np
import pytest

from ufinsler.errors import ZeroDirection
from ufinsler.geometry import (
    PointDirection, apply_J, cinner, complexify, j_matrix, point_from_ts, random_unitary, realify,
    realify_matrix, s_alpha, s_derivative_suite, scalar_invariants,
)
from ufinsler.sampling import random_pair

RNG_SEED = 2024


def _rand(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.mark.parametrize("z, v, expected", [
    ([1, 0], [0, 1], (1, 1, 0)),
    ([1, 0], [2, 0], (4, 1, 1)),
    ([1, 1], [2, 0], (4, 2, 1)),
])
def test_scalar_invariants(z, v, expected):
    assert scalar_invariants(np.array(z, complex), np.array(v, complex)) == pytest.approx(expected)


def test_zero_direction():
    with pytest.raises(ZeroDirection):
        scalar_invariants(np.ones(2), np.zeros(2))


def test_inner_product_is_linear_in_first_slot():
    z, v = np.array([1j, 0]), np.array([1, 0])
    assert cinner(z, v) == 1j
    assert cinner(2j * z, v) == 2j * cinner(z, v)


def test_realify_layout():
    assert list(realify(np.array([1 + 2j]))) == [1, 2]
    x, u = realify(np.array([1 + 2j, 3 - 1j]), np.array([0.5j, -2]))
    assert list(x) == [1, 3, 2, -1] and list(u) == [0, -2, 0.5, 0]


def test_round_trip():
    rng = np.random.default_rng(RNG_SEED)
    z, v = _rand(rng, 3), _rand(rng, 3)
    z2, v2 = complexify(*realify(z, v))
    assert np.max(np.abs(z2 - z)) < 1e-15 and np.max(np.abs(v2 - v)) < 1e-15


def test_real_and_complex_pairings_agree():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        z, v = _rand(rng, n), _rand(rng, n)
        x, u = realify(z, v)
        zv = cinner(z, v)
        assert zv == pytest.approx(x @ u - 1j * (x @ apply_J(u)), abs=1e-13)
        assert abs(zv) ** 2 == pytest.approx((x @ u) ** 2 + (apply_J(x) @ u) ** 2, rel=1e-13)


def test_J_structure():
    assert list(apply_J(np.array([1.0, 0.0]))) == [0, -1]
    rng = np.random.default_rng(RNG_SEED)
    w = rng.standard_normal(6)
    assert np.allclose(apply_J(apply_J(w)), -w, atol=0)
    assert abs(w @ apply_J(w)) < 1e-15
    assert np.array_equal(j_matrix(3) @ w, apply_J(w))
    # J realifies multiplication by -i
    z = _rand(rng, 3)
    assert np.allclose(apply_J(realify(z)), realify(-1j * z))


def test_realify_matrix():
    rng = np.random.default_rng(RNG_SEED)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    z = _rand(rng, 3)
    assert np.allclose(realify_matrix(A) @ realify(z), realify(A @ z))


def test_invariants_homogeneity_and_range():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        z, v = _rand(rng, 3), _rand(rng, 3)
        zeta = complex(*rng.standard_normal(2))
        r, t, s = scalar_invariants(z, v)
        r2, t2, s2 = scalar_invariants(z, zeta * v)
        assert 0 <= s <= t
        assert r2 == pytest.approx(abs(zeta) ** 2 * r, rel=1e-13)
        assert (t2, s2) == pytest.approx((t, s), rel=1e-12)
    z = _rand(rng, 3)
    r, t, s = scalar_invariants(z, (0.3 - 2j) * z)
    assert s == pytest.approx(t, rel=1e-14)


def test_point_from_ts_witness():
    p = point_from_ts(0.8, 0.3, 3)
    assert (p.t, p.s, p.r) == pytest.approx((0.8, 0.3, 1.0), rel=1e-14)
    assert point_from_ts(0.0, 0.0, 2).t == 0.0
    with pytest.raises(ValueError):
        point_from_ts(0.5, 0.7)


def test_unitaries():
    for seed in range(20):
        A = random_unitary(4, seed=seed)
        assert np.max(np.abs(A @ A.conj().T - np.eye(4))) < 1e-12
    assert abs(abs(random_unitary(1, seed=3)[0, 0]) - 1) < 1e-15
    rng = np.random.default_rng(RNG_SEED)
    z, v = _rand(rng, 4), _rand(rng, 4)
    A = random_unitary(4, seed=99)
    assert scalar_invariants(A @ z, A @ v) == pytest.approx(scalar_invariants(z, v), rel=1e-12)


def test_s_alpha_against_wirtinger_differences():
    rng = np.random.default_rng(RNG_SEED)
    h = 1e-6
    for _ in range(20):
        p = PointDirection.from_complex(_rand(rng, 2), _rand(rng, 2))
        fd = np.zeros(2, complex)
        for a in range(2):
            e = np.zeros(2, complex)
            e[a] = h
            d_re = (scalar_invariants(p.z, p.v + e)[2] - scalar_invariants(p.z, p.v - e)[2]) / (2 * h)
            d_im = (scalar_invariants(p.z, p.v + 1j * e)[2] - scalar_invariants(p.z, p.v - 1j * e)[2]) / (2 * h)
            fd[a] = 0.5 * (d_re - 1j * d_im)
        assert np.max(np.abs(s_alpha(p) - fd)) < 1e-6
        assert abs(np.sum(s_alpha(p) * p.v)) < 1e-13


def test_s_alpha_vanishes_for_orthogonal_pair():
    p = PointDirection.from_complex(np.array([1, 0], complex), np.array([0, 1j]))
    assert np.all(s_alpha(p) == 0)


def _s_of(x, u):
    return PointDirection.from_real(x, u).s


def test_s_derivatives_against_finite_differences():
    rng = np.random.default_rng(RNG_SEED)
    h = 1e-5
    for _ in range(10):
        z, v = random_pair(rng, 3, 2.0)
        p = PointDirection.from_complex(z, v)
        d = s_derivative_suite(p)
        m = 6
        E = np.eye(m) * h
        s_i = np.array([(_s_of(p.x, p.u + E[i]) - _s_of(p.x, p.u - E[i])) / (2 * h) for i in range(m)])
        s_semi = np.array([(_s_of(p.x + E[i], p.u) - _s_of(p.x - E[i], p.u)) / (2 * h) for i in range(m)])
        assert np.max(np.abs(d.s_i - s_i)) < 1e-8
        assert np.max(np.abs(d.s_semicolon_i - s_semi)) < 1e-8
        assert np.allclose(d.t_semicolon_i, 2 * p.x)

        def grad_u(x, u):
            return s_derivative_suite(PointDirection.from_real(x, u)).s_i

        s_ij = np.array([(grad_u(p.x, p.u + E[j]) - grad_u(p.x, p.u - E[j])) / (2 * h) for j in range(m)]).T
        s_i_j = np.array([(grad_u(p.x + E[j], p.u) - grad_u(p.x - E[j], p.u)) / (2 * h) for j in range(m)]).T
        assert np.max(np.abs(d.s_ij - s_ij)) < 1e-7
        assert np.max(np.abs(d.s_i_semicolon_j - s_i_j)) < 1e-7
