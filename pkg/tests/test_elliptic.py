import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from planar_elastica.elliptic import (
    DomainError,
    complete_E,
    complete_K,
    compute_constants,
    constants,
    find_m_star,
    incomplete_E,
    incomplete_F,
    jacobi_am,
    jacobi_sn_cn_dn,
)

# the oracle asks quad for near machine-precision accuracy and it says so
pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")


def quad_F(x, m):
    return quad(lambda t: 1 / math.sqrt(1 - m * math.sin(t) ** 2), 0, x, epsabs=1e-14, epsrel=1e-14, limit=200)[0]


def quad_E(x, m):
    return quad(lambda t: math.sqrt(1 - m * math.sin(t) ** 2), 0, x, epsabs=1e-14, epsrel=1e-14, limit=200)[0]


# frozen from the quadrature oracle above
K_HALF = 1.8540746773013719
E_HALF = 1.3506438810476755


def test_frozen_values_match_oracle():
    assert quad_F(math.pi / 2, 0.5) == pytest.approx(K_HALF, rel=1e-14)
    assert quad_E(math.pi / 2, 0.5) == pytest.approx(E_HALF, rel=1e-14)


@pytest.mark.parametrize("m", [0.0, 1e-8, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999999])
def test_complete_integrals_against_quadrature(m):
    assert complete_K(m) == pytest.approx(quad_F(math.pi / 2, m), rel=1e-12)
    assert complete_E(m) == pytest.approx(quad_E(math.pi / 2, m), rel=1e-12)


def test_complete_special_values():
    assert complete_K(0.0) == math.pi / 2
    assert complete_E(0.0) == math.pi / 2
    assert complete_K(0.5) == pytest.approx(K_HALF, rel=1e-13)
    assert complete_E(0.5) == pytest.approx(E_HALF, rel=1e-13)
    assert complete_K(0.999) > complete_K(0.99) > complete_K(0.9)


@pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, float("nan")])
def test_domain_errors(bad):
    for f in (complete_K, complete_E):
        with pytest.raises(DomainError):
            f(bad)
    with pytest.raises(DomainError):
        incomplete_F(0.3, bad)
    with pytest.raises(DomainError):
        jacobi_sn_cn_dn(0.3, bad)


@pytest.mark.parametrize("x", [-7.0, -2.0, -0.3, 0.0, 0.9, 1.5, 2.5, 4.0, 11.0])
@pytest.mark.parametrize("m", [0.0, 0.2, 0.6, 0.95])
def test_incomplete_against_quadrature(x, m):
    assert incomplete_F(x, m) == pytest.approx(quad_F(x, m), rel=1e-12, abs=1e-13)
    assert incomplete_E(x, m) == pytest.approx(quad_E(x, m), rel=1e-12, abs=1e-13)


def test_incomplete_spec_examples():
    assert incomplete_F(math.pi / 2, 0.3) == pytest.approx(complete_K(0.3), rel=1e-14)
    assert incomplete_E(math.pi / 2, 0.3) == pytest.approx(complete_E(0.3), rel=1e-14)
    assert incomplete_F(0.7 + math.pi, 0.4) - incomplete_F(0.7, 0.4) == pytest.approx(2 * complete_K(0.4), rel=1e-13)
    assert incomplete_E(1.1 + math.pi, 0.7) - incomplete_E(1.1, 0.7) == pytest.approx(2 * complete_E(0.7), rel=1e-13)


@pytest.mark.parametrize("l", [-3, -1, 1, 2, 5])
def test_quasi_periodicity(l):
    x, m = 0.37, 0.81
    assert incomplete_F(x + l * math.pi, m) == pytest.approx(incomplete_F(x, m) + 2 * l * complete_K(m), rel=1e-13)
    assert incomplete_E(x + l * math.pi, m) == pytest.approx(incomplete_E(x, m) + 2 * l * complete_E(m), rel=1e-13)
    assert jacobi_am(l * complete_K(m), m) == pytest.approx(l * math.pi / 2, abs=1e-13)


def test_vectorized_matches_scalar():
    x = np.linspace(-5, 5, 23)
    F = incomplete_F(x, 0.6)
    assert F.shape == x.shape
    assert np.allclose(F, [incomplete_F(float(v), 0.6) for v in x], rtol=0, atol=1e-15)


def test_amplitude_is_inverse_of_F():
    for m in (0.0, 0.3, 0.8, 0.99):
        z = np.linspace(-9, 9, 101)
        assert np.max(np.abs(jacobi_am(incomplete_F(z, m), m) - z)) < 1e-10


def test_amplitude_examples():
    assert jacobi_am(0.0, 0.5) == 0.0
    assert jacobi_am(complete_K(0.8), 0.8) == pytest.approx(math.pi / 2, abs=1e-14)
    assert jacobi_am(0.4 + 2 * complete_K(0.6), 0.6) == pytest.approx(math.pi + jacobi_am(0.4, 0.6), abs=1e-13)


def test_sn_cn_dn_basic():
    for m in (0.0, 0.4, 0.9):
        assert jacobi_sn_cn_dn(0.0, m) == (0.0, 1.0, 1.0)
    sn, cn, dn = jacobi_sn_cn_dn(1.3, 0.7)
    assert sn**2 + cn**2 == pytest.approx(1, abs=1e-15)
    assert dn**2 + 0.7 * sn**2 == pytest.approx(1, abs=1e-15)
    K = complete_K(0.9)
    assert jacobi_sn_cn_dn(0.5 + 2 * K, 0.9)[2] == pytest.approx(jacobi_sn_cn_dn(0.5, 0.9)[2], abs=1e-14)


def test_sn_against_inverse_quadrature():
    # sn(F(phi)) = sin(phi) with F from the quadrature oracle
    for m in (0.25, 0.75, 0.97):
        for phi in (0.2, 1.0, 2.8, 5.5):
            sn, cn, dn = jacobi_sn_cn_dn(quad_F(phi, m), m)
            assert sn == pytest.approx(math.sin(phi), abs=1e-12)
            assert cn == pytest.approx(math.cos(phi), abs=1e-12)
            assert dn == pytest.approx(math.sqrt(1 - m * math.sin(phi) ** 2), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-30, 30), m=st.floats(0.0, 0.999))
def test_parity(u, m):
    assert jacobi_am(-u, m) == pytest.approx(-jacobi_am(u, m), abs=1e-12)
    sn, cn, dn = jacobi_sn_cn_dn(u, m)
    sn2, cn2, dn2 = jacobi_sn_cn_dn(-u, m)
    assert sn2 == pytest.approx(-sn, abs=1e-12)
    assert cn2 == pytest.approx(cn, abs=1e-12)
    assert dn2 == pytest.approx(dn, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-20, 20), m=st.floats(0.01, 0.99))
def test_derivative_identities(u, m):
    h = 1e-5
    sp, cp, dp = jacobi_sn_cn_dn(u + h, m)
    sm, cm, dm = jacobi_sn_cn_dn(u - h, m)
    sn, cn, dn = jacobi_sn_cn_dn(u, m)
    assert abs((sp - sm) / (2 * h) - cn * dn) < 1e-6
    assert abs((cp - cm) / (2 * h) + sn * dn) < 1e-6
    assert abs((dp - dm) / (2 * h) + m * sn * cn) < 1e-6
    assert abs((jacobi_am(u + h, m) - jacobi_am(u - h, m)) / (2 * h) - dn) < 1e-6


@pytest.mark.parametrize("m", [0.05, 0.3, 0.5, 0.8, 0.95])
def test_complete_integral_derivatives(m):
    h = 1e-6
    K, E = complete_K(m), complete_E(m)
    dK = (complete_K(m + h) - complete_K(m - h)) / (2 * h)
    dE = (complete_E(m + h) - complete_E(m - h)) / (2 * h)
    assert dE == pytest.approx((E - K) / (2 * m), abs=1e-6)
    assert dK == pytest.approx(((m - 1) * K + E) / (2 * m * (1 - m)), abs=1e-6)


def test_positivity_and_upper_bound_lemmas():
    m = np.round(np.arange(1, 100) * 0.01, 2)
    K = np.array([complete_K(v) for v in m])
    E = np.array([complete_E(v) for v in m])
    assert np.all(2 * E - K + m * K > 0)
    assert np.all(E < math.pi / (2 * math.sqrt(2)) * np.sqrt(2 - m))


def test_zeros_of_figure_eight_abscissa():
    ms = constants().m_star
    x = np.linspace(0, 2 * math.pi, 20001)[:-1]
    g = 2 * incomplete_E(x, ms) - incomplete_F(x, ms)
    zeros = np.array([0, 0.5, 1, 1.5]) * math.pi
    for z in zeros:
        assert abs(2 * incomplete_E(z, ms) - incomplete_F(z, ms)) <= 1e-8
    dist = np.min(np.abs(x[:, None] - np.r_[zeros, 2 * math.pi][None, :]), axis=1)
    assert np.min(np.abs(g[dist > 1e-2])) >= 1e-3


def test_m_star():
    ms = find_m_star(1e-10)
    assert round(ms, 4) == 0.8261
    assert ms > 0.5
    assert abs(2 * complete_E(ms) - complete_K(ms)) <= 1e-10


def test_m_star_against_quadrature_bisection():
    def g(m):
        return 2 * quad_E(math.pi / 2, m) - quad_F(math.pi / 2, m)

    lo, hi = 0.5, 1 - 1e-9
    for _ in range(45):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if g(mid) > 0 else (lo, mid)
    assert find_m_star() == pytest.approx(0.5 * (lo + hi), abs=1e-11)


def test_constants():
    k = constants()
    assert k.c_star == pytest.approx(112.439609741, abs=1e-6)
    assert k.c_star < 16 * math.pi**2
    assert k.c_star == pytest.approx(k.E_star * k.L_star, rel=1e-15)
    assert k.c_star_closed_form == pytest.approx(k.c_star, rel=1e-9)
    assert k.L_star == pytest.approx(4 * complete_K(k.m_star), rel=1e-15)
    assert set(k.as_dict()) == {"m_star", "e_star", "l_star", "c_star"}


def test_constants_tolerance_robust():
    assert compute_constants(1e-4).c_star == pytest.approx(compute_constants(1e-12).c_star, abs=1e-3)
    with pytest.raises(ValueError):
        find_m_star(0.0)
