import numpy as np
import pytest
from scipy import special

from evmirror.errors import InvalidDomain, NonConvergence
from evmirror.quadrature import (QuadratureSpec, SommerfeldIntegrand, bessel_j,
                                 bessel_ratio_limits, gauss_kronrod, integrate_sommerfeld)


def test_gauss_kronrod_polynomial_exact():
    val, err = gauss_kronrod(lambda x: x ** 9 - 3 * x ** 2, -1.0, 2.0)
    assert val[0] == pytest.approx((2 ** 10 - 1) / 10 - 9, rel=1e-14)


def test_gauss_kronrod_vector_components_share_nodes():
    f = lambda x: np.column_stack([np.sin(x), np.exp(x), 1 / (1 + x * x)])
    val, _ = gauss_kronrod(f, 0.0, 3.0)
    np.testing.assert_allclose(val, [1 - np.cos(3.0), np.exp(3.0) - 1, np.arctan(3.0)],
                               rtol=1e-12)


def test_gauss_kronrod_oscillatory():
    val, _ = gauss_kronrod(lambda x: np.cos(40 * x), 0.0, np.pi / 3,
                           QuadratureSpec(1e-12, 1e-14))
    assert val[0] == pytest.approx(np.sin(40 * np.pi / 3) / 40, abs=1e-13)


def test_nonconvergence_is_raised():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-16, max_subdivisions=6)
    with pytest.raises(NonConvergence):
        gauss_kronrod(lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, spec)


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0), dict(abs_tol=-1), dict(max_subdivisions=0)])
def test_spec_validation(kwargs):
    with pytest.raises(InvalidDomain):
        QuadratureSpec(**kwargs)


def test_sommerfeld_measures():
    one = lambda u, v, w: np.ones_like(v)
    n0 = 1.5
    prop = integrate_sommerfeld(SommerfeldIntegrand(one, "propagating", n0, "u/v"))
    assert prop == pytest.approx(1.0, abs=1e-13)
    ev = integrate_sommerfeld(SommerfeldIntegrand(one, "evanescent", n0, "u/w"))
    assert ev == pytest.approx(np.sqrt(n0 ** 2 - 1), abs=1e-13)
    flat = integrate_sommerfeld(SommerfeldIntegrand(one, "evanescent", n0, "1"))
    assert flat == pytest.approx(n0 - 1, abs=1e-12)
    # (u/v) du on the evanescent segment is -i dt with t = sqrt(u^2 - 1)
    ev_v = integrate_sommerfeld(SommerfeldIntegrand(one, "evanescent", n0, "u/v"))
    assert ev_v == pytest.approx(-1j * np.sqrt(n0 ** 2 - 1), abs=1e-13)


def test_sommerfeld_singular_kernel_matches_closed_form():
    # int_0^1 (u/v) v^2 du = int u sqrt(1 - u^2) du = 1/3
    k = lambda u, v, w: v * v
    assert integrate_sommerfeld(SommerfeldIntegrand(k, "propagating", 1.2)) == \
        pytest.approx(1 / 3, abs=1e-13)


def test_evanescent_segment_vanishes_at_n0_one():
    one = lambda u, v, w: np.ones_like(v)
    assert integrate_sommerfeld(SommerfeldIntegrand(one, "evanescent", 1.0)) == 0


def test_sommerfeld_bad_arguments():
    one = lambda u, v, w: v
    with pytest.raises(InvalidDomain):
        SommerfeldIntegrand(one, "guided", 1.5)
    with pytest.raises(InvalidDomain):
        SommerfeldIntegrand(one, "propagating", 0.9)
    with pytest.raises(InvalidDomain):
        SommerfeldIntegrand(one, "propagating", 1.5, "v")


@pytest.mark.parametrize("order", [0, 1, 2])
def test_bessel_against_scipy(order):
    x = np.concatenate([np.linspace(0, 30, 3001), np.linspace(30, 100, 701)])
    assert np.max(np.abs(bessel_j(order, x) - special.jv(order, x))) < 1e-10


def test_bessel_ratio_limits():
    x = np.array([0.0, 1e-8, 0.5, 13.9, 14.1, 60.0])
    with np.errstate(invalid="ignore", divide="ignore"):
        ref1 = np.where(x > 0, special.j1(x) / x, 0.5)
        ref2 = np.where(x > 0, special.jv(2, x) / x ** 2, 0.125)
    np.testing.assert_allclose(bessel_ratio_limits(1, x), ref1, atol=1e-12)
    np.testing.assert_allclose(bessel_ratio_limits(2, x), ref2, atol=1e-12)
    assert bessel_ratio_limits(1, 0.0) == 0.5
    with pytest.raises(InvalidDomain):
        bessel_ratio_limits(1, -1.0)
    with pytest.raises(InvalidDomain):
        bessel_j(3, 1.0)
