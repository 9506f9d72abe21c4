import pytest
from scipy.constants import hbar

from evmirror.units import ReducedUnits


def test_conversions():
    u = ReducedUnits(wavelength=780e-9, gamma_inf=3.8e7, s0=0.01)
    assert u.k == pytest.approx(2 * 3.141592653589793 / 780e-9)
    assert u.length(1.0) == pytest.approx(1 / u.k)
    assert u.momentum(1.0) == pytest.approx(hbar * u.k)
    assert u.force(1.0) == pytest.approx(hbar * u.k * u.rate)
    assert u.diffusion(1.0) == pytest.approx((hbar * u.k) ** 2 * u.rate)
    assert u.rate == pytest.approx(0.5 * 0.01 * 3.8e7)
    assert u.time(2.0) == pytest.approx(2.0 / u.rate)


def test_invalid():
    from evmirror.errors import InvalidDomain
    with pytest.raises(InvalidDomain):
        ReducedUnits(wavelength=-1.0, gamma_inf=1.0, s0=0.01)
