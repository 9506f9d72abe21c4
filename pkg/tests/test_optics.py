import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evmirror.errors import InvalidDomain
from evmirror.optics import (EvanescentFieldConfig, Interface, field_profile, fresnel,
                             fresnel_identity_check, helicity)


def test_interface_validation():
    with pytest.raises(InvalidDomain):
        Interface(0.99)
    with pytest.raises(InvalidDomain):
        Interface(float("nan"))


def test_normal_incidence():
    r, t = fresnel(Interface(1.5), 0.0, "TE")
    assert r == pytest.approx(-0.2)
    assert t == pytest.approx(1.2)  # mode incident from the dielectric side
    r_tm, _ = fresnel(Interface(1.5), 0.0, "TM")
    assert r_tm == pytest.approx(0.2)


def test_brewster_angle_zero_tm_reflection():
    n0 = 1.5
    u = n0 / np.sqrt(1 + n0 * n0)
    r, _ = fresnel(Interface(n0), u, "TM")
    assert abs(r) < 1e-15


def test_total_internal_reflection_unit_modulus_at_grazing():
    r, _ = fresnel(Interface(1.5), 1.2, "TE")
    # from the vacuum side the band 1 < u < n0 carries a phase only in v
    assert np.isfinite(abs(r))


def test_vacuum_interface_is_transparent():
    for pol in ("TE", "TM"):
        r, t = fresnel(Interface(1.0), np.linspace(0, 0.99, 7), pol)
        np.testing.assert_allclose(r, 0, atol=1e-15)
        np.testing.assert_allclose(t, 1, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.01, 3.0), st.floats(0.001, 0.999), st.sampled_from(["TE", "TM"]))
def test_identity_below_critical(n0, frac, pol):
    assert fresnel_identity_check(Interface(n0), frac, pol) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(1.01, 3.0), st.floats(0.001, 0.999), st.sampled_from(["TE", "TM"]))
def test_identity_in_evanescent_band(n0, frac, pol):
    u = 1.0 + frac * (n0 - 1.0)
    assert fresnel_identity_check(Interface(n0), u, pol) < 1e-12


def test_fresnel_domain():
    with pytest.raises(InvalidDomain):
        fresnel(Interface(1.5), 1.6, "TE")
    with pytest.raises(InvalidDomain):
        fresnel(Interface(1.5), 0.5, "XX")


def test_presets_and_dispersion():
    cfg = EvanescentFieldConfig.from_kappa(1.0, "TM")
    assert cfg.Q == pytest.approx(np.sqrt(2))
    np.testing.assert_allclose(cfg.xi0, [1j, 0, -np.sqrt(2)])
    assert cfg.xi2 == pytest.approx(3.0)
    c2 = EvanescentFieldConfig.from_Q(np.sqrt(2), "CIRC")
    assert c2.kappa == pytest.approx(1.0)
    np.testing.assert_allclose(c2.xi0, [1j, 1j, -np.sqrt(2)])
    with pytest.raises(InvalidDomain):
        EvanescentFieldConfig(kappa=1.0, Q=1.5, xi0=[0, 1, 0])
    with pytest.raises(InvalidDomain):
        EvanescentFieldConfig.from_Q(0.5)
    with pytest.raises(InvalidDomain):
        EvanescentFieldConfig.from_kappa(1.0, "CUSTOM")
    with pytest.raises(InvalidDomain):
        EvanescentFieldConfig.from_kappa(1.0, detuning_ratio=0.0)


def test_saturation_warning_and_sign():
    with pytest.warns(RuntimeWarning):
        EvanescentFieldConfig.from_kappa(1.0, s0=0.2)
    assert EvanescentFieldConfig.from_kappa(1.0, detuning_ratio=-3).detuning_sign == -1


def test_interface_realizability_warning():
    cfg = EvanescentFieldConfig.from_kappa(2.0)
    with pytest.warns(RuntimeWarning):
        cfg.check_interface(Interface(1.5))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cfg.check_interface(Interface(1.0))
        EvanescentFieldConfig.from_kappa(1.0).check_interface(Interface(1.5))


def test_field_profile_and_helicity(te, tm, circ):
    np.testing.assert_allclose(field_profile(te, (0.3, 0, 0.5)),
                               np.array([0, 1, 0]) * np.exp(-0.5 + 0.3j * np.sqrt(2)))
    with pytest.raises(InvalidDomain):
        field_profile(te, (0, 0, -0.1))
    np.testing.assert_allclose(helicity(te), 0)
    np.testing.assert_allclose(helicity(tm), [0, -2 * np.sqrt(2), 0])
    assert np.linalg.norm(helicity(circ)) > 0
