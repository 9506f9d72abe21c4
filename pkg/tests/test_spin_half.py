import numpy as np
import pytest

from evmirror.correlations import one_point_rates
from evmirror.errors import (GridTooCoarse, InvalidDomain, UnsupportedPolarization)
from evmirror.optics import EvanescentFieldConfig, Interface
from evmirror.spin_half import (SpinHalfState, TransitionCoefficients, WignerSlice,
                                bloch_rhs, circular_pumping_rate, evolve_wigner_slice,
                                forces_spin_half, gaussian_slice, integrate_pumping,
                                light_shift, sign_agreement, tm_pumping_rates)

from oracles import pumping_rhs_matrix

JE32 = TransitionCoefficients.for_je(1.5)
JE12 = TransitionCoefficients.for_je(0.5)


def test_clebsch_gordan():
    assert (JE32.beta, JE32.alpha) == pytest.approx((2 / 3, 1 / 3))
    assert (JE12.beta, JE12.alpha) == pytest.approx((1 / 3, -1 / 3))
    with pytest.raises(InvalidDomain):
        TransitionCoefficients.for_je(2.5)


def test_state_validation():
    with pytest.raises(InvalidDomain):
        SpinHalfState(1.0, [0.8, 0.8, 0.0])
    with pytest.raises(InvalidDomain):
        SpinHalfState(-1.0, [0, 0, 0])


def test_light_shift(te, tm):
    ls = light_shift(te, JE32, 0.5)
    assert ls["scalar_shift"] == pytest.approx(2 / 3 * np.exp(-1.0))
    np.testing.assert_allclose(ls["field_vector"], 0)
    ls = light_shift(tm, JE32, 0.5)
    np.testing.assert_allclose(ls["field_vector"], [0, -2 * np.sqrt(2) / 3 * np.exp(-1), 0])
    big = EvanescentFieldConfig(kappa=1.0, Q=np.sqrt(2), xi0=2 * tm.xi0, polarization="CUSTOM")
    np.testing.assert_allclose(light_shift(big, JE32, 0.5)["field_vector"],
                               4 * ls["field_vector"])


@pytest.mark.parametrize("coeffs", [JE32, JE12])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bloch_rhs_matches_master_equation(glass, coeffs, seed):
    rng = np.random.default_rng(seed)
    xi = rng.normal(size=3) + 1j * rng.normal(size=3)
    cfg = EvanescentFieldConfig(kappa=1.0, Q=np.sqrt(2), xi0=xi, polarization="CUSTOM",
                                detuning_ratio=7.0)
    J = rng.normal(size=3)
    J *= 0.6 / np.linalg.norm(J)
    z = 0.4
    cp, cn = one_point_rates(glass, z)
    ez = np.exp(-2 * z)
    ref, trace = pumping_rhs_matrix(xi * np.sqrt(ez), coeffs.beta, coeffs.alpha,
                                    [cp, cp, cn], J, 7.0)
    assert abs(trace) < 1e-14
    np.testing.assert_allclose(bloch_rhs(cfg, coeffs, glass, z, SpinHalfState(1.0, J)), ref,
                               atol=1e-13)


def test_te_has_no_pumping(glass, te):
    np.testing.assert_allclose(bloch_rhs(te, JE32, glass, 0.2, SpinHalfState(1, [0, 0, 0])), 0)


@pytest.mark.parametrize("z", [0.3, 3.0])
@pytest.mark.parametrize("n0", [1.0, 1.5])
def test_tm_steady_state(tm, z, n0):
    tr = integrate_pumping(tm, JE32, Interface(n0), z)
    assert tr.steady
    np.testing.assert_allclose(tr.J_steady, [0, -2 * np.sqrt(2) / 3, 0], atol=1e-6)


def test_tm_rates_ratio(tm, glass):
    for z in (0.1, 1.0):
        r = tm_pumping_rates(tm, JE32, glass, z)
        k, Q = tm.kappa, tm.Q
        assert r["plus_to_minus"] / r["minus_to_plus"] == pytest.approx(
            (k + Q) ** 2 / (k - Q) ** 2, rel=1e-12)
        assert -r["gamma_p"] / r["gamma_relax"] == pytest.approx(-2 * k * Q / (k * k + Q * Q))


def test_circular_pumping(glass, circ):
    h = np.cross(circ.xi0.conj(), circ.xi0).imag
    h /= np.linalg.norm(h)
    z = 0.3
    gp = circular_pumping_rate(circ, JE32, glass, z)
    tau = 0.01 / gp
    tr = integrate_pumping(circ, JE32, glass, z, t_eval=np.array([tau]), steady_tol=0.0,
                           t_end=tau)
    assert tr.J[0] @ h == pytest.approx(1 - np.exp(-0.01), abs=1e-9)
    st = integrate_pumping(circ, JE32, glass, z)
    assert st.J_steady @ h == pytest.approx(1.0, abs=1e-6)


def test_pumping_argument_checks(glass, tm):
    with pytest.raises(InvalidDomain):
        integrate_pumping(tm, JE32, glass, 0.3, t_end=-1.0)


def test_forces_vacuum_limit(vacuum, te):
    f = forces_spin_half(te, JE32, vacuum, 0.0)
    b2, a2 = JE32.beta ** 2, JE32.alpha ** 2
    Q = te.Q
    assert f.f_sp2 == 0
    np.testing.assert_allclose(f.F1["w"], [Q * (b2 + 2 * a2), 0, 0])
    np.testing.assert_allclose(f.F1["Jz"], [Q * b2, 0, 0])
    np.testing.assert_allclose(f.F1["Jx"], [Q * b2, 0, 0])
    np.testing.assert_allclose(f.F1["Jy"], [Q * (b2 - 2 * a2), 0, 0])


def test_forces_te_only(glass, tm):
    with pytest.raises(UnsupportedPolarization):
        forces_spin_half(tm, JE32, glass, 0.5)


def test_separation_estimate_formula(glass, te):
    from evmirror.correlations import weights
    f = forces_spin_half(te, JE32, glass, 0.5)
    w = weights(glass, 0.5)
    cp, cn = one_point_rates(glass, 0.5)
    est = -2 * JE32.alpha ** 2 * f.f_sp2 / f.gamma_sigma
    assert est == pytest.approx(-4 * w.a1 / (cp + cn), rel=1e-12)


def test_sign_agreement_helper():
    assert sign_agreement(np.array([1, -1, 0.5]), np.array([2, -3, 1e-6])) == 1.0
    assert sign_agreement(np.array([1, 1]), np.array([2, -3])) == 0.5


def test_slice_grid_checks(glass, te):
    with pytest.raises(GridTooCoarse):
        evolve_wigner_slice(gaussian_slice(0.5, points=41), te, JE32, glass, 1.0)
    p = np.array([0, 0.1, 0.3])
    with pytest.raises(InvalidDomain):
        evolve_wigner_slice(WignerSlice(p, p, p, 0.5), te, JE32, glass, 1.0)
    with pytest.raises(UnsupportedPolarization):
        evolve_wigner_slice(gaussian_slice(0.5),
                            EvanescentFieldConfig.from_kappa(1.0, "TM"), JE32, glass, 1.0)


def test_slice_conserves_population_and_stays_positive(glass, te):
    f = forces_spin_half(te, JE32, glass, 0.5)
    # +-8 widths, so the truncation step at the slice edge is below rounding
    slice_ = gaussian_slice(0.5, p_min=-40, p_max=40, points=801)
    ev = evolve_wigner_slice(slice_, te, JE32, glass, 1 / f.gamma_sigma, n_out=5)
    np.testing.assert_allclose(ev.population, 1.0, atol=1e-12)
    assert ev.w_plus.min() >= -1e-10 and ev.w_minus.min() >= -1e-10
    assert ev.separation[-1] < 0


def test_slice_vacuum_control(vacuum, te):
    ev = evolve_wigner_slice(gaussian_slice(0.5), te, JE32, vacuum, 20.0, n_out=4)
    assert np.abs(ev.w_plus - ev.w_minus).max() < 1e-10


def test_slice_matches_fourier_solution(glass, te):
    """Scheme against the exact solution of the constant-coefficient system."""
    import scipy.linalg as sl
    t_end = 15.0
    ev = evolve_wigner_slice(gaussian_slice(0.5), te, JE32, glass, t_end, n_out=1)
    r = ev.rates
    A = np.array([[-r["F_sigma"], -r["c"]], [r["c"], -r["F_sigma"]]])
    A = np.array([[r["F_pi"], r["F_sigma"] - r["c"]], [r["F_sigma"] + r["c"], r["F_pi"]]]) \
        - (r["F_pi"] + r["F_sigma"]) * np.eye(2)
    B = r["gamma_sigma"] * np.array([[-1, 1], [1, -1]])
    p = ev.p_grid
    dp = p[1] - p[0]
    w0 = np.vstack([np.interp(p, *(lambda s: (s.p_grid, s.w_plus))(gaussian_slice(0.5)),
                              left=0, right=0)] * 2)
    k = 2 * np.pi * np.fft.fftfreq(p.size, dp)
    W = np.fft.fft(w0, axis=1)
    for i, kk in enumerate(k):
        W[:, i] = sl.expm(t_end * (-1j * kk * A + B)) @ W[:, i]
    exact = np.fft.ifft(W, axis=1).real
    assert np.abs(ev.w_plus[-1] - exact[0]).max() < 2e-4 * exact[0].max()
    assert np.abs(ev.w_minus[-1] - exact[1]).max() < 2e-4 * exact[1].max()
