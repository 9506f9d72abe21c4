"""J_g = 1/2 ground state in the evanescent wave.

The 2x2 Wigner matrix is written W = (w + sigma.J)/2. The lowering
operator is b^- = beta xi + i alpha sigma x xi with Clebsch-Gordan
factors (beta, alpha) fixed by the excited-state angular momentum.

Reduced units as elsewhere: time in 1/Gamma'_inf, momentum in hbar k,
light shifts in hbar Delta' (so Delta'/Gamma'_inf = Delta/Gamma_inf).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .correlations import correlation_taylor, one_point_rates
from .errors import GridTooCoarse, InvalidDomain, StiffnessFailure, UnsupportedPolarization
from .optics import helicity
from .quadrature import DEFAULT_SPEC

__all__ = [
    "TransitionCoefficients",
    "SpinHalfState",
    "light_shift",
    "bloch_rhs",
    "PumpingTrajectory",
    "integrate_pumping",
    "circular_pumping_rate",
    "tm_pumping_rates",
    "SpinHalfForces",
    "forces_spin_half",
    "WignerSlice",
    "SliceEvolution",
    "gaussian_slice",
    "evolve_wigner_slice",
]


@dataclass(frozen=True)
class TransitionCoefficients:
    """Clebsch-Gordan factors (beta, alpha) of the J_g = 1/2 -> J_e line."""

    beta: float
    alpha: float

    @classmethod
    def for_je(cls, je):
        """J_e = 1/2 -> (1/3, -1/3); J_e = 3/2 -> (2/3, 1/3)."""
        if je == 0.5:
            return cls(1.0 / 3.0, -1.0 / 3.0)
        if je == 1.5:
            return cls(2.0 / 3.0, 1.0 / 3.0)
        raise InvalidDomain(f"J_e must be 1/2 or 3/2, got {je}")


@dataclass(frozen=True)
class SpinHalfState:
    """Population ``w`` and magnetization ``J`` (|J| <= w)."""

    w: float
    J: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float).reshape(3)
        object.__setattr__(self, "J", J)
        if self.w < 0:
            raise InvalidDomain("w must be >= 0")
        if np.linalg.norm(J) > self.w * (1 + 1e-12):
            raise InvalidDomain("|J| must not exceed w")


def light_shift(cfg, coeffs, z):
    """Ground-state light shift H = Delta' e^{-2 kappa z}(beta |xi|^2 + alpha h.sigma).

    Returns
    -------
    dict
        ``scalar_shift`` = beta |xi0|^2 e^{-2 kappa z} and ``field_vector`` =
        alpha h e^{-2 kappa z} (both in units of hbar Delta').
    """
    if z < 0:
        raise InvalidDomain("z must be >= 0")
    ez = np.exp(-2.0 * cfg.kappa * z)
    return {"scalar_shift": coeffs.beta * cfg.xi2 * ez,
            "field_vector": coeffs.alpha * helicity(cfg) * ez}


def _tensors(cfg, interface, z, spec):
    c_par, c_perp = one_point_rates(interface, z, spec)
    C = np.diag([c_par, c_par, c_perp])
    F = np.outer(cfg.xi0.conj(), cfg.xi0).real
    return C, F


def _rhs_matrix(cfg, coeffs, C, F, ez):
    """Linear map J -> dJ/dt and constant drive (w = 1)."""
    a, b = coeffs.alpha, coeffs.beta
    h = helicity(cfg)
    hx = np.array([[0.0, -h[2], h[1]], [h[2], 0.0, -h[0]], [-h[1], h[0], 0.0]])
    M = (2.0 * a * cfg.detuning_ratio * hx
         - 2.0 * a * a * (np.trace(F) * C + np.trace(C) * F)
         + 2.0 * (a * a * (C @ F + F @ C) - a * b * (C @ F - F @ C)))
    drive = 2.0 * a * a * C @ h
    return ez * M, ez * drive


def bloch_rhs(cfg, coeffs, interface, z, state, spec=DEFAULT_SPEC):
    """Optical pumping rate of change dJ/dt (units of Gamma'_inf).

    The population is normalized to w = 1 (J / w is used).
    """
    if z < 0:
        raise InvalidDomain("z must be >= 0")
    C, F = _tensors(cfg, interface, z, spec)
    M, drive = _rhs_matrix(cfg, coeffs, C, F, np.exp(-2.0 * cfg.kappa * z))
    J = state.J / state.w if state.w > 0 else state.J
    return M @ J + drive


@dataclass(frozen=True)
class PumpingTrajectory:
    """Time series of J with the steady state (NaN if not reached)."""

    t: np.ndarray
    J: np.ndarray
    steady: bool
    J_steady: np.ndarray
    t_steady: float


def integrate_pumping(cfg, coeffs, interface, z, J0=(0.0, 0.0, 0.0), t_end=None,
                      dt_ctrl=None, steady_tol=1e-10, spec=DEFAULT_SPEC, t_eval=None):
    """Integrate the pumping equation from ``J0`` up to ``t_end``.

    Parameters
    ----------
    t_end : float, optional
        Final time in 1/Gamma'_inf. Defaults to 60 times the slowest
        relaxation time of the linear system, which reaches ``steady_tol``
        at any height.
    dt_ctrl : dict, optional
        Integrator controls ``rtol`` (1e-12), ``atol`` (1e-14) and
        ``max_step``.
    steady_tol : float
        Integration stops once |dJ/dt| falls below this value.

    Raises
    ------
    StiffnessFailure
        If the adaptive integrator fails.
    """
    C, F = _tensors(cfg, interface, z, spec)
    M, drive = _rhs_matrix(cfg, coeffs, C, F, np.exp(-2.0 * cfg.kappa * z))
    if t_end is None:
        slowest = np.abs(np.linalg.eigvals(M).real).min()
        t_end = 60.0 / slowest if slowest > 0 else 1e4
    if not t_end > 0:
        raise InvalidDomain("t_end must be > 0")
    ctrl = {"rtol": 1e-12, "atol": 1e-14}
    ctrl.update(dt_ctrl or {})

    def rhs(t, J):
        return M @ J + drive

    def settled(t, J):
        return np.linalg.norm(rhs(t, J)) - steady_tol
    settled.terminal = True
    settled.direction = -1

    sol = solve_ivp(rhs, (0.0, t_end), np.asarray(J0, dtype=float), method="DOP853",
                    events=settled, dense_output=t_eval is not None, **ctrl)
    if sol.status == -1:
        raise StiffnessFailure(sol.message)
    steady = sol.status == 1
    t = sol.t if t_eval is None else np.asarray(t_eval)
    J = sol.y.T if t_eval is None else sol.sol(np.minimum(t, sol.t[-1])).T
    return PumpingTrajectory(t=t, J=J, steady=steady,
                             J_steady=sol.y[:, -1] if steady else np.full(3, np.nan),
                             t_steady=float(sol.t[-1]) if steady else np.nan)


def circular_pumping_rate(cfg, coeffs, interface, z, spec=DEFAULT_SPEC):
    """Gamma_p = 4 alpha^2 Q^2 c_par e^{-2 kappa z} for the CIRC preset."""
    c_par, _ = one_point_rates(interface, z, spec)
    return 4.0 * coeffs.alpha ** 2 * cfg.Q ** 2 * c_par * np.exp(-2.0 * cfg.kappa * z)


def tm_pumping_rates(cfg, coeffs, interface, z, spec=DEFAULT_SPEC):
    """Pumping and relaxation rates of J_y for the TM preset.

    Returns a dict with ``gamma_p``, ``gamma_relax``, ``minus_to_plus`` and
    ``plus_to_minus``.
    """
    c_par, _ = one_point_rates(interface, z, spec)
    base = 2.0 * coeffs.alpha ** 2 * c_par * np.exp(-2.0 * cfg.kappa * z)
    k, Q = cfg.kappa, cfg.Q
    gp = base * 2.0 * k * Q
    gr = base * (k * k + Q * Q)
    return {"gamma_p": gp, "gamma_relax": gr,
            "minus_to_plus": 0.5 * (gr - gp), "plus_to_minus": 0.5 * (gr + gp)}


@dataclass(frozen=True)
class SpinHalfForces:
    """Radiation-pressure data for the TE-driven spin-1/2 atom.

    ``F1`` maps each of ``w``, ``Jx``, ``Jy``, ``Jz`` to the force vector
    acting on that component. ``f_sp2`` is the axial coupling strength and
    ``F2_couplings`` gives the mixing terms of Tr{sigma_i F2.grad_p W} as
    {(trace, component, derivative): coefficient}.
    """

    F1: dict
    f_sp2: float
    gamma_pi: float
    gamma_sigma: float
    F2_couplings: dict = field(default_factory=dict)


def forces_spin_half(cfg, coeffs, interface, z, spec=DEFAULT_SPEC):
    """Radiation-pressure operators for a TE evanescent wave.

    Raises
    ------
    UnsupportedPolarization
        For any preset other than TE.
    """
    if cfg.polarization != "TE":
        raise UnsupportedPolarization("spin-1/2 forces are derived for TE only")
    if z < 0:
        raise InvalidDomain("z must be >= 0")
    t = correlation_taylor(interface, z, spec)
    ez = np.exp(-2.0 * cfg.kappa * z)
    b2, a2 = coeffs.beta ** 2, coeffs.alpha ** 2
    cp, cn = t.c_par, t.c_perp
    unit = ez * cfg.Q * np.array([1.0, 0.0, 0.0])
    F1 = {
        "w": unit * (b2 * cp + a2 * (cp + cn)),
        "Jx": unit * (b2 * cp - a2 * (cp - cn)),
        "Jy": unit * (b2 * cp - a2 * (cp + cn)),
        "Jz": unit * (b2 * cp + a2 * (cp - cn)),
    }
    f = 2.0 * ez * t.weights.a1
    ab = coeffs.alpha * coeffs.beta
    couplings = {
        ("1", "Jy", "px"): a2 * f,
        ("1", "Jx", "py"): -ab * f,
        ("sigma_x", "w", "py"): -ab * f,
        ("sigma_y", "w", "px"): -a2 * f,
    }
    return SpinHalfForces(F1=F1, f_sp2=f, gamma_pi=b2 * ez * cp,
                          gamma_sigma=a2 * ez * (cp + cn), F2_couplings=couplings)


@dataclass
class WignerSlice:
    """Sublevel distributions w_+(p_x), w_-(p_x) on a uniform grid at fixed z.

    Sublevels refer to the y quantization axis; w = w_+ + w_-,
    J_y = w_+ - w_-.
    """

    p_grid: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray
    z: float

    @property
    def w(self):
        return self.w_plus + self.w_minus

    @property
    def J_y(self):
        return self.w_plus - self.w_minus


def gaussian_slice(z, width=5.0, p_min=-20.0, p_max=20.0, points=401):
    """Unpolarized Gaussian momentum distribution normalized to 1."""
    p = np.linspace(p_min, p_max, points)
    g = np.exp(-0.5 * (p / width) ** 2)
    g /= g.sum() * (p[1] - p[0])
    return WignerSlice(p_grid=p, w_plus=0.5 * g, w_minus=0.5 * g, z=float(z))


@dataclass(frozen=True)
class SliceEvolution:
    """Snapshots of the slice evolution.

    ``p_shift[k]`` is the drift of the co-moving grid at ``t[k]``: the lab
    momentum of grid point i is ``p_grid[i] + p_shift[k]``.
    """

    t: np.ndarray
    p_grid: np.ndarray
    p_shift: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray
    separation: np.ndarray
    population: np.ndarray
    sign_agreement: np.ndarray
    correlation: np.ndarray
    rates: dict

    @property
    def w(self):
        return self.w_plus + self.w_minus

    @property
    def J_y(self):
        return self.w_plus - self.w_minus


def _minmod(a, b):
    return np.where(a * b > 0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _upwind_flux(q, speed):
    """Interface values of q (cells 0..n-1) at inner faces, MUSCL/minmod."""
    d = np.diff(q)
    slope = np.zeros_like(q)
    slope[1:-1] = _minmod(d[:-1], d[1:])
    if speed >= 0:
        return speed * (q[:-1] + 0.5 * slope[:-1])
    return speed * (q[1:] - 0.5 * slope[1:])


def sign_agreement(J, dw, threshold=0.01):
    """Fraction of points with |dw| above ``threshold`` * max|dw| where
    sign(J) equals sign(dw)."""
    mask = np.abs(dw) > threshold * np.abs(dw).max()
    if not mask.any():
        return np.nan
    return float(np.mean(np.sign(J[mask]) == np.sign(dw[mask])))


def evolve_wigner_slice(slice_, cfg, coeffs, interface, t_end, n_out=50, cfl=0.4,
                        spec=DEFAULT_SPEC):
    """Sublevel transport and exchange at fixed height (TE only).

    Integrates
        d_t w_+ = -F_pi d_p w_+ - F_{-->+} d_p w_- - G_s (w_+ - w_-)
        d_t w_- = -F_pi d_p w_- - F_{+->-} d_p w_+ - G_s (w_- - w_+)
    with F_{-/+ -> +/-} = G_s Q -/+ alpha^2 f, in characteristic variables
    on a grid co-moving with the mean drift, using a zero-flux MUSCL
    finite-volume scheme and SSP-RK3. Total population is conserved to
    rounding. The input grid is padded on both sides by the distance the
    fast characteristic travels in ``t_end`` (plus 5 hbar k); the returned
    ``p_grid`` is the padded grid.

    The equations themselves do not preserve positivity: deep in the
    trailing tail w_- dips below zero once the fast mode has separated
    (about -1e-7 of the peak after 40 / Gamma'_inf for the default slice).

    Raises
    ------
    GridTooCoarse
        If the grid spacing exceeds 0.25 hbar k.
    UnsupportedPolarization
        For non-TE fields.
    """
    p = np.asarray(slice_.p_grid, dtype=float)
    dp = p[1] - p[0]
    if not np.allclose(np.diff(p), dp, rtol=1e-9, atol=0):
        raise InvalidDomain("p_grid must be uniform")
    if dp > 0.25:
        raise GridTooCoarse(f"grid spacing {dp:.3g} exceeds 0.25 hbar k")
    if not t_end > 0:
        raise InvalidDomain("t_end must be > 0")
    forces = forces_spin_half(cfg, coeffs, interface, slice_.z, spec)
    f_pi = forces.gamma_pi * cfg.Q
    f_sig = forces.gamma_sigma * cfg.Q
    c = coeffs.alpha ** 2 * forces.f_sp2
    g_s = forces.gamma_sigma
    if f_sig * f_sig < c * c:
        raise InvalidDomain("transport system is not hyperbolic (|c| > F_sigma)")
    drift = f_pi + f_sig
    mu = np.sqrt((f_sig - c) * (f_sig + c))
    # both co-moving speeds point the same way; pad with empty cells so no
    # mass reaches the zero-flux walls (a wall pile-up is not positive)
    n_pad = int(np.ceil((2.0 * f_sig * t_end + 5.0) / dp))
    p = np.concatenate([p[0] - dp * np.arange(n_pad, 0, -1), p,
                        p[-1] + dp * np.arange(1, n_pad + 1)])
    # A = [[f_pi, f_sig - c], [f_sig + c, f_pi]] = R diag(lam) R^-1
    R = np.array([[np.sqrt(f_sig - c), np.sqrt(f_sig - c)],
                  [np.sqrt(f_sig + c), -np.sqrt(f_sig + c)]])
    if mu == 0:
        R = np.eye(2)
        lam = np.array([f_pi, f_pi]) - drift
    else:
        lam = np.array([f_pi + mu, f_pi - mu]) - drift
    Rinv = np.linalg.inv(R)

    def rhs(U):
        chars = Rinv @ U
        flux = np.zeros((2, U.shape[1] + 1))
        for k in range(2):
            face = _upwind_flux(chars[k], lam[k])
            flux[:, 1:-1] += np.outer(R[:, k], face)
        dU = -(flux[:, 1:] - flux[:, :-1]) / dp
        ex = g_s * (U[0] - U[1])
        dU[0] -= ex
        dU[1] += ex
        return dU

    vmax = max(np.abs(lam).max(), 1e-300)
    dt = min(cfl * dp / vmax, 0.1 / max(g_s, 1e-300))
    n_steps = int(np.ceil(t_end / dt))
    dt = t_end / n_steps
    out_idx = set(np.unique(np.linspace(0, n_steps, n_out + 1).round().astype(int)))

    U = np.pad(np.vstack([slice_.w_plus, slice_.w_minus]).astype(float),
               ((0, 0), (n_pad, n_pad)))
    ts, wp, wm, shifts = [], [], [], []

    def record(step):
        ts.append(step * dt)
        wp.append(U[0].copy())
        wm.append(U[1].copy())
        shifts.append(drift * step * dt)

    record(0)
    for step in range(1, n_steps + 1):
        U1 = U + dt * rhs(U)
        U2 = 0.75 * U + 0.25 * (U1 + dt * rhs(U1))
        U = U / 3.0 + 2.0 / 3.0 * (U2 + dt * rhs(U2))
        if step in out_idx:
            record(step)

    wp, wm = np.array(wp), np.array(wm)
    wsum = wp + wm
    mean_plus = (wp * p).sum(1) / np.maximum(wp.sum(1), 1e-300)
    mean_minus = (wm * p).sum(1) / np.maximum(wm.sum(1), 1e-300)
    agree, corr = [], []
    for k in range(len(ts)):
        dw = np.gradient(wsum[k], dp)
        J = wp[k] - wm[k]
        agree.append(sign_agreement(J, dw))
        sj, sd = J.std(), dw.std()
        corr.append(float(np.mean((J - J.mean()) * (dw - dw.mean())) / (sj * sd))
                    if sj > 0 and sd > 0 else 0.0)
    return SliceEvolution(
        t=np.array(ts), p_grid=p, p_shift=np.array(shifts), w_plus=wp, w_minus=wm,
        separation=mean_plus - mean_minus, population=wsum.sum(1) * dp,
        sign_agreement=np.array(agree), correlation=np.array(corr),
        rates={"F_pi": f_pi, "F_sigma": f_sig, "c": c, "gamma_sigma": g_s,
               "separation_estimate": -2.0 * c / g_s if g_s > 0 else 0.0})
