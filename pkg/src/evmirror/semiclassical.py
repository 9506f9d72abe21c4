"""Atomic bounce on the evanescent-wave mirror.

Reduced units: time in 1/Gamma'_inf, z in 1/k, momenta in hbar k, energies
in hbar Gamma'_inf, diffusion in hbar^2 k^2 Gamma'_inf. With
G = Gamma_inf / omega_recoil the velocity of an atom with momentum p is

    dz/dt = vel p,    vel = 4 / (s0 G)

and its kinetic energy is vel p^2 / 2. The dipole potential is
U(z) = (Delta / Gamma_inf) b |xi0|^2 exp(-2 kappa z), with b = 1 for the
scalar atom and b = beta for the spin-1/2 atom.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import kernels
from .errors import ConfigError, InvalidDomain, NoReflection
from .quadrature import DEFAULT_SPEC
from .scalar_atom import observables
from .spin_half import TransitionCoefficients, forces_spin_half

__all__ = [
    "AtomConfig",
    "BounceTrajectory",
    "LangevinResult",
    "check_validity",
    "mean_bounce",
    "langevin_ensemble",
]

_MARGIN = 10.0
_START_RATIO = 1e-10


@dataclass(frozen=True)
class AtomConfig:
    """Atomic species and transition.

    Attributes
    ----------
    gamma_over_recoil : float
        Gamma_inf / omega_recoil with omega_recoil = hbar k^2 / 2M; must
        exceed 1.
    gamma_inf : float
        Natural linewidth Gamma_inf in 1/s, used only for SI output.
    transition : {"scalar", "spin_half"}
    je : float
        Excited-state angular momentum of the spin-1/2 transition.
    vdw_c3 : float
        Optional attraction -vdw_c3 / z^3 added to U (hbar Gamma'_inf / k^3).
    """

    gamma_over_recoil: float
    gamma_inf: float = 1.0
    transition: str = "scalar"
    je: float = 1.5
    vdw_c3: float = 0.0

    def __post_init__(self):
        if not self.gamma_over_recoil > 1.0:
            raise InvalidDomain("gamma_over_recoil must exceed 1 (semiclassical "
                                "treatment fails for light atoms)")
        if not self.gamma_inf > 0:
            raise InvalidDomain("gamma_inf must be > 0")
        if self.transition not in ("scalar", "spin_half"):
            raise InvalidDomain(f"unknown transition {self.transition!r}")
        if self.transition == "spin_half":
            TransitionCoefficients.for_je(self.je)
        if self.vdw_c3 < 0:
            raise InvalidDomain("vdw_c3 must be >= 0")

    def velocity_factor(self, s0):
        """dz/dt per unit momentum in reduced units."""
        return 4.0 / (s0 * self.gamma_over_recoil)


def check_validity(atom, cfg, p_inc, delta_p, level_shift=0.0):
    """Evaluate the validity conditions of the semiclassical description.

    Parameters
    ----------
    p_inc : float
        Incident momentum (hbar k).
    delta_p : float
        Width of the momentum distribution (hbar k).
    level_shift : float
        |Delta H_A| / hbar Gamma_inf, surface-induced level shift if known.

    Returns
    -------
    list of dict
        One entry per condition with ``condition``, ``lhs``, ``rhs`` and
        ``satisfied``. Rates are in units of Gamma_inf; "much greater"
        means lhs > 10 rhs.
    """
    G = atom.gamma_over_recoil
    doppler = 2.0 * max(abs(p_inc), abs(delta_p)) / G
    detuning = abs(cfg.detuning_ratio)
    checks = [
        ("slow_atoms", 1.0, doppler),
        ("small_excited_force", 1.0, 1.0 / delta_p if delta_p > 0 else np.inf),
        ("adiabatic_coherences", detuning, max(1.0, 2.0 * abs(p_inc) / G, abs(level_shift))),
        ("smooth_momentum_distribution", float(delta_p), 1.0),
    ]
    out = [{"condition": name, "lhs": float(lhs), "rhs": float(rhs),
            "satisfied": bool(lhs > _MARGIN * rhs)} for name, lhs, rhs in checks]
    out.append({"condition": "low_saturation", "lhs": float(cfg.s0), "rhs": 0.1,
                "satisfied": bool(cfg.s0 < 0.1)})
    return out


@dataclass(frozen=True)
class BounceTrajectory:
    """Mean trajectory of one bounce.

    ``delta_p2`` is the running 2 int D_ii dt (n, 3); its last row is
    ``delta_p2_accumulated``. ``tau`` is the equivalent width
    int U dt / U(z0) of the potential seen along the path and
    ``tau_estimate`` = 2M / (kappa p_inc).
    """

    t: np.ndarray
    z: np.ndarray
    p_x: np.ndarray
    p_y: np.ndarray
    p_z: np.ndarray
    delta_p2: np.ndarray
    delta_p2_accumulated: np.ndarray
    z0: float
    tau: float
    tau_estimate: float
    D_z0: np.ndarray
    energy_drift: float
    z_start: float
    units: dict = field(default_factory=lambda: {
        "t": "1/Gamma'_inf", "z": "1/k", "p": "hbar k", "delta_p2": "hbar^2 k^2"})


class _Mirror:
    """Potential, force and diffusion tables for one configuration."""

    def __init__(self, atom, cfg, interface, p_inc, include_rad_pressure, spec, dz=0.02):
        if cfg.detuning_ratio <= 0:
            raise InvalidDomain("the dipole potential must be repulsive (detuning > 0)")
        if not p_inc > 0:
            raise InvalidDomain("p_inc must be > 0")
        self.atom, self.cfg, self.interface, self.spec = atom, cfg, interface, spec
        self.kappa = cfg.kappa
        self.vel = atom.velocity_factor(cfg.s0)
        scale = 1.0
        if atom.transition == "spin_half":
            self.coeffs = TransitionCoefficients.for_je(atom.je)
            scale = self.coeffs.beta
        self.u0 = cfg.detuning_ratio * scale * cfg.xi2
        self.c3 = atom.vdw_c3
        self.p_inc = float(p_inc)
        self.energy = 0.5 * self.vel * p_inc * p_inc
        self.z_start = np.log(self.u0 / (_START_RATIO * self.energy)) / (2.0 * self.kappa)
        self.z0 = self._turning_point()
        self.include_rad_pressure = include_rad_pressure
        self._tabulate(dz)

    def potential(self, z):
        u = self.u0 * np.exp(-2.0 * self.kappa * z)
        if self.c3:
            u = u - self.c3 / np.maximum(z, 1e-300) ** 3
        return u

    def dipole_force(self, z):
        f = 2.0 * self.kappa * self.u0 * np.exp(-2.0 * self.kappa * z)
        if self.c3:
            f = f - 3.0 * self.c3 / np.maximum(z, 1e-300) ** 4
        return f

    def _turning_point(self):
        E = self.energy
        if self.z_start <= 0:
            raise NoReflection("barrier U(0) is below the incident kinetic energy")
        if not self.c3:
            return float(np.log(self.u0 / E) / (2.0 * self.kappa))
        zs = np.linspace(1e-3, self.z_start, 4000)
        u = self.potential(zs)
        i = int(np.argmax(u))
        if u[i] <= E:
            raise NoReflection("potential barrier is below the incident kinetic energy")
        return float(brentq(lambda z: self.potential(z) - E, zs[i], self.z_start))

    def _tabulate(self, dz):
        z_hi = self.z_start + 1.0
        n = int(np.ceil(z_hi / dz)) + 1
        self.z_tab = np.linspace(0.0, z_hi, n)
        rad = np.zeros((n, 3))
        diag = np.zeros((n, 3, 3))
        for i, z in enumerate(self.z_tab):
            if self.atom.transition == "scalar":
                r = observables(self.cfg, self.interface, z, self.spec)
                rad[i] = r.force
                diag[i] = r.diffusion
            else:
                f = forces_spin_half(self.cfg, self.coeffs, self.interface, z, self.spec)
                rad[i] = f.F1["w"]
                diag[i] = np.nan
        if not self.include_rad_pressure:
            rad[:] = 0.0
        self.rad_tab = rad
        self.D_tab = diag
        grow = np.exp(2.0 * self.kappa * self.z_tab)
        self._rad = CubicSpline(self.z_tab, rad * grow[:, None], axis=0)
        # no diffusion model for the spin-1/2 atom; diffusion() returns NaN
        self._D = (CubicSpline(self.z_tab, diag.reshape(n, 9) * grow[:, None], axis=0)
                   if self.atom.transition == "scalar" else None)

    def rad_force(self, z):
        return self._rad(z) * np.exp(-2.0 * self.kappa * np.asarray(z))[..., None]

    def diffusion(self, z):
        if self._D is None:
            return np.full(np.shape(z) + (3, 3), np.nan)
        d = self._D(z) * np.exp(-2.0 * self.kappa * np.asarray(z))[..., None]
        return d.reshape(np.shape(z) + (3, 3))


def mean_bounce(atom, cfg, interface, p_inc, include_rad_pressure=True, spec=DEFAULT_SPEC,
                rtol=1e-12, atol=1e-14):
    """Integrate the mean trajectory of one bounce.

    The atom starts at the height where U = 1e-10 E_kin moving towards the
    surface and is followed until it is back at that height.

    Parameters
    ----------
    atom : AtomConfig
    cfg : EvanescentFieldConfig
    interface : Interface
    p_inc : float
        Incident |p_z| in hbar k.
    include_rad_pressure : bool
        Add the radiation pressure force to the dipole force.

    Returns
    -------
    BounceTrajectory

    Raises
    ------
    NoReflection
        If the barrier is too low and the atom reaches z = 0.
    InvalidDomain
        For an attractive dipole potential.
    """
    m = _Mirror(atom, cfg, interface, p_inc, include_rad_pressure, spec)
    return _integrate_mean(m, cfg, p_inc, include_rad_pressure, rtol, atol)


def _integrate_mean(m, cfg, p_inc, include_rad_pressure, rtol=1e-12, atol=1e-14):
    vel = m.vel
    has_d = m.atom.transition == "scalar"

    def rhs(t, y):
        z = y[0]
        f = m.rad_force(z)
        d = np.diag(m.diffusion(z)) if has_d else np.zeros(3)
        return np.concatenate([[vel * y[3], f[0], f[1], f[2] + m.dipole_force(z)],
                               2.0 * d, [m.potential(z)]])

    def hit_surface(t, y):
        return y[0]
    hit_surface.terminal = True
    hit_surface.direction = -1

    def back_out(t, y):
        return y[0] - m.z_start if y[3] > 0 else -1.0
    back_out.terminal = True
    back_out.direction = 1

    y0 = np.zeros(8)
    y0[0] = m.z_start
    y0[3] = -p_inc
    t_max = 50.0 * m.z_start / (vel * p_inc)
    sol = solve_ivp(rhs, (0.0, t_max), y0, method="DOP853", rtol=rtol, atol=atol,
                    events=(hit_surface, back_out), dense_output=True)
    if sol.t_events[0].size:
        raise NoReflection("atom reached the surface")
    if not sol.t_events[1].size:
        raise NoReflection("atom did not return within the integration window")
    y = sol.y
    if not has_d:
        y[4:7] = np.nan
    u_z0 = m.potential(m.z0)
    e_kin = 0.5 * vel * y[3] ** 2
    e_tot = e_kin + m.potential(y[0])
    if include_rad_pressure:
        drift = np.nan
    else:
        drift = float(np.max(np.abs(e_tot - m.energy)) / m.energy)
    return BounceTrajectory(
        t=sol.t, z=y[0], p_x=y[1], p_y=y[2], p_z=y[3], delta_p2=y[4:7].T,
        delta_p2_accumulated=y[4:7, -1].copy(), z0=m.z0, tau=float(y[7, -1] / u_z0),
        tau_estimate=2.0 / (cfg.kappa * vel * p_inc), D_z0=np.diag(m.diffusion(m.z0)).copy(),
        energy_drift=drift, z_start=float(m.z_start))


@dataclass(frozen=True)
class LangevinResult:
    """Ensemble statistics of a Langevin bounce simulation.

    ``final`` holds (z, p_x, p_y, p_z, I_x, I_y, I_z) per trajectory, I
    being the summed stochastic impulse. ``predicted`` is the deterministic
    2 int D_ii dt along the mean path.
    """

    mean_p: np.ndarray
    cov_p: np.ndarray
    cov_impulse: np.ndarray
    histograms: dict
    predicted: np.ndarray
    final: np.ndarray
    n_traj: int
    n_steps: int
    dt: float
    seed: int


def _sqrt_psd(m):
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def langevin_ensemble(atom, cfg, interface, p_inc, n_traj, seed, threads=1,
                      include_rad_pressure=True, diffusion_scale=1.0, dt=None,
                      chunk=256, bins=50, spec=DEFAULT_SPEC):
    """Stochastic bounce ensemble with momentum kicks of covariance 2 D dt.

    Each trajectory draws its noise from its own Philox stream spawned from
    ``seed``, so the output does not depend on ``threads``. The step is
    ``min(1e-3 tau, stability bound)`` and the step count is fixed by the
    duration of the mean trajectory.

    Parameters
    ----------
    diffusion_scale : float
        Multiplies D (0 switches the noise off).

    Returns
    -------
    LangevinResult

    Raises
    ------
    ConfigError
        For the spin-1/2 transition (no diffusion tensor available).
    """
    if n_traj < 1:
        raise InvalidDomain("n_traj must be >= 1")
    if atom.transition != "scalar":
        raise ConfigError("Langevin ensemble needs the scalar-atom diffusion tensor",
                          "atom.transition")
    if threads < 1:
        raise InvalidDomain("threads must be >= 1")
    m = _Mirror(atom, cfg, interface, p_inc, include_rad_pressure, spec)
    mean = _integrate_mean(m, cfg, p_inc, include_rad_pressure)
    vel = m.vel
    curvature = vel * 4.0 * cfg.kappa ** 2 * m.u0
    step = min(1e-3 * mean.tau, 0.05 / np.sqrt(curvature))
    if dt is not None:
        step = float(dt)
    n_steps = int(np.ceil(mean.t[-1] / step))

    z_tab = np.linspace(0.0, m.z_tab[-1], int(np.ceil(m.z_tab[-1] / 0.005)) + 1)
    dzt = z_tab[1] - z_tab[0]
    force = np.ascontiguousarray(
        m.rad_force(z_tab) + np.outer(m.dipole_force(z_tab), [0.0, 0.0, 1.0]))
    sq = np.array([_sqrt_psd(2.0 * diffusion_scale * d).ravel() for d in m.diffusion(z_tab)])
    sq = np.ascontiguousarray(sq)

    children = np.random.SeedSequence(seed).spawn(n_traj)
    out = np.zeros((n_traj, 7))

    def run(lo):
        hi = min(lo + chunk, n_traj)
        noise = np.empty((hi - lo, n_steps, 3))
        for j in range(lo, hi):
            noise[j - lo] = np.random.Generator(np.random.Philox(children[j])).standard_normal(
                (n_steps, 3))
        block = np.zeros((hi - lo, 7))
        kernels.langevin_run(float(m.z_start), float(-p_inc), vel, step, force, sq,
                             0.0, dzt, noise, block)
        out[lo:hi] = block

    starts = range(0, n_traj, chunk)
    if threads == 1:
        for lo in starts:
            run(lo)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, starts))

    p = out[:, 1:4]
    cov = np.cov(p.T, ddof=1) if n_traj > 1 else np.zeros((3, 3))
    cov_i = np.cov(out[:, 4:7].T, ddof=1) if n_traj > 1 else np.zeros((3, 3))
    hists = {}
    for k, name in enumerate(("p_x", "p_y", "p_z")):
        counts, edges = np.histogram(p[:, k], bins=bins)
        hists[name] = (counts, edges)
    return LangevinResult(mean_p=p.mean(axis=0), cov_p=np.atleast_2d(cov),
                          cov_impulse=np.atleast_2d(cov_i), histograms=hists,
                          predicted=diffusion_scale * mean.delta_p2_accumulated,
                          final=out, n_traj=int(n_traj), n_steps=n_steps, dt=step,
                          seed=int(seed))
