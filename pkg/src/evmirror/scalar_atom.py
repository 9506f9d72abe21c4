"""Observables of a J_g = 0 -> J_e = 1 atom in the evanescent wave.

Reduced units: rates in Gamma'_inf, forces in hbar k Gamma'_inf, diffusion
in hbar^2 k^2 Gamma'_inf, lengths in 1/k.

With A(z; s) = C^{ij}(z; s) xi0_i* xi0_j exp(-2 kappa z + i Q s_x):

* Gamma'(z) = A(z; 0)
* F_k = -i dA/ds_k at s = 0 (feeding term; the departure term vanishes)
* D^{kl} = (1/8) d^2 Gamma'/dz^2 delta^{kz} delta^{lz} - (1/2) d^2 A/ds_k ds_l
"""

from dataclasses import dataclass, field

import numpy as np

from .correlations import correlation_taylor, free_space_taylor
from .errors import InvalidDomain
from .optics import field_profile
from .quadrature import DEFAULT_SPEC

__all__ = [
    "ForceDiffusionResult",
    "fluorescence_rate",
    "radiation_pressure",
    "diffusion_tensor",
    "free_space_diffusion",
    "observables",
    "excited_state_diagnostics",
    "UNITS",
]

UNITS = {
    "z": "1/k",
    "gamma_prime": "Gamma'_inf",
    "force": "hbar k Gamma'_inf",
    "diffusion": "hbar^2 k^2 Gamma'_inf",
}


@dataclass(frozen=True)
class ForceDiffusionResult:
    """Rate, force and diffusion tensor at one height, with term breakdown.

    ``breakdown`` holds ``force_plane_wave_part``, ``force_reflected_part``,
    ``D_depart``, ``D_depart_free``, ``D_depart_interface``, ``D_feed``,
    ``D_feed_free`` (feeding term with C_inf only), ``D_free_reference``
    (see :func:`free_space_diffusion`) and the ``taylor`` data used.
    """

    z: float
    gamma_prime: float
    force: np.ndarray
    diffusion: np.ndarray
    breakdown: dict = field(default_factory=dict)
    units: dict = field(default_factory=lambda: dict(UNITS))


def _check(cfg, interface, z):
    if z < 0:
        raise InvalidDomain("z must be >= 0")
    cfg.check_interface(interface)


def _contract(t, xi):
    # t^{ij...} xi_i* xi_j
    return np.einsum("ij...,i,j->...", t, xi.conj(), xi)


def _gamma(taylor, cfg):
    return taylor.c_par * cfg.xi_par2 + taylor.c_perp * cfg.xi_perp2


def _feed_force(C0, D1, cfg):
    xi = cfg.xi0
    plane = np.array([cfg.Q * _contract(C0, xi).real, 0.0, 0.0])
    refl = (-1j * _contract(D1, xi)).real
    return plane, refl


def _feed_diffusion(C0, D1, D2, cfg):
    xi = cfg.xi0
    Q = cfg.Q
    a2 = _contract(D2, xi)
    a1 = _contract(D1, xi)
    a0 = _contract(C0, xi)
    ex = np.array([1.0, 0.0, 0.0])
    d2a = a2 + 1j * Q * (np.outer(ex, a1) + np.outer(a1, ex)) - Q * Q * a0 * np.outer(ex, ex)
    return -0.5 * d2a.real


def fluorescence_rate(cfg, interface, z, spec=DEFAULT_SPEC):
    """Gamma'(z) = (c_par |xi_par|^2 + c_perp |xi_perp|^2) exp(-2 kappa z)."""
    _check(cfg, interface, z)
    t = correlation_taylor(interface, z, spec)
    return float(_gamma(t, cfg) * np.exp(-2.0 * cfg.kappa * z))


def radiation_pressure(cfg, interface, z, spec=DEFAULT_SPEC):
    """Radiation pressure force and its two parts.

    Returns
    -------
    force : ndarray (3,)
    breakdown : dict
        ``force_plane_wave_part`` = Gamma'(z) Q e_x and
        ``force_reflected_part`` = 2 a1 Im(xi_par xi_perp*) exp(-2 kappa z).
    """
    r = observables(cfg, interface, z, spec)
    return r.force, {k: r.breakdown[k] for k in ("force_plane_wave_part", "force_reflected_part")}


def diffusion_tensor(cfg, interface, z, spec=DEFAULT_SPEC):
    """Momentum diffusion tensor D = D_depart + D_feed and its parts."""
    r = observables(cfg, interface, z, spec)
    keys = ("D_depart", "D_depart_free", "D_depart_interface", "D_feed", "D_feed_free",
            "D_free_reference")
    return r.diffusion, {k: r.breakdown[k] for k in keys}


def free_space_diffusion(cfg, z):
    """Free-space reference diffusion tensor.

    An atom scattering at the free-space rate |xi0|^2 exp(-2 kappa z) of a
    plane wave along e_x: isotropic spontaneous recoil (trace 1/2 per
    scattered photon) plus absorption recoil hbar k (1/2 along e_x). Both
    the interface and the curvature of the driving field are neglected.
    Trace = |xi0|^2 exp(-2 kappa z).
    """
    C0, D1, D2 = free_space_taylor()
    ez = np.exp(-2.0 * cfg.kappa * z)
    emit = -0.5 * _contract(D2, cfg.xi0).real
    absorb = np.zeros((3, 3))
    absorb[0, 0] = 0.5 * cfg.xi2
    return (emit + absorb) * ez


def observables(cfg, interface, z, spec=DEFAULT_SPEC):
    """Rate, force and diffusion at height ``z`` in one pass."""
    _check(cfg, interface, z)
    t = correlation_taylor(interface, z, spec)
    kap = cfg.kappa
    ez = np.exp(-2.0 * kap * z)
    xp2, xn2 = cfg.xi_par2, cfg.xi_perp2

    gam = _gamma(t, cfg)
    plane, refl = _feed_force(t.C0, t.D1, cfg)

    g1 = t.c_par_z * xp2 + t.c_perp_z * xn2
    g2 = t.c_par_zz * xp2 + t.c_perp_zz * xn2
    d2gamma = ez * (g2 - 4.0 * kap * g1 + 4.0 * kap * kap * gam)
    d_dep = np.zeros((3, 3))
    d_dep[2, 2] = d2gamma / 8.0
    dep_free = 0.5 * kap * kap * cfg.xi2 * ez

    d_feed = _feed_diffusion(t.C0, t.D1, t.D2, cfg) * ez
    C0f, D1f, D2f = free_space_taylor()
    d_feed_free = _feed_diffusion(C0f, D1f, D2f, cfg) * ez
    d_free_ref = free_space_diffusion(cfg, z)
    D = d_dep + d_feed
    D = 0.5 * (D + D.T)

    breakdown = {
        "force_plane_wave_part": plane * ez,
        "force_reflected_part": refl * ez,
        "D_depart": d_dep,
        "D_depart_free": dep_free,
        "D_depart_interface": d_dep[2, 2] - dep_free,
        "D_feed": d_feed,
        "D_feed_free": d_feed_free,
        "D_free_reference": d_free_ref,
        "taylor": t,
    }
    return ForceDiffusionResult(z=float(z), gamma_prime=float(gam * ez),
                                force=(plane + refl) * ez, diffusion=D, breakdown=breakdown)


def excited_state_diagnostics(cfg, z, x=0.0):
    """Size of the adiabatically eliminated excited-state quantities.

    Returns
    -------
    dict
        ``excited_fraction`` = (s0/2)|xi(r)|^2 and ``coherence_scale`` =
        sqrt(s0/2)|xi(r)|, the leading-order optical coherence amplitude.
    """
    xi = field_profile(cfg, (x, 0.0, z))
    amp2 = float(np.vdot(xi, xi).real)
    return {"excited_fraction": 0.5 * cfg.s0 * amp2,
            "coherence_scale": float(np.sqrt(0.5 * cfg.s0 * amp2))}
