"""Fresnel coefficients of the vacuum/dielectric interface and the
evanescent driving field.

Reduced units: k = 1, lengths in 1/k. The transverse wavenumber is
u = k_par / k; v = sqrt(1 - u^2) continues to i sqrt(u^2 - 1) above u = 1
(Im v > 0), and w = sqrt(n0^2 - u^2) is the normal wavenumber inside the
dielectric.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np

from .errors import InvalidDomain

__all__ = [
    "Interface",
    "EvanescentFieldConfig",
    "fresnel",
    "fresnel_identity_check",
    "field_profile",
    "helicity",
    "normal_wavenumbers",
]


@dataclass(frozen=True)
class Interface:
    """Flat boundary between vacuum (z > 0) and a dielectric of index n0."""

    n0: float = 1.5

    def __post_init__(self):
        if not np.isfinite(self.n0) or self.n0 < 1.0:
            raise InvalidDomain(f"n0 must be >= 1, got {self.n0}")


def normal_wavenumbers(n0, u):
    """Return (v, w) for transverse wavenumber ``u`` (scalar or array)."""
    u = np.asarray(u, dtype=float)
    v = np.where(u <= 1.0, np.sqrt(np.abs(1.0 - u * u)) + 0j,
                 1j * np.sqrt(np.abs(u * u - 1.0)))
    w = np.sqrt(np.maximum(n0 * n0 - u * u, 0.0))
    return v, w


def fresnel(interface, u, pol):
    """Fresnel amplitude coefficients seen from the vacuum side.

    Parameters
    ----------
    interface : Interface
    u : float or array_like
        Transverse wavenumber in [0, n0].
    pol : {"TE", "TM"}

    Returns
    -------
    r, t : complex or ndarray
        Reflection and transmission amplitudes,
        r_TE = (v - w)/(v + w), t_TE = 2w/(v + w),
        r_TM = (n0^2 v - w)/(n0^2 v + w), t_TM = 2 n0 w/(n0^2 v + w).
    """
    n0 = interface.n0
    ua = np.asarray(u, dtype=float)
    if np.any(ua < 0) or np.any(ua > n0 * (1 + 1e-15)):
        raise InvalidDomain(f"u must lie in [0, {n0}]")
    v, w = normal_wavenumbers(n0, ua)
    if pol == "TE":
        den = v + w
        r = (v - w) / den
        t = 2.0 * w / den
    elif pol == "TM":
        den = n0 * n0 * v + w
        r = (n0 * n0 * v - w) / den
        t = 2.0 * n0 * w / den
    else:
        raise InvalidDomain(f"pol must be 'TE' or 'TM', got {pol!r}")
    if np.ndim(u) == 0:
        return complex(r), complex(t)
    return r, t


def fresnel_identity_check(interface, u, pol):
    """Residual of the energy-flux identity obeyed by (r, t).

    Below the critical angle (u < 1) this is
    |sqrt(v^2/w^2) t^2 + r^2 - 1|; in the total-internal-reflection band
    (1 < u < n0) it is |sqrt((u^2 - 1)/(n0^2 - u^2)) |t|^2 - 2 Im r|.
    """
    n0 = interface.n0
    if u == 1.0:
        raise InvalidDomain("identity undefined at u = 1")
    r, t = fresnel(interface, u, pol)
    if n0 == 1.0 and u < 1.0:
        return abs(t * t + r * r - 1.0)
    w2 = n0 * n0 - u * u
    if u < 1.0:
        return abs(np.sqrt((1.0 - u * u) / w2) * t * t + r * r - 1.0)
    if u >= n0:
        raise InvalidDomain("identity undefined at u >= n0")
    return abs(np.sqrt((u * u - 1.0) / w2) * abs(t) ** 2 - 2.0 * r.imag)


_PRESETS = ("TE", "TM", "CIRC", "CUSTOM")


@dataclass(frozen=True)
class EvanescentFieldConfig:
    """Geometry and strength of the evanescent driving wave.

    The field is xi0 exp(-kappa z + i Q x) with Q^2 - kappa^2 = 1, so only
    one of ``kappa`` / ``Q`` is independent. Build instances with
    :meth:`from_kappa` or :meth:`from_Q`.

    Attributes
    ----------
    kappa, Q : float
        Decay and propagation constants (units of k).
    xi0 : ndarray, shape (3,)
        Complex polarization; presets are not normalized.
    polarization : str
        ``"TE"``, ``"TM"``, ``"CIRC"`` or ``"CUSTOM"``.
    detuning_ratio : float
        Signed laser detuning Delta / Gamma_inf. Positive detuning gives a
        repulsive dipole potential.
    s0 : float
        Saturation parameter; values >= 0.1 trigger a warning.
    """

    kappa: float
    Q: float
    xi0: np.ndarray = field(repr=False)
    polarization: str = "CUSTOM"
    detuning_ratio: float = 50.0
    s0: float = 0.01

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidDomain("kappa must be > 0")
        if abs(self.Q * self.Q - self.kappa * self.kappa - 1.0) > 1e-12 * max(1.0, self.Q * self.Q):
            raise InvalidDomain("Q^2 - kappa^2 must equal 1")
        if not self.Q > 1.0:
            raise InvalidDomain("Q must exceed 1")
        xi = np.asarray(self.xi0, dtype=complex).reshape(3)
        object.__setattr__(self, "xi0", xi)
        if self.polarization not in _PRESETS:
            raise InvalidDomain(f"unknown polarization {self.polarization!r}")
        if not self.s0 > 0:
            raise InvalidDomain("s0 must be > 0")
        if self.s0 >= 0.1:
            warnings.warn(f"s0 = {self.s0} is not small; the low-saturation "
                          "treatment may be inaccurate", RuntimeWarning, stacklevel=3)
        if self.detuning_ratio == 0:
            raise InvalidDomain("detuning_ratio must be nonzero")

    @staticmethod
    def preset_xi(polarization, kappa, Q, xi0=None):
        """Polarization vector of a preset (k = 1)."""
        te = np.array([0, 1, 0], dtype=complex)
        tm = np.array([1j * kappa, 0, -Q], dtype=complex)
        if polarization == "TE":
            return te
        if polarization == "TM":
            return tm
        if polarization == "CIRC":
            return tm + 1j * te
        if polarization == "CUSTOM":
            if xi0 is None:
                raise InvalidDomain("CUSTOM polarization requires xi0")
            return np.asarray(xi0, dtype=complex)
        raise InvalidDomain(f"unknown polarization {polarization!r}")

    @classmethod
    def from_kappa(cls, kappa, polarization="TE", xi0=None, detuning_ratio=50.0, s0=0.01):
        """Build from the decay constant; Q = sqrt(1 + kappa^2)."""
        Q = float(np.sqrt(1.0 + kappa * kappa))
        return cls(kappa=float(kappa), Q=Q, xi0=cls.preset_xi(polarization, kappa, Q, xi0),
                   polarization=polarization, detuning_ratio=detuning_ratio, s0=s0)

    @classmethod
    def from_Q(cls, Q, polarization="TE", xi0=None, detuning_ratio=50.0, s0=0.01):
        """Build from the propagation constant; kappa = sqrt(Q^2 - 1)."""
        if not Q > 1.0:
            raise InvalidDomain("Q must exceed 1")
        kappa = float(np.sqrt(Q * Q - 1.0))
        return cls(kappa=kappa, Q=float(Q), xi0=cls.preset_xi(polarization, kappa, Q, xi0),
                   polarization=polarization, detuning_ratio=detuning_ratio, s0=s0)

    @property
    def detuning_sign(self):
        return 1 if self.detuning_ratio > 0 else -1

    @property
    def xi_par2(self):
        """|xi0_x|^2 + |xi0_y|^2."""
        return float(abs(self.xi0[0]) ** 2 + abs(self.xi0[1]) ** 2)

    @property
    def xi_perp2(self):
        """|xi0_z|^2."""
        return float(abs(self.xi0[2]) ** 2)

    @property
    def xi2(self):
        return self.xi_par2 + self.xi_perp2

    def check_interface(self, interface):
        """Warn if the wave cannot be produced by total internal reflection
        in ``interface`` (requires Q <= n0).

        Only a warning: the n0 = 1 interface-off limit is a useful control
        even though no real dielectric is involved.
        """
        if self.Q > interface.n0 * (1 + 1e-12) and interface.n0 > 1.0:
            warnings.warn(
                f"Q = {self.Q:.6g} exceeds n0 = {interface.n0}; the evanescent "
                "wave is not realizable in this dielectric", RuntimeWarning, stacklevel=3)


def field_profile(cfg, r):
    """Driving-field amplitude xi0 exp(-kappa z + i Q x) at position ``r``."""
    x, _, z = (float(c) for c in r)
    if z < 0:
        raise InvalidDomain("z must be >= 0")
    return cfg.xi0 * np.exp(-cfg.kappa * z + 1j * cfg.Q * x)


def helicity(cfg):
    """Im(xi0* x xi0), a real 3-vector."""
    xi = cfg.xi0
    return np.cross(xi.conj(), xi).imag
