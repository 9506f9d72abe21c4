"""Vacuum field correlation tensor above the interface.

The normalized two-point correlation C^{ij}(r; s) = C^{ij}(r - s/2, r + s/2)
splits into the free-space part C_inf(s) and an interface part that only
depends on the height z and the in-plane separation s_par:

    C_int = c0 delta + q0 (zz - delta/3) + a1 (z^i s^j - s^i z^j)
            + q2 (s^i s^j - s_par^2 (delta - zz)/2)

The weights c0, q0, a1, q2 are Sommerfeld integrals evaluated with the
compiled kernel; the same pass yields their derivatives in s_par^2 and in z,
obtained by differentiating under the integral sign.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .optics import Interface
from .quadrature import DEFAULT_SPEC, QuadratureSpec, gauss_kronrod
from .errors import InvalidDomain

__all__ = [
    "CorrelationWeights",
    "CorrelationTaylor",
    "weights",
    "weight_derivatives",
    "one_point_rates",
    "free_space_tensor",
    "interface_tensor",
    "two_point_tensor",
    "correlation_taylor",
    "clear_cache",
]

_HALF_PI = 0.5 * np.pi
_Q = 1e-12


@dataclass(frozen=True)
class CorrelationWeights:
    """Interface weights at (z, s_par^2); all vanish for n0 = 1."""

    c0: float
    q0: float
    a1: float
    q2: float

    def as_array(self):
        return np.array([self.c0, self.q0, self.a1, self.q2])


@lru_cache(maxsize=16384)
def _weight_vector_cached(n0, zq, sq, rel_tol, abs_tol, max_sub):
    z = zq * _Q
    s = sq * _Q
    spec = QuadratureSpec(rel_tol, abs_tol, max_sub)
    if n0 == 1.0:
        return np.zeros(10)
    total = np.zeros(10)
    for segment in (0, 1):
        def f(th, segment=segment):
            return kernels.weight_integrand(np.ascontiguousarray(th), segment, n0, z, s)
        val, _ = gauss_kronrod(f, 0.0, _HALF_PI, spec)
        total += val
    total.setflags(write=False)
    return total


def _weight_vector(n0, z, s, spec):
    if z < 0:
        raise InvalidDomain("z must be >= 0")
    if s < 0:
        raise InvalidDomain("s_par must be >= 0")
    return _weight_vector_cached(float(n0), int(round(z / _Q)), int(round(s / _Q)),
                                 spec.rel_tol, spec.abs_tol, spec.max_subdivisions)


def clear_cache():
    """Drop memoized weight evaluations."""
    _weight_vector_cached.cache_clear()


def weights(interface, z, s_par=0.0, spec=DEFAULT_SPEC):
    """Interface weights c0, q0, a1, q2 at height ``z`` and in-plane
    separation ``s_par`` (both in units of 1/k).

    Examples
    --------
    >>> weights(Interface(1.0), 0.5).as_array()
    array([0., 0., 0., 0.])
    """
    vec = _weight_vector(interface.n0, z, s_par, spec)
    return CorrelationWeights(*(float(v) for v in vec[:4]))


def weight_derivatives(interface, z, s_par=0.0, spec=DEFAULT_SPEC):
    """All ten integrals as a dict keyed by ``kernels.WEIGHT_COLUMNS``.

    ``*_s2`` entries are derivatives with respect to s_par^2, ``*_z`` and
    ``*_zz`` first and second derivatives with respect to z.
    """
    vec = _weight_vector(interface.n0, z, s_par, spec)
    return dict(zip(kernels.WEIGHT_COLUMNS, (float(v) for v in vec)))


def one_point_rates(interface, z, spec=DEFAULT_SPEC):
    """Normalized dipole damping rates (c_par, c_perp) at height ``z``."""
    w = weights(interface, z, 0.0, spec)
    return 1.0 + w.c0 - w.q0 / 3.0, 1.0 + w.c0 + 2.0 * w.q0 / 3.0


def _free_radial(x):
    """f1, f2 / x^2 of C_inf = f1 delta + f2 s_hat s_hat, stable at small x."""
    if x < 0.5:
        y = x * x
        f1 = 1 - y / 5 + 3 * y**2 / 280 - y**3 / 3780 + y**4 / 266112 - y**5 / 28828800
        g2 = 1 / 10 - y / 140 + y**2 / 5040 - y**3 / 332640 + y**4 / 34594560 - y**5 / 5189184000
        return f1, g2
    sx, cx = np.sin(x), np.cos(x)
    f1 = 1.5 * (sx / x + cx / x**2 - sx / x**3)
    f2 = 1.5 * (-sx / x - 3 * cx / x**2 + 3 * sx / x**3)
    return f1, f2 / (x * x)


def free_space_tensor(s, order="exact"):
    """Free-space correlation tensor C_inf(s), a real 3x3 array.

    Parameters
    ----------
    s : array_like, shape (3,)
        Separation in units of 1/k.
    order : {"exact", "taylor2"}
        Closed form, or its expansion (1 - s^2/6) delta + (s s - s^2 delta/3)/10
        through second order.
    """
    s = np.asarray(s, dtype=float).reshape(3)
    s2 = float(s @ s)
    if order == "taylor2":
        return (1.0 - s2 / 6.0) * np.eye(3) + 0.1 * (np.outer(s, s) - s2 * np.eye(3) / 3.0)
    if order != "exact":
        raise InvalidDomain(f"unknown order {order!r}")
    f1, g2 = _free_radial(np.sqrt(s2))
    return f1 * np.eye(3) + g2 * np.outer(s, s)


_ZZ = np.diag([0.0, 0.0, 1.0])
_EZ = np.array([0.0, 0.0, 1.0])


def interface_tensor(interface, z, s, spec=DEFAULT_SPEC):
    """Interface part C_int(z; s_par) assembled from the four weights."""
    s = np.asarray(s, dtype=float).reshape(3)
    sp = np.array([s[0], s[1], 0.0])
    sp2 = float(sp @ sp)
    w = weights(interface, z, np.sqrt(sp2), spec)
    eye = np.eye(3)
    return (w.c0 * eye + w.q0 * (_ZZ - eye / 3.0)
            + w.a1 * (np.outer(_EZ, sp) - np.outer(sp, _EZ))
            + w.q2 * (np.outer(sp, sp) - 0.5 * sp2 * (eye - _ZZ)))


def two_point_tensor(interface, z, s, spec=DEFAULT_SPEC):
    """Full C(z; s) = C_inf(s) + C_int(z; s_par) between r - s/2 and r + s/2."""
    return free_space_tensor(s) + interface_tensor(interface, z, s, spec)


@dataclass(frozen=True)
class CorrelationTaylor:
    """Second-order Taylor data of C(z; s) around s = 0.

    Attributes
    ----------
    C0 : ndarray (3, 3)
        diag(c_par, c_par, c_perp).
    D1 : ndarray (3, 3, 3)
        D1[i, j, k] = dC^{ij}/ds_k. C is real, so D1 is stored as is.
    D2 : ndarray (3, 3, 3, 3)
        D2[i, j, k, l] = d^2 C^{ij}/ds_k ds_l.
    c_par, c_perp : float
        One-point rates.
    c_par_z, c_perp_z, c_par_zz, c_perp_zz : float
        Their first and second z-derivatives.
    weights : CorrelationWeights
        Interface weights at s = 0.
    """

    z: float
    C0: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    c_par: float
    c_perp: float
    c_par_z: float
    c_perp_z: float
    c_par_zz: float
    c_perp_zz: float
    weights: CorrelationWeights


def _free_d2():
    d = np.eye(3)
    return (-0.4 * np.einsum("ij,kl->ijkl", d, d)
            + 0.1 * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d)))


_FREE_D2 = _free_d2()


def correlation_taylor(interface, z, spec=DEFAULT_SPEC):
    """Assemble C0, D1, D2 at height ``z`` from the Sommerfeld integrals."""
    wd = weight_derivatives(interface, z, 0.0, spec)
    c0, q0, a1, q2 = wd["c0"], wd["q0"], wd["a1"], wd["q2"]
    d = np.eye(3)
    pl = np.diag([1.0, 1.0, 0.0])
    c_par = 1.0 + c0 - q0 / 3.0
    c_perp = 1.0 + c0 + 2.0 * q0 / 3.0
    C0 = np.diag([c_par, c_par, c_perp])

    D1 = np.zeros((3, 3, 3))
    for k in (0, 1):
        for i in range(3):
            for j in range(3):
                D1[i, j, k] = a1 * (d[2, i] * d[j, k] - d[i, k] * d[2, j])

    d_int = (2.0 * wd["c0_s2"] * np.einsum("kl,ij->ijkl", pl, d)
             + 2.0 * wd["q0_s2"] * np.einsum("kl,ij->ijkl", pl, _ZZ - d / 3.0)
             + q2 * (np.einsum("ik,jl->ijkl", pl, pl) + np.einsum("il,jk->ijkl", pl, pl)
                     - np.einsum("kl,ij->ijkl", pl, d - _ZZ)))
    D2 = _FREE_D2 + d_int

    for arr in (C0, D1, D2):
        arr.setflags(write=False)
    return CorrelationTaylor(
        z=float(z), C0=C0, D1=D1, D2=D2, c_par=c_par, c_perp=c_perp,
        c_par_z=wd["c0_z"] - wd["q0_z"] / 3.0,
        c_perp_z=wd["c0_z"] + 2.0 * wd["q0_z"] / 3.0,
        c_par_zz=wd["c0_zz"] - wd["q0_zz"] / 3.0,
        c_perp_zz=wd["c0_zz"] + 2.0 * wd["q0_zz"] / 3.0,
        weights=CorrelationWeights(c0, q0, a1, q2),
    )


def free_space_taylor():
    """Taylor data of C_inf alone (C0 = identity, D1 = 0)."""
    return np.eye(3), np.zeros((3, 3, 3)), _FREE_D2.copy()
