# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Bessel functions, Sommerfeld weight integrands and
Langevin stepping. The NumPy twin lives in ``_fallback.py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, exp, fabs, M_PI

cnp.import_array()

DEF SWITCH = 14.0
DEF NSERIES = 60
DEF NASYMP = 30


cdef double _series(double x, int n) noexcept nogil:
    # sum_k (-x^2/4)^k / (k! (k+n)!), i.e. J_n(x) / (x/2)^n
    cdef double q = -0.25 * x * x
    cdef double term = 1.0, total
    cdef int k
    for k in range(1, n + 1):
        term /= k
    total = term
    for k in range(1, NSERIES):
        term *= q / (k * (k + n))
        total += term
        if fabs(term) < 1e-18 * fabs(total):
            break
    return total


cdef double _hankel(double x, int n) noexcept nogil:
    cdef double mu = 4.0 * n * n
    cdef double a = 1.0, p = 1.0, q = 0.0, chi
    cdef int k
    for k in range(1, NASYMP):
        a *= (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)
        if k % 4 == 1:
            q += a
        elif k % 4 == 2:
            p -= a
        elif k % 4 == 3:
            q -= a
        else:
            p += a
        if fabs(a) < 1e-17:
            break
    chi = x - (0.5 * n + 0.25) * M_PI
    return sqrt(2.0 / (M_PI * x)) * (p * cos(chi) - q * sin(chi))


cdef double bessel(int n, double x) noexcept nogil:
    if x < 0.0:
        return (-1.0) ** n * bessel(n, -x)
    if x < SWITCH:
        if n == 0:
            return _series(x, 0)
        elif n == 1:
            return 0.5 * x * _series(x, 1)
        return 0.25 * x * x * _series(x, 2)
    return _hankel(x, n)


cdef double bessel_ratio(int n, double x) noexcept nogil:
    # J1(x)/x or J2(x)/x^2
    x = fabs(x)
    if x < SWITCH:
        return _series(x, n) / (2.0 ** n)
    return _hankel(x, n) / x ** n


def bessel_array(int n, double[::1] x):
    cdef Py_ssize_t i, m = x.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = bessel(n, x[i])
    return out


def bessel_ratio_array(int n, double[::1] x):
    cdef Py_ssize_t i, m = x.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = bessel_ratio(n, x[i])
    return out


cdef void _weight_node(double th, int seg, double n0, double z, double s,
                       double* out) noexcept nogil:
    cdef double n2 = n0 * n0
    cdef double u, u2, vr, w, t, big_t, e_re, j0, r1, r2, dj0, x
    cdef double complex mi, ma, rte, rtm, e, d1, gc, gq, g2, base_c, base_q
    cdef int c
    if seg == 0:
        u = sin(th)
        vr = cos(th)
        u2 = u * u
        w = sqrt((n2 - 1.0) + vr * vr)
        rte = (vr - w) / (vr + w)
        rtm = (n2 * vr - w) / (n2 * vr + w)
        e = cos(2.0 * z * vr) + 1j * sin(2.0 * z * vr)
        mi = u
        ma = u2 * u * vr
        d1 = 2j * vr
    else:
        big_t = sqrt(n2 - 1.0)
        if big_t == 0.0:
            for c in range(10):
                out[c] = 0.0
            return
        t = big_t * sin(th)
        w = big_t * cos(th)
        u2 = 1.0 + t * t
        u = sqrt(u2)
        rte = (t * t - w * w + 2j * t * w) / (big_t * big_t)
        rtm = (n2 * n2 * t * t - w * w + 2j * n2 * t * w) / (w * w + n2 * n2 * t * t)
        e_re = exp(-2.0 * z * t)
        e = e_re
        mi = -1j * big_t * cos(th)
        ma = u2 * t * big_t * cos(th)
        d1 = -2.0 * t
    x = s * u
    j0 = bessel(0, x)
    r1 = bessel_ratio(1, x)
    r2 = bessel_ratio(2, x)
    dj0 = -0.5 * u2 * r1
    gc = rte + (2.0 * u2 - 1.0) * rtm
    gq = -rte + (u2 + 1.0) * rtm
    g2 = rte - (u2 - 1.0) * rtm
    base_c = 0.5 * mi * gc * e
    base_q = 0.75 * mi * gq * e
    out[0] = (base_c * j0).real
    out[1] = (base_q * j0).real
    out[2] = (1.5 * ma * r1 * rtm * e).imag
    out[3] = (1.5 * mi * u2 * r2 * g2 * e).real
    out[4] = (base_c * dj0).real
    out[5] = (base_q * dj0).real
    out[6] = (base_c * j0 * d1).real
    out[7] = (base_q * j0 * d1).real
    out[8] = (base_c * j0 * d1 * d1).real
    out[9] = (base_q * j0 * d1 * d1).real


def weight_integrand(double[::1] theta, int segment, double n0, double z, double s):
    """Integrand columns (c0, q0, a, q2, c0_s2, q0_s2, c0_z, q0_z, c0_zz,
    q0_zz) at the substituted angle nodes ``theta``."""
    cdef Py_ssize_t i, m = theta.shape[0]
    out = np.empty((m, 10))
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            _weight_node(theta[i], segment, n0, z, s, &o[i, 0])
    return out


cdef inline double _interp(const double[:, ::1] tab, Py_ssize_t col, double z,
                           double z0, double dz, Py_ssize_t nz) noexcept nogil:
    cdef double f = (z - z0) / dz
    cdef Py_ssize_t i
    if f < 0.0:
        f = 0.0
    if f >= nz - 1:
        return 0.0
    i = <Py_ssize_t> f
    f -= i
    return (1.0 - f) * tab[i, col] + f * tab[i + 1, col]


def langevin_run(double z_start, double pz0, double vel, double dt,
                 const double[:, ::1] force, const double[:, ::1] sqrt2d,
                 double z_tab0, double dz_tab,
                 const double[:, :, ::1] noise, double[:, ::1] out):
    """Symplectic Euler-Maruyama over tabulated force / sqrt(2D).

    ``noise`` has shape (n_traj, n_steps, 3); ``out`` receives
    (z, px, py, pz, Ix, Iy, Iz) where I is the accumulated stochastic
    impulse."""
    cdef Py_ssize_t n_traj = noise.shape[0], n_steps = noise.shape[1]
    cdef Py_ssize_t nz = force.shape[0]
    cdef Py_ssize_t j, k, a, b
    cdef double z, p[3], imp[3], kick[3], sq = sqrt(dt)
    with nogil:
        for j in range(n_traj):
            z = z_start
            p[0] = 0.0
            p[1] = 0.0
            p[2] = pz0
            imp[0] = 0.0
            imp[1] = 0.0
            imp[2] = 0.0
            for k in range(n_steps):
                for a in range(3):
                    kick[a] = 0.0
                    for b in range(3):
                        kick[a] += _interp(sqrt2d, 3 * a + b, z, z_tab0, dz_tab, nz) * noise[j, k, b]
                    kick[a] *= sq
                    p[a] += _interp(force, a, z, z_tab0, dz_tab, nz) * dt + kick[a]
                    imp[a] += kick[a]
                z += vel * p[2] * dt
            out[j, 0] = z
            out[j, 1] = p[0]
            out[j, 2] = p[1]
            out[j, 3] = p[2]
            out[j, 4] = imp[0]
            out[j, 5] = imp[1]
            out[j, 6] = imp[2]
