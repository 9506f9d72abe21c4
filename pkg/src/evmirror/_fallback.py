"""Pure NumPy twin of the compiled kernels in ``_native.pyx``.

Same algorithms and same switch points, so results agree to rounding.
"""

import numpy as np

SWITCH = 14.0
NSERIES = 60
NASYMP = 30


def _series(x, n):
    q = -0.25 * x * x
    term = np.full_like(x, 1.0)
    for k in range(1, n + 1):
        term = term / k
    total = term.copy()
    for k in range(1, NSERIES):
        term = term * q / (k * (k + n))
        total += term
        if np.all(np.abs(term) < 1e-18 * np.abs(total)):
            break
    return total


def _hankel(x, n):
    mu = 4.0 * n * n
    a = np.ones_like(x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    for k in range(1, NASYMP):
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        r = k % 4
        if r == 1:
            q += a
        elif r == 2:
            p -= a
        elif r == 3:
            q -= a
        else:
            p += a
        if np.all(np.abs(a) < 1e-17):
            break
    chi = x - (0.5 * n + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _split(x, small, large):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    lo = x < SWITCH
    if lo.any():
        out[lo] = small(x[lo])
    if (~lo).any():
        out[~lo] = large(x[~lo])
    return out


def bessel_array(n, x):
    x = np.asarray(x, dtype=float)
    sign = np.where(x < 0, (-1.0) ** n, 1.0)
    ax = np.abs(x)
    prefac = {0: lambda y: 1.0, 1: lambda y: 0.5 * y, 2: lambda y: 0.25 * y * y}[n]
    return sign * _split(ax, lambda y: prefac(y) * _series(y, n), lambda y: _hankel(y, n))


def bessel_ratio_array(n, x):
    ax = np.abs(np.asarray(x, dtype=float))
    return _split(ax, lambda y: _series(y, n) / 2.0 ** n, lambda y: _hankel(y, n) / y ** n)


def weight_integrand(theta, segment, n0, z, s):
    """See ``_native.weight_integrand``."""
    th = np.asarray(theta, dtype=float)
    n2 = n0 * n0
    if segment == 0:
        u = np.sin(th)
        vr = np.cos(th)
        u2 = u * u
        w = np.sqrt((n2 - 1.0) + vr * vr)
        rte = ((vr - w) / (vr + w)).astype(complex)
        rtm = ((n2 * vr - w) / (n2 * vr + w)).astype(complex)
        e = np.exp(2j * z * vr)
        mi = u.astype(complex)
        ma = (u2 * u * vr).astype(complex)
        d1 = 2j * vr
    else:
        big_t = np.sqrt(n2 - 1.0)
        if big_t == 0.0:
            return np.zeros((th.size, 10))
        t = big_t * np.sin(th)
        w = big_t * np.cos(th)
        u2 = 1.0 + t * t
        u = np.sqrt(u2)
        rte = (t * t - w * w + 2j * t * w) / (big_t * big_t)
        rtm = (n2 * n2 * t * t - w * w + 2j * n2 * t * w) / (w * w + n2 * n2 * t * t)
        e = np.exp(-2.0 * z * t).astype(complex)
        mi = -1j * big_t * np.cos(th)
        ma = (u2 * t * big_t * np.cos(th)).astype(complex)
        d1 = (-2.0 * t).astype(complex)
    x = s * u
    j0 = bessel_array(0, x)
    r1 = bessel_ratio_array(1, x)
    r2 = bessel_ratio_array(2, x)
    dj0 = -0.5 * u2 * r1
    gc = rte + (2.0 * u2 - 1.0) * rtm
    gq = -rte + (u2 + 1.0) * rtm
    g2 = rte - (u2 - 1.0) * rtm
    base_c = 0.5 * mi * gc * e
    base_q = 0.75 * mi * gq * e
    out = np.empty((th.size, 10))
    out[:, 0] = (base_c * j0).real
    out[:, 1] = (base_q * j0).real
    out[:, 2] = (1.5 * ma * r1 * rtm * e).imag
    out[:, 3] = (1.5 * mi * u2 * r2 * g2 * e).real
    out[:, 4] = (base_c * dj0).real
    out[:, 5] = (base_q * dj0).real
    out[:, 6] = (base_c * j0 * d1).real
    out[:, 7] = (base_q * j0 * d1).real
    out[:, 8] = (base_c * j0 * d1 * d1).real
    out[:, 9] = (base_q * j0 * d1 * d1).real
    return out


def _interp(tab, z, z0, dz):
    nz = tab.shape[0]
    f = np.maximum((z - z0) / dz, 0.0)
    inside = f < nz - 1
    i = np.minimum(f.astype(np.int64), nz - 2)
    f = f - i
    val = (1.0 - f)[:, None] * tab[i] + f[:, None] * tab[i + 1]
    val[~inside] = 0.0
    return val


def langevin_run(z_start, pz0, vel, dt, force, sqrt2d, z_tab0, dz_tab, noise, out):
    """See ``_native.langevin_run``; vectorised over trajectories."""
    n_traj, n_steps, _ = noise.shape
    z = np.full(n_traj, z_start)
    p = np.zeros((n_traj, 3))
    p[:, 2] = pz0
    imp = np.zeros((n_traj, 3))
    sq = np.sqrt(dt)
    for k in range(n_steps):
        lmat = _interp(sqrt2d, z, z_tab0, dz_tab).reshape(n_traj, 3, 3)
        kick = np.einsum("tab,tb->ta", lmat, noise[:, k, :]) * sq
        p += _interp(force, z, z_tab0, dz_tab) * dt + kick
        imp += kick
        z = z + vel * p[:, 2] * dt
    out[:, 0] = z
    out[:, 1:4] = p
    out[:, 4:7] = imp
