"""Independent reference computations used by the tests.

Nothing here goes through the production Sommerfeld weights: the interface
tensor is rebuilt from the reflected / transmitted plane-wave modes with an
azimuthal trapezoid sum and scipy's quad_vec, and the free-space tensor from
its angular-spectrum definition.
"""

import numpy as np
from scipy.integrate import dblquad, quad_vec


def _modes(n0, u):
    v = np.sqrt(1 - u * u + 0j) if u <= 1 else 1j * np.sqrt(u * u - 1)
    w = np.sqrt(n0 * n0 - u * u)
    r_te = (v - w) / (v + w)
    r_tm = (n0 * n0 * v - w) / (n0 * n0 * v + w)
    t_te = 2 * w / (v + w)
    t_tm = 2 * n0 * w / (n0 * n0 * v + w)
    return v, r_te, r_tm, t_te, t_tm


def _azimuthal_sum(n0, u, s, z, kind, n_phi=64):
    v, rte, rtm, tte, ttm = _modes(n0, u)
    out = np.zeros((3, 3), complex)
    for ph in 2 * np.pi * np.arange(n_phi) / n_phi:
        c, sn = np.cos(ph), np.sin(ph)
        e_te = np.array([-sn, c, 0.0])
        phase = np.exp(-1j * u * (c * s[0] + sn * s[1]))
        if kind == "evanescent":
            e_tm = np.array([v * c, v * sn, -u])
            for e, t in ((e_te, tte), (e_tm, ttm)):
                out += np.outer(e, e.conj()) * abs(t) ** 2 * phase * np.exp(2j * v * z)
        else:
            e_down = np.array([v * c, v * sn, u])
            e_up = -np.array([v * c, v * sn, -u])
            for ed, eu, r in ((e_te, e_te, rte), (e_down, e_up, rtm)):
                out += (np.outer(ed, eu.conj()) * np.conj(r) * np.exp(-2j * v * z)
                        + np.outer(eu, ed.conj()) * r * np.exp(2j * v * z)) * phase
    return out * 2 * np.pi / n_phi


def interface_tensor_direct(n0, z, s):
    """C_int(z; s) from the mode expansion (s in the surface plane)."""
    big_t = np.sqrt(n0 * n0 - 1)

    def prop(th):
        return (np.sin(th) * _azimuthal_sum(n0, np.sin(th), s, z, "propagating")).ravel()

    def evan(ps):
        u = np.sqrt(1 + (big_t * np.sin(ps)) ** 2)
        return (big_t * np.sin(ps) * _azimuthal_sum(n0, u, s, z, "evanescent")).ravel()

    a = quad_vec(prop, 0, np.pi / 2, epsabs=1e-13, epsrel=1e-12)[0]
    b = quad_vec(evan, 0, np.pi / 2, epsabs=1e-13, epsrel=1e-12)[0] if n0 > 1 else 0
    return (3 / (8 * np.pi) * (a + b)).reshape(3, 3)


def free_space_tensor_angular(s):
    """(3 / 8 pi) int dOmega (1 - k k) exp(i k.s) by 2-D quadrature."""
    s = np.asarray(s, float)
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(i, 3):
            def f(ph, th, i=i, j=j):
                k = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
                return ((i == j) - k[i] * k[j]) * np.cos(k @ s) * np.sin(th)
            val = dblquad(f, 0, np.pi, 0, 2 * np.pi, epsabs=1e-13, epsrel=1e-12)[0]
            out[i, j] = out[j, i] = 3 / (8 * np.pi) * val
    return out


def free_space_scalar(cfg, z):
    """Free-space rate, force and diffusion of a scalar atom in the wave.

    Rate |xi|^2 e, force Q |xi|^2 e e_x, departure D_zz = kappa^2 |xi|^2 e / 2,
    feeding D = e [Q^2 |xi|^2 / 2 e_x e_x + |xi|^2 / 5 delta - Re(xi* xi) / 10].
    """
    xi = cfg.xi0
    e = np.exp(-2 * cfg.kappa * z)
    x2 = float(np.vdot(xi, xi).real)
    force = np.array([cfg.Q * x2 * e, 0.0, 0.0])
    feed = (0.2 * x2 * np.eye(3) - 0.1 * np.outer(xi.conj(), xi).real) * e
    feed[0, 0] += 0.5 * cfg.Q ** 2 * x2 * e
    dep = np.zeros((3, 3))
    dep[2, 2] = 0.5 * cfg.kappa ** 2 * x2 * e
    return x2 * e, force, feed + dep


_SIG = [np.array([[0, 1], [1, 0]], complex), np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]], complex)]


def _lowering(xi, beta, alpha):
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out.append(beta * xi[i] * np.eye(2) + 1j * alpha * (_SIG[j] * xi[k] - _SIG[k] * xi[j]))
    return out


def pumping_rhs_matrix(xi, beta, alpha, c_diag, J, detuning):
    """dJ/dt from the 2x2 master equation with jump operators b_i.

    H = detuning b^+.xi, dissipator sum_i c_i D[b_i]; returns
    (dJ/dt, d Tr W/dt).
    """
    W = 0.5 * (np.eye(2) + sum(J[m] * _SIG[m] for m in range(3)))
    bm = _lowering(xi, beta, alpha)
    bp = [b.conj().T for b in bm]
    H = detuning * sum(bp[i] * xi[i] for i in range(3))
    dW = -1j * (H @ W - W @ H)
    for i in range(3):
        dW += c_diag[i] * (bm[i] @ W @ bp[i] - 0.5 * (bp[i] @ bm[i] @ W + W @ bp[i] @ bm[i]))
    return np.array([np.trace(s @ dW).real for s in _SIG]), np.trace(dW)
