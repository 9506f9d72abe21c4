import numpy as np
import pytest

from evmirror import kernels

native = pytest.importorskip("evmirror._native")
fallback = kernels.get_backend("python")


def test_backend_selected():
    assert kernels.BACKEND in ("native", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("order", [0, 1, 2])
def test_bessel_backends_agree(order):
    x = np.linspace(0, 80, 2001)
    np.testing.assert_allclose(native.bessel_array(order, x), fallback.bessel_array(order, x),
                               atol=1e-14)


@pytest.mark.parametrize("order", [1, 2])
def test_ratio_backends_agree(order):
    x = np.linspace(0, 40, 801)
    np.testing.assert_allclose(native.bessel_ratio_array(order, x),
                               fallback.bessel_ratio_array(order, x), atol=1e-15)


@pytest.mark.parametrize("segment", [0, 1])
@pytest.mark.parametrize("z,s", [(0.0, 0.0), (0.7, 1.3), (3.0, 0.2)])
def test_weight_integrand_backends_agree(segment, z, s):
    th = np.linspace(0, np.pi / 2, 31)
    a = native.weight_integrand(th, segment, 1.5, z, s)
    b = fallback.weight_integrand(th, segment, 1.5, z, s)
    assert a.shape == (31, 10)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)


def test_langevin_backends_agree():
    rng = np.random.default_rng(0)
    nz = 200
    z = np.linspace(0, 10, nz)
    force = np.zeros((nz, 3))
    force[:, 2] = 2 * 50 * np.exp(-2 * z)
    sq = np.zeros((nz, 9))
    sq[:, 0] = sq[:, 4] = sq[:, 8] = 0.3 * np.exp(-z)
    noise = rng.standard_normal((5, 400, 3))
    out_a = np.zeros((5, 7))
    out_b = np.zeros((5, 7))
    args = (8.0, -10.0, 1.0, 0.005, force, sq, 0.0, z[1] - z[0], noise)
    native.langevin_run(*args, out_a)
    fallback.langevin_run(*args, out_b)
    np.testing.assert_allclose(out_a, out_b, rtol=1e-12, atol=1e-12)
