"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``EVMIRROR_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the NumPy implementation is used. ``BACKEND`` records the
choice.
"""

import os

from . import _fallback

_force_py = os.environ.get("EVMIRROR_PURE_PYTHON", "") not in ("", "0")

_impl = _fallback
BACKEND = "python"
if not _force_py:
    try:
        from . import _native as _impl  # noqa: F811
        BACKEND = "native"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _fallback

bessel_array = _impl.bessel_array
bessel_ratio_array = _impl.bessel_ratio_array
weight_integrand = _impl.weight_integrand
langevin_run = _impl.langevin_run

WEIGHT_COLUMNS = ("c0", "q0", "a1", "q2", "c0_s2", "q0_s2",
                  "c0_z", "q0_z", "c0_zz", "q0_zz")


def get_backend(name):
    """Return the kernel module ``"native"`` or ``"python"`` explicitly."""
    if name == "python":
        return _fallback
    if name == "native":
        from . import _native
        return _native
    raise ValueError(f"unknown backend {name!r}")
