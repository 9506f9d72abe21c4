"""Conversion of reduced results to SI units.

Reduced units use k = 2 pi / lambda and the free-space scattering rate
Gamma'_inf = s0 Gamma_inf / 2 as scales.
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import InvalidDomain

__all__ = ["ReducedUnits"]


@dataclass(frozen=True)
class ReducedUnits:
    """Scales for one experiment.

    Parameters
    ----------
    wavelength : float
        Laser wavelength in m.
    gamma_inf : float
        Natural linewidth in 1/s.
    s0 : float
        Saturation parameter.
    """

    wavelength: float
    gamma_inf: float
    s0: float

    def __post_init__(self):
        if not (self.wavelength > 0 and self.gamma_inf > 0 and self.s0 > 0):
            raise InvalidDomain("wavelength, gamma_inf and s0 must be > 0")

    @property
    def k(self):
        return 2.0 * np.pi / self.wavelength

    @property
    def rate(self):
        """Gamma'_inf in 1/s."""
        return 0.5 * self.s0 * self.gamma_inf

    def length(self, z):
        return np.asarray(z) / self.k

    def time(self, t):
        return np.asarray(t) / self.rate

    def momentum(self, p):
        return np.asarray(p) * hbar * self.k

    def force(self, f):
        return np.asarray(f) * hbar * self.k * self.rate

    def diffusion(self, d):
        return np.asarray(d) * (hbar * self.k) ** 2 * self.rate

    def energy(self, e):
        return np.asarray(e) * hbar * self.rate
