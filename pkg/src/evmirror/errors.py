"""Exception hierarchy for evmirror."""


class EvMirrorError(Exception):
    """Base class for all library errors."""


class InvalidDomain(EvMirrorError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonConvergence(EvMirrorError, RuntimeError):
    """A numerical procedure did not reach the requested tolerance."""


class StiffnessFailure(EvMirrorError, RuntimeError):
    """The adaptive ODE integrator collapsed its step size."""


class UnsupportedPolarization(EvMirrorError, ValueError):
    """The requested result is only derived for another polarization."""


class GridTooCoarse(EvMirrorError, ValueError):
    """Momentum grid spacing violates the semiclassical premise."""


class NoReflection(EvMirrorError, RuntimeError):
    """The dipole barrier is too low to reflect the atom."""


class ConfigError(EvMirrorError, ValueError):
    """Invalid run configuration. ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key
