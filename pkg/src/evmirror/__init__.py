"""Atoms above a dielectric: vacuum field correlations, optical pumping,
radiation pressure and momentum diffusion in an evanescent-wave mirror."""

from .errors import (ConfigError, EvMirrorError, GridTooCoarse, InvalidDomain,
                     NonConvergence, NoReflection, StiffnessFailure,
                     UnsupportedPolarization)
from .kernels import BACKEND
from .optics import EvanescentFieldConfig, Interface, fresnel
from .quadrature import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "EvMirrorError",
    "EvanescentFieldConfig",
    "GridTooCoarse",
    "Interface",
    "InvalidDomain",
    "NoReflection",
    "NonConvergence",
    "QuadratureSpec",
    "StiffnessFailure",
    "UnsupportedPolarization",
    "fresnel",
]
