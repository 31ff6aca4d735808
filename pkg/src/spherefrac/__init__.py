"""Fractional powers of the Laplacian on spheres and on the circle.

Spectral multipliers, kernel integrals over the heat and Poisson
semigroups, closed forms on the circle and the extension problem, each
cross-checked against the others.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    MeanNotZeroError,
    NonIntegrableError,
    PoleError,
    SphereFracError,
    ToleranceError,
)
from .quadrature import IntegrandMeta, QuadratureSpec
from .zonal import KernelProfile, SphereDim, ZonalCoeffs, synthesize
from .fracops import (
    FracOrder,
    apply_frac_at_pole,
    apply_neg_at_pole,
    decompose,
    kernel_Kneg_heat,
    kernel_Kneg_zeta,
    kernel_Ks,
    kernel_L2s,
    kernel_Ss,
    spectral_frac,
)
from .extension import extend, extend_via_heat, neumann_trace

__all__ = [
    "__version__",
    "SphereFracError",
    "DomainError",
    "PoleError",
    "MeanNotZeroError",
    "NonIntegrableError",
    "ToleranceError",
    "QuadratureSpec",
    "IntegrandMeta",
    "SphereDim",
    "ZonalCoeffs",
    "KernelProfile",
    "synthesize",
    "FracOrder",
    "spectral_frac",
    "apply_frac_at_pole",
    "apply_neg_at_pole",
    "decompose",
    "kernel_Ks",
    "kernel_Kneg_zeta",
    "kernel_Kneg_heat",
    "kernel_L2s",
    "kernel_Ss",
    "extend",
    "extend_via_heat",
    "neumann_trace",
]
