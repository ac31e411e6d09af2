"""Discrete-time, continuous-time and Dirac quantum walks with closed-form wave packets."""

from .dispersion import CTQW, DTQW, Dirac, Hadamard
from .errors import (
    ConvergenceFailure,
    DegenerateFit,
    DomainError,
    LightConeOverflow,
    NonHermitian,
    NormalizationError,
    ParseError,
    RelwalkError,
    Unsupported,
)
from .numerics import QuadratureSpec
from .walks import ScalarLattice, SpinorLattice

__version__ = "0.1.0"
