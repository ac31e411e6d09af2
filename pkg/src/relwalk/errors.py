"""Exception hierarchy shared by all relwalk modules."""


class RelwalkError(Exception):
    """Base class for every error raised by relwalk."""


class ConvergenceFailure(RelwalkError):
    """A quadrature did not reach its tolerance within the allowed doublings."""


class DomainError(RelwalkError, ValueError):
    """An argument lies outside the domain of the evaluated function."""


class Unsupported(RelwalkError):
    """The requested quantity is not defined for this model variant."""


class LightConeOverflow(RelwalkError):
    """Evolution would carry amplitude across the periodic wrap point."""


class NormalizationError(RelwalkError):
    """A normalization bracket came out non-positive."""


class NonHermitian(RelwalkError):
    """A reduced density matrix failed the Hermiticity check."""


class DegenerateFit(RelwalkError, ValueError):
    """Least-squares fit with no spread in the regressor."""


class ParseError(RelwalkError, ValueError):
    """Malformed command-line value."""
