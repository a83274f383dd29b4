"""Exception types shared across the package."""


class BandEdgeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BandEdgeError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BranchCutError(BandEdgeError, ValueError):
    """Energy lies on the branch cut; carries both quadratic roots.

    Attributes
    ----------
    roots : tuple of complex
        The two roots of lam^2 + E*lam + 1 = 0, both on the unit circle.
    """

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


class BranchPointError(BandEdgeError, ValueError):
    """Energy coincides with a band edge (square-root branch point)."""


class DegenerateNormalizationError(BandEdgeError, ArithmeticError):
    """Eigenvector normalization denominator vanished (coalesced states)."""


class NumericalError(BandEdgeError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class LabelMatchingError(BandEdgeError, ValueError):
    """Threshold-triplet labels could not be assigned unambiguously."""


class ConsistencyError(BandEdgeError, ArithmeticError):
    """A cross-check that should hold by construction failed."""


class LatticeTruncationError(BandEdgeError, ValueError):
    """Requested evolution time too long for the truncated chain."""


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


class ConfigError(BandEdgeError, ValueError):
    """Invalid command-line or config-file input."""
