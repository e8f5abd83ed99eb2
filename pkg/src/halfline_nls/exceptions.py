"""Exception hierarchy shared by the numerical modules and the CLI."""


class HalflineError(Exception):
    """Base class for all numerical failures raised by this package."""


class InvalidInputError(HalflineError, ValueError):
    """Input data is malformed (non-finite samples, degenerate grids, ...)."""


class ResolutionError(HalflineError):
    """The spectral content of a sampled function is not resolved by its grid."""


class CompatibilityError(HalflineError):
    """Boundary data violates the zeroth-order compatibility condition."""


class InvalidExtensionError(HalflineError):
    """A boundary extension is not mean-free or not compactly supported."""


class TruncationError(HalflineError):
    """Data does not decay at the edge of the truncated spatial domain."""


class DomainError(HalflineError, ValueError):
    """Requested time lies outside the stored slab."""


class QuadratureError(HalflineError):
    """An adaptive or Richardson-checked quadrature failed to converge."""


class NoContractionError(HalflineError):
    """Picard iteration stopped contracting (ratio >= 1 repeatedly)."""

    def __init__(self, message, ratios=None):
        super().__init__(message)
        self.ratios = list(ratios or [])


class LifespanError(HalflineError):
    """No admissible local time step above the minimum lifespan was found."""


class StepError(HalflineError):
    """Inner nonlinear iteration of the finite-difference oracle diverged."""


class StabilityError(HalflineError):
    """The finite-difference oracle lost mass beyond its tolerance."""


class AssumptionWarning(UserWarning):
    """Parameters fall outside the sufficient conditions of the local theory."""


class TruncationWarning(UserWarning):
    """Solution amplitude reached the far edge of the truncated domain."""
