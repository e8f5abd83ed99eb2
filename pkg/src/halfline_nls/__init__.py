"""Nonlinear Schrodinger equation on the half-line with Neumann and nonlinear Robin boundary laws.

The solution is the fixed point of the map built from the free group on
the line, the Duhamel integral of the nonlinearity and the boundary
operator driven by the Neumann data.  A Crank-Nicolson scheme serves as an
independent check.
"""

from .boundary import BoundaryOperator, boundary_propagate, boundary_spectra, eval_Wb1, eval_Wb2, kernel_Kt
from .estimator import HalfLineNLS
from .exceptions import (
    AssumptionWarning,
    CompatibilityError,
    DomainError,
    HalflineError,
    InvalidExtensionError,
    InvalidInputError,
    LifespanError,
    NoContractionError,
    QuadratureError,
    ResolutionError,
    StabilityError,
    StepError,
    TruncationError,
    TruncationWarning,
)
from .fd_oracle import crank_nicolson_solve
from .grids import Grid1D, GridFunction, SpectralFunction, TimeSlab, TimeTrace
from .line_propagator import duhamel, free_propagate, neumann_trace_duhamel, neumann_trace_free
from .sobolev import (
    antiderivative,
    extend_boundary_data,
    extend_initial_data,
    fourier_transform,
    inverse_fourier_transform,
    sobolev_norm_halfline,
    sobolev_norm_interval,
    sobolev_norm_line,
    sobolev_norm_trace,
)
from .solver import (
    CLOSED_LOOP,
    OPEN_LOOP,
    ContinuationResult,
    NlsProblem,
    SolutionField,
    SolverSettings,
    apply_Psi,
    boundary_feedback,
    check_compatibility,
    continue_solution,
    lipschitz_probe,
    nonlinearity,
    picard_solve,
    select_T0,
    xts_norm,
)

__version__ = "0.1.0"
