"""
Custom exceptions for the periodicity toolkit with structured error context.

This module provides the exception hierarchy used by every numerical
stage: boundary data validation, mode-system solves, zero finding,
contour quadrature and the reference time stepper. Each exception
carries a context dictionary for debugging and for machine-readable
CLI error reports.

Exception Hierarchy:
    SpectralException (base)
    ├── ConfigurationError                (CLI exit code 2)
    │   ├── MalformedBoundaryConditions
    │   └── InvalidSymbolError
    ├── PosednessError                    (CLI exit code 3)
    │   └── IllPosed
    ├── NumericalError                    (CLI exit code 4)
    │   ├── ResonanceError
    │   ├── ProfileSingular
    │   ├── BoundaryZero
    │   ├── NonConvergence
    │   ├── MeanNotZero
    │   ├── EigenBasisUnavailable
    │   ├── PoleClearanceFailure
    │   ├── BlowupDetected
    │   └── InstabilityDetected
    └── RetryableError / NonRetryableError (mixins)
"""

from typing import Optional, Dict, Any
from datetime import datetime, timezone


class SpectralException(Exception):
    """
    Base exception for all toolkit errors.

    Attributes:
        message: Human-readable error message
        context: Additional context information (mode, root, tolerance, ...)
        original_exception: The original exception that was caught (if any)
    """

    exit_code: int = 4

    def __init__(
        self,
        message: str,
        context: Optional[Dict[str, Any]] = None,
        original_exception: Optional[Exception] = None
    ):
        self.message = message
        self.context = context or {}
        self.original_exception = original_exception
        self.timestamp = datetime.now(timezone.utc)

        self.context["error_timestamp"] = self.timestamp.isoformat()

        super().__init__(message)
        if original_exception:
            self.__cause__ = original_exception

    def __str__(self) -> str:
        """Format error message with context."""
        base_msg = f"{self.__class__.__name__}: {self.message}"

        if self.context:
            context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
            base_msg += f" | Context: {context_str}"

        if self.original_exception:
            base_msg += (
                f" | Caused by: {type(self.original_exception).__name__}: "
                f"{str(self.original_exception)}"
            )

        return base_msg

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to a JSON-friendly dictionary."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "context": {k: _jsonable(v) for k, v in self.context.items()},
            "timestamp": self.timestamp.isoformat(),
            "exit_code": self.exit_code,
            "original_error": str(self.original_exception) if self.original_exception else None
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


# ============================================================================
# Retry Strategy Mixins
# ============================================================================

class RetryableError(SpectralException):
    """
    Mixin for errors that a perturbed retry may resolve.

    Use this for:
    - Contours passing through (or numerically grazing) a zero
    - Split lines that hit a zero during subdivision
    """

    def __init__(
        self,
        message: str,
        context: Optional[Dict[str, Any]] = None,
        original_exception: Optional[Exception] = None,
        max_retries: int = 5,
    ):
        super().__init__(message, context, original_exception)
        self.max_retries = max_retries


class NonRetryableError(SpectralException):
    """
    Mixin for errors that repeat deterministically.

    Use this for:
    - Invalid problem definitions
    - Structural singularities of a mode system
    - Numerical blow-up of a time integration
    """
    pass


# ============================================================================
# Configuration Errors
# ============================================================================

class ConfigurationError(NonRetryableError):
    """Base exception for invalid problem definitions."""

    exit_code = 2


class MalformedBoundaryConditions(ConfigurationError):
    """
    Exception raised when boundary data cannot define N conditions per mode.

    Context should include:
        - order: Spatial order N of the equation
        - prescribed: Labels of the prescribed traces
        - couplings: Number of coupling constraints
        - reason: Which structural rule failed
    """
    pass


class InvalidSymbolError(ConfigurationError):
    """
    Exception raised when the dispersion monomial is not admissible.

    Context should include:
        - a: Coefficient of the monomial
        - order: Spatial order N
        - arg_a: Argument of a (must lie in [-pi/2, pi/2])
    """
    pass


# ============================================================================
# Posedness Errors
# ============================================================================

class PosednessError(NonRetryableError):
    """Base exception for problems without a stable evolution."""

    exit_code = 3


class IllPosed(PosednessError):
    """
    Exception raised for coupled Stokes conditions with |beta| < 1.

    Context should include:
        - beta: Coupling coefficient
        - reason: Why the evolution is refused
    """
    pass


# ============================================================================
# Numerical Errors
# ============================================================================

class NumericalError(SpectralException):
    """Base exception for numerical failures."""

    exit_code = 4


class ResonanceError(NonRetryableError, NumericalError):
    """
    Exception raised when a closed-form map is evaluated at a resonant mode.

    Context should include:
        - n: Mode index
        - omega: Angular frequency
        - sin_value: The vanishing denominator
    """
    pass


class ProfileSingular(NonRetryableError, NumericalError):
    """
    Exception raised when the boundary-trace system of a profile is rank deficient.

    Context should include:
        - n: Mode index
        - rank: Numerical rank of the trace system
    """
    pass


class BoundaryZero(RetryableError, NumericalError):
    """
    Exception raised when a winding contour passes through a zero.

    Context should include:
        - rect: The rectangle whose boundary failed
        - point: Location where |f| fell below the floor
    """
    pass


class NonConvergence(NonRetryableError, NumericalError):
    """
    Exception raised when zero refinement fails.

    Context should include:
        - rect: Region being refined
        - depth: Subdivision depth reached
        - count: Winding count of the region
    """
    pass


class MeanNotZero(NonRetryableError, NumericalError):
    """
    Exception raised when a Neumann remainder datum has nonzero mean.

    Context should include:
        - mean: Computed integral of the datum
        - tolerance: Accepted absolute tolerance
    """
    pass


class EigenBasisUnavailable(NonRetryableError, NumericalError):
    """
    Exception raised when too few eigenvalues were located.

    Context should include:
        - requested: Number of eigenmodes requested
        - found: Number of distinct eigenvalues located
        - rect: Search region
    """
    pass


class PoleClearanceFailure(NonRetryableError, NumericalError):
    """
    Exception raised when a deformed contour cannot avoid the kernel poles.

    Context should include:
        - delta_deg: Deformation angle
        - clearance: Required distance from every pole
        - pole: Offending pole location
    """
    pass


class BlowupDetected(NonRetryableError, NumericalError):
    """
    Exception raised when a trajectory exceeds the blow-up threshold.

    Context should include:
        - t: Time at which the threshold was exceeded
        - sup_norm: Sup norm at that time
        - threshold: Configured threshold
    """
    pass


class InstabilityDetected(NonRetryableError, NumericalError):
    """
    Exception raised when a trajectory produces non-finite values.

    Context should include:
        - t: Time of the first non-finite state
        - step: Step index
    """
    pass
