"""Error types for the Casimir correction-factor toolkit.

This module handles:
- The common base error for the package
- Domain errors for invalid physical inputs
- Integrand evaluation failures carrying the offending abscissa
- Non-convergence failures carrying their convergence report
"""

from typing import Any, Optional


class CasimirError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CasimirError, ValueError):
    """Raised when a physical input lies outside its valid domain."""


class IntegrandEvaluationError(CasimirError, ArithmeticError):
    """Raised when an integrand or series term returns a non-finite value.

    Args:
        abscissa: Point at which the evaluation failed
        value: Offending value
    """

    def __init__(self, abscissa: float, value: Any = None, message: Optional[str] = None):
        self.abscissa = abscissa
        self.value = value
        if message is None:
            message = f"Non-finite integrand value {value!r} at abscissa {abscissa!r}"
        super().__init__(message)


class ConvergenceError(CasimirError, RuntimeError):
    """Raised when a physics quantity depends on a numerical step that did not converge.

    Args:
        report: The ConvergenceReport of the failing step
        context: Short description of what was being computed
    """

    def __init__(self, report: Any, context: str = ""):
        self.report = report
        self.context = context
        detail = (
            f"value={report.value!r}, est_error={report.est_error!r}, "
            f"evaluations={report.evaluations}"
        )
        prefix = f"{context}: " if context else ""
        super().__init__(f"{prefix}numerical evaluation did not converge ({detail})")
