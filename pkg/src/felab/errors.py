"""Exception types shared across the package.

The CLI maps these onto exit codes: domain/threshold/capability/arity
problems exit 1, non-convergence exits 2, usage errors exit 3.
"""


class FelabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FelabError):
    """An argument lies outside the mathematical domain of an operation."""


class ThresholdError(DomainError):
    """Exponent at or below a kernel computability threshold.

    Carries the threshold so callers (and the CLI) can name it.
    """

    def __init__(self, message: str, threshold: float):
        super().__init__(message)
        self.threshold = threshold


class CapabilityError(FelabError):
    """Requested a combination the tool deliberately does not support."""


class ArityError(FelabError):
    """Wrong number of inputs (e.g. too few points for a fit)."""


class InvalidSetError(DomainError):
    """A set model violates its invariants (e.g. nonpositive radius)."""


class NonConvergenceError(FelabError):
    """An iteration failed to converge; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class UsageError(FelabError):
    """Malformed command line."""
