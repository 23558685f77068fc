"""Exception hierarchy shared across the library.

Every error raised by certbound derives from :class:`CertboundError` so
callers (and the CLI) can map failures to exit codes in one place.
"""


class CertboundError(Exception):
    """Base class for all certbound errors."""


class IntervalError(CertboundError):
    """Invalid interval construction or operation."""


class DivisionByZeroInterval(IntervalError):
    """Division by an interval that contains zero."""


class DomainError(IntervalError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateSplit(CertboundError):
    """Attempt to bisect a box along a zero-width dimension."""


class ParseError(CertboundError):
    """Expression or model text does not conform to the grammar."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + " | ".join(expected) + ")"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class NonDifferentiable(CertboundError):
    """Symbolic derivative does not exist or cannot be certified."""


class UnboundVariable(CertboundError):
    """Evaluation point or box does not cover a free variable."""


class DimensionMismatch(CertboundError):
    """Matrix/vector dimensions are inconsistent with the model."""


class InvalidDimension(CertboundError):
    """Operation requires a larger dimension than supplied."""


class MissingBounds(CertboundError):
    """Model definition lacks required variable bounds."""


class PreconditionViolated(CertboundError):
    """A documented precondition of an operation does not hold."""

    def __init__(self, condition: str, detail: str = ""):
        message = f"precondition violated: {condition}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.condition = condition


class NecessaryConditionViolated(CertboundError):
    """Constant pair cannot arise from any quadratically inner-bounded map."""


class EvaluationError(CertboundError):
    """Objective evaluation failed during optimization.

    Carries the partial optimization result (if any) in ``partial``; the
    partial sandwich must be treated as invalid.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
