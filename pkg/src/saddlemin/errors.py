"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` (the class name) so the
command-line driver can surface it verbatim in JSON output.

Errors deriving from :class:`HypothesisViolation` report that a standing
assumption of the multiplier method (non-empty window, compact sub-level
sets, continuity of the multiplier curve, ...) failed on the instance at
hand. They are findings about the problem, not bugs in the solver.
"""

from __future__ import annotations


class SaddleminError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class DomainMismatch(SaddleminError, ValueError):
    """A point does not belong to the problem's domain."""


class UnsupportedDomain(SaddleminError, TypeError):
    """The operation is not defined on this kind of domain."""


class ConfigError(SaddleminError, ValueError):
    """A problem configuration could not be turned into a problem."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        if key is not None:
            message = f"{message} (at key '{key}')"
        super().__init__(message)


class ExpressionError(SaddleminError, ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    """Malformed expression text. ``offset`` is a byte offset into the UTF-8 input."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte {offset}")

    @property
    def code(self) -> str:
        return "SyntaxError"


class UnknownIdentifier(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


class EvaluationError(ExpressionError, ArithmeticError):
    """Domain error while evaluating an expression (log of a negative, ...)."""


class RetractionFailure(SaddleminError, RuntimeError):
    """A point could not be moved onto the level set."""


class HypothesisViolation(SaddleminError):
    """Base class for reports that an assumption of the method fails."""


class Diverged(HypothesisViolation, RuntimeError):
    """An inner minimization ran off to infinity (no compact sub-level sets)."""

    def __init__(self, message: str, lam: float | None = None):
        self.lam = lam
        super().__init__(message)


class WindowEmpty(HypothesisViolation, ValueError):
    """The admissible range of constraint values is empty."""


class WindowViolation(HypothesisViolation, ValueError):
    """The requested level lies outside the admissible window."""


class BracketFailure(HypothesisViolation, RuntimeError):
    """Bracketing or bisection on the multiplier curve failed.

    ``samples`` holds the (lambda, phi) pairs evaluated before giving up; a
    collapsed bracket with a large residual is a jump in the curve.
    """

    def __init__(self, message: str, samples: list[tuple[float, float]] | None = None):
        self.samples = list(samples or [])
        super().__init__(message)


class DualInapplicable(HypothesisViolation, ValueError):
    """Role-swapped (dual) solves need a non-negative left endpoint."""
