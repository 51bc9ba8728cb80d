"""Exception hierarchy.

Every error may carry the tag of the inequality whose hypothesis was
violated (``"Thm2.5"``, ``"KyFan-S"`` ...) so that the command line can
name it in its diagnostic.
"""

from __future__ import annotations


class JensenGapError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, tag: str | None = None):
        super().__init__(message)
        self.tag = tag

    def __str__(self) -> str:
        msg = super().__str__()
        if self.tag:
            return f"[{self.tag}] {msg}"
        return msg


class DomainError(JensenGapError, ValueError):
    """A point lies outside the domain of a function or mean."""


class PreconditionError(JensenGapError, ValueError):
    """An input violates the hypothesis of an operation."""


class UnboundedError(JensenGapError, ArithmeticError):
    """The second derivative is unbounded on the requested interval."""


class DegenerateError(JensenGapError, ValueError):
    """The requested quantity is undefined (affine function, alpha=1, ...)."""


class NumericError(JensenGapError, ArithmeticError):
    """A computation produced a non-finite value."""


class ConfigError(JensenGapError, ValueError):
    """A verification configuration is inconsistent with its hypotheses."""
