"""Exception hierarchy shared across the package."""


class FinslerError(Exception):
    """Base class for every error raised by ufinsler."""


class DomainError(FinslerError, ValueError):
    """A point lies outside the domain where the metric (or an operation) is defined."""


class EvalError(DomainError):
    """Jet arithmetic hit a singular operation (division by zero, log of a non-positive value...)."""


class ParseError(FinslerError, ValueError):
    """Malformed metric expression.

    Attributes
    ----------
    offset : int
        Byte offset of the offending token in the UTF-8 encoded input.
    expected : frozenset of str
        Token kinds that would have been accepted at ``offset``.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class ZeroDirection(FinslerError, ValueError):
    """The fibre vector v is (numerically) zero."""


class SingularTensor(FinslerError, ArithmeticError):
    """A denominator of a closed-form tensor expression vanishes."""


class InternalInconsistency(FinslerError, RuntimeError):
    """Two routes that must agree by construction disagree; signals a formula bug."""


class IntegrationAbort(FinslerError, RuntimeError):
    """Geodesic integration left the admissible region; ``trace`` holds the steps taken so far."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class UnboundedAtPole(DomainError):
    """phi(1, 0) is not available: the unit sphere is outside the metric's domain or phi blows up there."""
