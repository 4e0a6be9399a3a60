"""Exception types shared across the package."""


class SkewrotError(Exception):
    """Base class for all package-specific errors."""


class IncomparableRepresentationsError(SkewrotError):
    """Two values live in distinct quadratic fields and cannot be combined exactly."""


class RationalExhaustedError(SkewrotError):
    """A rational number's continued fraction terminated before the requested depth."""


class EndOfTableError(SkewrotError, LookupError):
    """The requested successor denominator lies beyond the computed table."""


class PreconditionUnmetError(SkewrotError, ValueError):
    """An operation was invoked outside its stated precondition."""


class SelfCheckError(SkewrotError):
    """An internal exact identity failed; indicates an implementation bug, not bad input."""


class BestApproxViolationError(SelfCheckError):
    """Exhaustive best-approximation check found a smaller ||q*alpha|| than the convergent's."""


class SeparationBoundViolationError(SelfCheckError):
    """min ||1/2 - j*alpha|| over |j| < q fell below 1/(24q)."""


class SumBoundViolationError(SelfCheckError):
    """|a_q| exceeded the Denjoy-Koksma bound on some constancy interval."""


class WrapInconsistentError(SelfCheckError):
    """Jump propagation around the full circle did not return to the starting value."""


class VerificationError(SelfCheckError):
    """A propagated interval value disagreed with direct midpoint evaluation."""


class FastPathGuardError(SkewrotError):
    """Internal: a fast-path safety margin was violated; caller falls back to the reference path."""
