"""Exception types raised across the library.

Everything numerical derives from :class:`MomentProblemError` so callers can
distinguish domain failures from programming errors (plain ``ValueError`` /
``TypeError`` are reserved for malformed arguments).
"""


class MomentProblemError(Exception):
    """Base class for domain-level failures."""


class InsufficientMoments(MomentProblemError):
    """Fewer moments supplied than the requested operation consumes."""


class DegenerateHankel(MomentProblemError):
    """A leading Hankel determinant is not strictly positive.

    This is the signature of a finitely supported measure; conversion to a
    semi-infinite recurrence is refused rather than silently truncated.
    """


class PrecisionLoss(MomentProblemError):
    """Working precision could not certify the requested output accuracy."""


class CoefficientExhausted(MomentProblemError):
    """A recurrence needs coefficients beyond what the matrix can supply."""


class RealPoint(MomentProblemError):
    """A nonreal evaluation point was required but a real one was given."""


class QuadratureFailure(MomentProblemError):
    """Adaptive integration could not meet its error budget."""


class NonFinite(MomentProblemError):
    """A computed quantity is not finite at working precision."""


class ZeroMass(MomentProblemError):
    """Normalization of a measure with vanishing total mass."""


class InfiniteMass(MomentProblemError):
    """Normalization of a measure whose total mass diverges."""


class FiniteSupport(MomentProblemError):
    """A measure has too few support points for the requested expansion."""


class TruncationTooSmall(MomentProblemError):
    """Finite-section size is too small relative to the requested output."""


class AlphaBelowThreshold(UserWarning):
    """Damping exponent below the proven cyclicity threshold of 1/2."""
