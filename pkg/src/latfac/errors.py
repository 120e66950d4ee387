"""Exception taxonomy for latfac.

Every error raised by the library derives from LatfacError.  The split mirrors
the CLI exit codes: precondition/input problems (exit 2), numerical failures
(exit 3), and search-budget exhaustion (exit 4).
"""


class LatfacError(Exception):
    """Base class for all latfac errors."""


class PreconditionError(LatfacError):
    """Input violates a documented precondition (CLI exit code 2)."""


class NumericalError(LatfacError):
    """A numerical procedure could not certify its result (CLI exit code 3)."""


class NotInvertible(NumericalError):
    """Certified bracket of min |f| on the circle contains 0."""


class NonzeroWinding(PreconditionError):
    """f has no continuous logarithm on the circle (winding number != 0)."""


class NoConvergence(NumericalError):
    """Grid doubling hit the cap without meeting the tolerance."""


class NotPositiveReal(PreconditionError):
    """Certified bracket of min Re t contains 0 where min Re t > 0 is required."""


class RootOnCircle(NumericalError):
    """A Laurent root sits within the classification margin of |z| = 1."""


class AliasRisk(PreconditionError):
    """Sampling grid too small for the requested frequency window."""


class Undecidable(NumericalError):
    """An interval comparison straddles the decision boundary."""


class ZeroAlpha(PreconditionError):
    """Strip reflection needs a nonzero slope."""


class DegenerateDirection(PreconditionError):
    """The map sends the strip direction to a vertical line (g11 + alpha*g12 = 0)."""


class NotLowestTerms(PreconditionError):
    """Rational slope must be given in lowest terms."""


class PrecisionExhausted(NumericalError):
    """Stored precision cannot certify the next continued-fraction digit."""


class StripTooNarrow(PreconditionError):
    """The strip admits no frequency band wide enough for the input's support."""


class FreqOutsideStrip(PreconditionError):
    """The input's frequency support does not fit the difference set of the strip."""


class BudgetExhausted(LatfacError):
    """All allowed convergents were tried without certifying a result (CLI exit 4).

    Carries the per-convergent diagnostic trace.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class CrossCheckError(NumericalError):
    """Two independent computation routes disagree beyond tolerance."""
