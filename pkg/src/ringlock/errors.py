"""Exception hierarchy for ringlock.

Every domain failure raises a subclass of :class:`RinglockError`, so callers
(including the CLI) can catch one type.  Plumbing misuse (wrong argument
types, empty arrays, malformed paths) raises the usual built-ins instead.
"""


class RinglockError(Exception):
    """Base class for all domain errors raised by this package."""


class CouplingParseError(RinglockError):
    """A coupling-function text form could not be parsed."""


class ConstantFunction(RinglockError):
    """The coupling function has no nonzero harmonic, so it is constant."""


class NoZeroCrossing(RinglockError):
    """The coupling function never crosses zero (min > 0 or max < 0)."""


class NoPositiveSlopeZero(NoZeroCrossing):
    """Every zero of the coupling function has a vanishing slope there."""


class OutOfRange(RinglockError):
    """A target value lies outside the open range the inverse can reach."""


class AboveThreshold(RinglockError):
    """Requested width meets or exceeds the analytic chain threshold."""


class NoSolution(RinglockError):
    """The numeric search found no locked state for these parameters."""


class NoSymmetricZero(RinglockError):
    """Neither 0 nor pi is a rising zero, as the construction requires."""


class DimensionTooLarge(RinglockError):
    """Brute-force search is restricted to small systems."""


class NonFiniteState(RinglockError):
    """Integration produced a non-finite phase value."""


class NotLocked(RinglockError):
    """A stage that requires a locked state observed an unlocked one."""


class BadBracket(RinglockError):
    """The upper end of a bisection bracket already locks."""


class NotApplicable(RinglockError):
    """The analytic cap is infinite, so no finite bracket exists."""
