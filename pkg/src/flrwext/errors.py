"""Exception hierarchy shared by all flrwext modules."""

from __future__ import annotations


class FlrwError(Exception):
    """Base class for every error raised by flrwext."""


class DslError(FlrwError, ValueError):
    """Malformed scale-factor or gauge expression.

    ``offset`` is the 0-based character offset where the problem was detected.
    """

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class DslSyntaxError(DslError):
    pass


class UnknownIdentifierError(DslError):
    pass


class NonConstantExponentError(DslError):
    pass


class DomainError(FlrwError, ArithmeticError):
    """Expression evaluated outside its domain (log of 0, sqrt of a negative, ...)."""


class QuadratureError(FlrwError, ArithmeticError):
    pass


class OutOfRangeError(FlrwError, ValueError):
    """A value lies outside the range of a monotone map being inverted."""


class RegionError(FlrwError, ValueError):
    """A point lies in the wrong region of an extension chart.

    ``region`` carries the classifier tag of the offending point.
    """

    def __init__(self, message: str, region: str):
        self.region = region
        super().__init__(message)


class HypothesisViolation(FlrwError, ValueError):
    """The input does not satisfy the hypotheses an operation needs."""


class DegeneracyError(FlrwError, ValueError):
    """A grid point sits on (or too close to) the SSS degeneracy curve."""


class GaugeError(FlrwError, ValueError):
    """The SSS gauge function has a vanishing derivative on the sampled range."""


class CausalityError(FlrwError, ValueError):
    """A curve or separation that must be timelike is not."""
