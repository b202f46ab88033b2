"""Exception types raised by fuzzyprox."""


class FuzzyProxError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(FuzzyProxError, ValueError):
    pass


class DimensionMismatchError(FuzzyProxError, ValueError):
    pass


class UnsupportedDegreeError(FuzzyProxError, ValueError):
    """A quadrature grid is not exact for the requested band limit."""


class DegenerateAmalgamError(FuzzyProxError, ValueError):
    """The product of the distinguished elements vanishes."""


class InvalidStateError(FuzzyProxError, ValueError):
    pass


class MissingConstantsError(FuzzyProxError, KeyError):
    pass
