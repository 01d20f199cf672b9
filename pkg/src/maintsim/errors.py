"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class UnsupportedMomentError(ParameterError):
    """A moment order other than 1 or 2 was requested."""


class StaleQueryError(ValueError):
    """A query arrived with a timestamp older than the last localization fix."""


class BracketError(ValueError):
    """Interpolation was requested outside the enclosing fix pair."""


class DegeneratePairError(ValueError):
    """Two localization fixes coincide in time, so no velocity is defined."""
