"""Exception types shared across the package."""


class UnitySumsError(Exception):
    pass


class InvalidConfig(UnitySumsError, ValueError):
    pass


class PrecisionError(UnitySumsError, ValueError):
    """Requested decimal precision is outside what the arithmetic layer certifies."""


class UnsupportedK(UnitySumsError, ValueError):
    pass


class BelowThreshold(UnitySumsError, ValueError):
    """A closed form was requested below the n where it is known to hold."""


class CostGuardExceeded(UnitySumsError, RuntimeError):
    pass


class IllegalParameters(UnitySumsError, ValueError):
    """Congruence or regime conditions of a construction are not met."""
