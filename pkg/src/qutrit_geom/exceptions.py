"""Exception hierarchy shared by all modules."""


class QutritGeomError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(QutritGeomError, ValueError):
    pass


class NotUnitTrace(QutritGeomError, ValueError):
    pass


class NotPSD(QutritGeomError, ValueError):
    pass


class DegenerateEigenvalue(QutritGeomError, ArithmeticError):
    """The adjugate of ``rho - lam*I`` vanishes: ``lam`` is (numerically) repeated."""


class NotAnEigenvalue(QutritGeomError, ValueError):
    pass


class NegativeInput(QutritGeomError, ValueError):
    pass


class NotAProbabilityVector(QutritGeomError, ValueError):
    pass


class NonOrthonormalMarkers(QutritGeomError, ValueError):
    pass


class ZeroSuccessProbability(QutritGeomError, ArithmeticError):
    pass


class EmptyInput(QutritGeomError, ValueError):
    pass


class StateFormatError(QutritGeomError, ValueError):
    """A state file does not follow the ``{"C": [[[re, im], ...], ...]}`` layout."""


class IdentityViolation(QutritGeomError, ArithmeticError):
    """Two independent routes to the same quantity disagree beyond tolerance."""
