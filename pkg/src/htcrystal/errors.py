"""Exception hierarchy shared by every layer of the library."""


class HTCrystalError(Exception):
    """Base class for all library errors."""


class PrimeMismatch(HTCrystalError, ValueError):
    pass


class FieldMismatch(HTCrystalError, ValueError):
    pass


class ShapeMismatch(HTCrystalError, ValueError):
    pass


class NotMonic(HTCrystalError, ValueError):
    pass


class NotEisenstein(HTCrystalError, ValueError):
    pass


class NotIntegral(HTCrystalError, ValueError):
    pass


class NonzeroConstantTerm(HTCrystalError, ValueError):
    pass


class ZeroDivisor(HTCrystalError, ZeroDivisionError):
    """Inversion of a value that is zero, or indistinguishable from zero."""


class PrecisionInsufficient(HTCrystalError, ArithmeticError):
    """A decision depends on digits that are not tracked."""


class PrecisionExhausted(HTCrystalError, ArithmeticError):
    """Divisions consumed more digits than the working margin provides."""
