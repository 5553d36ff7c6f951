"""Exception types shared across coklab."""


class CoklabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CoklabError, ValueError):
    """An argument lies outside the operation's domain."""


class NonUnit(CoklabError, ArithmeticError):
    """Inversion was requested for a residue that is not a unit."""


class InsufficientPrecision(CoklabError):
    """The modulus exponent is too small to resolve the requested invariant."""


class StructureError(CoklabError, ValueError):
    """Matrix entries contradict the declared symmetry kind."""


class PivotError(CoklabError, ArithmeticError):
    """A pivot block is not invertible."""


class PrecisionExceeded(CoklabError):
    """Adaptive precision would need an exponent above the configured cap."""


class Singular(CoklabError, ArithmeticError):
    """The integer matrix has determinant zero."""


class BudgetExceeded(CoklabError):
    """A brute-force enumeration would exceed its configured budget."""


class Indeterminate(CoklabError):
    """The fixed modulus cannot resolve the class of the input."""


class NotApplicable(CoklabError):
    """The check does not apply to this input (e.g. a point-mass distribution)."""
