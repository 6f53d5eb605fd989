"""Exception hierarchy.  Each error carries a stable kebab-case `name` that
the CLI reports; the class tells the CLI which exit code to use."""


class DieudonneError(Exception):
    name = "error"


class FieldError(DieudonneError, ValueError):
    name = "field-error"


class RingMismatchError(DieudonneError, ValueError):
    name = "ring-mismatch"


class DimensionMismatchError(DieudonneError, ValueError):
    name = "dimension-mismatch"


class PrecisionError(DieudonneError, ArithmeticError):
    """Base class for errors caused by finite precision (CLI exit code 3)."""

    name = "precision-error"


class PrecisionExhaustedError(PrecisionError):
    name = "precision-exhausted"


class PrecisionInsufficientError(PrecisionError):
    name = "precision-insufficient"


class PrecisionBudgetExceededError(PrecisionError):
    name = "precision-budget-exceeded"


class NotDivisibleError(DieudonneError, ArithmeticError):
    name = "not-divisible"


class NotInvertibleError(DieudonneError, ArithmeticError):
    name = "not-invertible"


class UnsolvableError(DieudonneError, ArithmeticError):
    name = "unsolvable-at-degree-k"


class HypothesisViolatedError(DieudonneError, ValueError):
    name = "hypothesis-violated"


class IdentityCheckFailedError(DieudonneError, ArithmeticError):
    name = "identity-check-failed"


class InvalidFrameError(DieudonneError, ValueError):
    name = "invalid-frame"


class NonLocalFrameError(DieudonneError, ValueError):
    name = "non-local-frame"


class InvalidWindowError(DieudonneError, ValueError):
    name = "invalid-window"


class NonMorphismError(DieudonneError, ValueError):
    name = "non-morphism"


class DeterminantNotEPowerError(DieudonneError, ValueError):
    name = "determinant-not-E-power"


class ParseError(DieudonneError, ValueError):
    """Malformed input file (CLI exit code 2)."""

    name = "parse-error"
