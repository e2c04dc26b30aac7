"""
Carlitz Toolkit - Error Types
Every computational failure raised by the library, with a machine-readable form for the CLI
"""

from typing import Any, Dict, Optional


class CarlitzError(Exception):
    """Base class for all library errors"""

    exit_code = 1

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context: Dict[str, Any] = {k: _plain(v) for k, v in context.items()}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "context": self.context,
        }


def _plain(value: Any) -> Any:
    """Make context values JSON friendly"""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return str(value)


# ==================== USAGE ERRORS ====================

class UsageError(CarlitzError):
    exit_code = 2


class ParseError(UsageError):
    """Malformed polynomial, character spec or config file"""


# ==================== ALGEBRA ====================

class NotPrime(CarlitzError):
    pass


class NonSquare(CarlitzError):
    pass


class NotIrreducible(CarlitzError):
    pass


class NotMonic(CarlitzError):
    """A generator that must be monic in theta came out with another leading coefficient"""


class ContextMismatch(CarlitzError):
    """Operands live in different fields, rings or P-adic contexts"""


class ExponentOverflow(CarlitzError):
    """A monomial exponent does not fit its packed key field"""


# ==================== SERIES ====================

class NotAUnit(CarlitzError):
    pass


class GradeMismatch(CarlitzError):
    pass


class NotPolynomialAtPrecision(CarlitzError):
    def __init__(self, exponent: int, prec: Optional[int] = None, **context: Any):
        super().__init__(
            f"nonzero tail coefficient at exponent {exponent}",
            exponent=exponent, prec=prec, **context,
        )
        self.exponent = exponent


class PrecisionExhausted(CarlitzError):
    pass


# ==================== CHARACTERS / UNITS ====================

class ArityMismatch(CarlitzError):
    pass


class NotARoot(CarlitzError):
    pass


class IntegralityViolation(CarlitzError):
    pass


class DescentFailure(CarlitzError):
    pass


# ==================== P-ADIC ====================

class NonConvergent(CarlitzError):
    pass


class NonPositiveValuation(CarlitzError):
    pass
