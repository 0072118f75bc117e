#!/usr/bin/env python3
"""
Exception hierarchy for formal_hecke
Every library error carries an exit code used by the command-line surface
"""

from typing import Any, Dict, Optional


class FormalHeckeError(Exception):
    """Base class for all library errors"""

    exit_code: int = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {k: str(v) for k, v in self.details.items()},
        }


class FieldArithmeticError(FormalHeckeError, ZeroDivisionError):
    """Division by zero in the field"""


class InexactDivisionError(FormalHeckeError):
    """Ideal division whose result is not integral in integral mode"""


class NotCoprimeError(FormalHeckeError):
    """Arguments required to be coprime are not"""


class NonPrincipalError(FormalHeckeError):
    """An ideal or ideal product required to be principal is not"""


class RankError(FormalHeckeError):
    """Singular matrix or rank-deficient lattice"""


class NotContainedError(FormalHeckeError):
    """Module or element containment required by an operation fails"""


class PreconditionError(FormalHeckeError):
    """Operation called outside its domain"""


class ParseError(FormalHeckeError, ValueError):
    """Malformed literal or document"""


class ConfigurationError(FormalHeckeError):
    """Invalid environment configuration"""


class InconsistentRestrictionError(FormalHeckeError):
    """Principal restriction data violates multiplicativity"""

    exit_code = 1

    def __init__(self, message: str, descriptor: str, source: str, details: Optional[Dict[str, Any]] = None):
        merged = {"descriptor": descriptor, "source": source}
        merged.update(details or {})
        super().__init__(message, merged)
        self.descriptor = descriptor
        self.source = source
