#!/usr/bin/env python3
"""
Exact arithmetic in an imaginary quadratic field K = Q(sqrt(-d))
Elements are x + y*w in the integral basis {1, w} of the ring of integers
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import List, Tuple, Union

from sympy import factorint

from .errors import FieldArithmeticError, PreconditionError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class FieldDesc:
    """The field Q(sqrt(-d)) for squarefree d >= 1"""

    d: int

    def __post_init__(self):
        if self.d < 1 or any(e > 1 for e in factorint(self.d).values()):
            raise PreconditionError(f"d must be a squarefree positive integer, got {self.d}")

    @property
    def omega_kind(self) -> str:
        """'sqrt' when w = sqrt(-d), 'half' when w = (1 + sqrt(-d))/2"""
        return "half" if self.d % 4 == 3 else "sqrt"

    @property
    def disc(self) -> int:
        return -self.d if self.d % 4 == 3 else -4 * self.d

    @property
    def t(self) -> int:
        """Trace of w; w satisfies w^2 = t*w - n"""
        return 1 if self.d % 4 == 3 else 0

    @property
    def n(self) -> int:
        """Norm of w"""
        return (1 + self.d) // 4 if self.d % 4 == 3 else self.d

    def element(self, x: Scalar = 0, y: Scalar = 0) -> "FieldElement":
        return FieldElement(self, Fraction(x), Fraction(y))

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    @property
    def omega(self) -> "FieldElement":
        return self.element(0, 1)

    def elements_of_norm(self, N: int) -> List["FieldElement"]:
        """All integral elements of norm exactly N, sorted by sort_key.

        Uses 4N = (2x + ty)^2 + |disc| y^2, so |y| <= sqrt(4N/|disc|).
        """
        if N < 0:
            return []
        if N == 0:
            return [self.zero]
        D = -self.disc
        ymax = isqrt(4 * N // D)
        found = []
        for y in range(-ymax, ymax + 1):
            rem = 4 * N - D * y * y
            if rem < 0:
                continue
            s = isqrt(rem)
            if s * s != rem:
                continue
            for root in {s, -s}:
                if (root - self.t * y) % 2 == 0:
                    found.append(self.element((root - self.t * y) // 2, y))
        return sorted(set(found), key=lambda e: e.sort_key())

    def units(self) -> List["FieldElement"]:
        """The unit group: 4 elements for d=1, 6 for d=3, else {1, -1}"""
        return self.elements_of_norm(1)

    def integral_elements_up_to(self, N: int) -> List["FieldElement"]:
        """Integral elements of norm 1..N, sorted by norm then sort_key"""
        out = []
        for k in range(1, N + 1):
            out.extend(self.elements_of_norm(k))
        return out

    def __str__(self) -> str:
        return f"Q(sqrt(-{self.d}))"


@dataclass(frozen=True)
class FieldElement:
    """x + y*w with exact rational coordinates"""

    field: FieldDesc
    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise PreconditionError(f"Elements of {self.field} and {other.field} cannot be combined")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.x, -self.y)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n = self.field.t, self.field.n
        return FieldElement(
            self.field,
            self.x * o.x - n * self.y * o.y,
            self.x * o.y + o.x * self.y + t * self.y * o.y,
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        nm = self.norm()
        if nm == 0:
            raise FieldArithmeticError("Division by zero in field", {"field": self.field})
        c = self.conj()
        return FieldElement(self.field, c.x / nm, c.y / nm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "FieldElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "FieldElement":
        return FieldElement(self.field, self.x + self.field.t * self.y, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x + self.field.t * self.x * self.y + self.field.n * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x + self.field.t * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def is_unit(self) -> bool:
        return self.is_integral() and self.norm() == 1

    def is_rational(self) -> bool:
        return self.y == 0

    def denominator(self) -> int:
        """Least positive integer m with m*self integral"""
        a, b = self.x.denominator, self.y.denominator
        return a * b // gcd(a, b)

    def coords(self) -> Tuple[Fraction, Fraction]:
        return (self.x, self.y)

    def sort_key(self) -> Tuple[Fraction, Fraction, Fraction]:
        """Order used to pick canonical elements: norm first, then larger x, then larger y"""
        return (self.norm(), -self.x, -self.y)

    def __str__(self) -> str:
        return format_element(self)


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_element(e: FieldElement) -> str:
    """Literal form x+y*w accepted by the literal parser"""
    if e.y == 0:
        return _format_rational(e.x)
    if e.y == 1:
        ypart = "w"
    elif e.y == -1:
        ypart = "-w"
    else:
        ypart = f"{_format_rational(e.y)}*w"
    if e.x == 0:
        return ypart
    sign = "" if ypart.startswith("-") else "+"
    return f"{_format_rational(e.x)}{sign}{ypart}"
