#!/usr/bin/env python3
"""2x2 matrices over the field, acting on row vectors from the right"""

from dataclasses import dataclass
from typing import Tuple, Union

from .errors import RankError
from .qfield import FieldDesc, FieldElement

Vector = Tuple[FieldElement, FieldElement]


@dataclass(frozen=True)
class Mat2:
    """[[a, b], [c, d]]"""

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    @classmethod
    def identity(cls, field: FieldDesc) -> "Mat2":
        return cls(field.one, field.zero, field.zero, field.one)

    @classmethod
    def of(cls, field: FieldDesc, a, b, c, d) -> "Mat2":
        def coerce(x):
            return x if isinstance(x, FieldElement) else field.element(x)
        return cls(coerce(a), coerce(b), coerce(c), coerce(d))

    @classmethod
    def from_rows(cls, r1: Vector, r2: Vector) -> "Mat2":
        return cls(r1[0], r1[1], r2[0], r2[1])

    @classmethod
    def diag(cls, x: FieldElement, y: FieldElement) -> "Mat2":
        z = x.field.zero
        return cls(x, z, z, y)

    @property
    def field(self) -> FieldDesc:
        return self.a.field

    def rows(self) -> Tuple[Vector, Vector]:
        return ((self.a, self.b), (self.c, self.d))

    def entries(self) -> Tuple[FieldElement, FieldElement, FieldElement, FieldElement]:
        return (self.a, self.b, self.c, self.d)

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def adj(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "Mat2":
        det = self.det()
        if det.is_zero():
            raise RankError("Singular matrix has no inverse")
        inv = det.inverse()
        return Mat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def __mul__(self, other: Union["Mat2", FieldElement, int]) -> "Mat2":
        if isinstance(other, Mat2):
            return Mat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        if isinstance(other, (FieldElement, int)):
            return Mat2(self.a * other, self.b * other, self.c * other, self.d * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (FieldElement, int)):
            return self * other
        return NotImplemented

    def is_integral(self) -> bool:
        return all(e.is_integral() for e in self.entries())

    def is_singular(self) -> bool:
        return self.det().is_zero()

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def apply(v: Vector, M: Mat2) -> Vector:
    """Row vector times matrix"""
    return (v[0] * M.a + v[1] * M.c, v[0] * M.b + v[1] * M.d)
