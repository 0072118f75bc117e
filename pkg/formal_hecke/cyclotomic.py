#!/usr/bin/env python3
"""
Exact coefficient fields for eigenvalues
CycValue lives in Q(zeta_m), AdjoinedValue adds formal square roots,
UnramifiedCharacter evaluates characters of the class group
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

from sympy import Poly, QQ, Rational, Symbol, cyclotomic_poly, totient
from sympy.polys.polyerrors import NotInvertible

from .cache_manager import cache_result
from .errors import FieldArithmeticError, PreconditionError

logger = logging.getLogger(__name__)

_z = Symbol("z")

Rat = Union[int, Fraction]


@cache_result(key_prefix="cyclotomic.phi")
def cyclotomic_modulus(m: int) -> Poly:
    return Poly(cyclotomic_poly(m, _z), _z, domain=QQ)


def _to_fraction(c) -> Fraction:
    r = Rational(c)
    return Fraction(int(r.p), int(r.q))


@dataclass(frozen=True, eq=False)
class CycValue:
    """sum coeffs[i] * zeta_m^i reduced modulo the m-th cyclotomic polynomial"""

    m: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        degree = int(totient(self.m))
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != degree:
            raise PreconditionError(f"Q(zeta_{self.m}) needs {degree} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    # construction

    @classmethod
    def rational(cls, q: Rat, m: int = 1) -> "CycValue":
        degree = int(totient(m))
        return cls(m, (Fraction(q),) + (Fraction(0),) * (degree - 1))

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycValue":
        """zeta_m^k"""
        return cls._from_poly(m, Poly(_z ** (k % m), _z, domain=QQ))

    @classmethod
    def _from_poly(cls, m: int, poly: Poly) -> "CycValue":
        rem = poly.rem(cyclotomic_modulus(m))
        coeffs = [_to_fraction(c) for c in reversed(rem.all_coeffs())]
        degree = int(totient(m))
        coeffs += [Fraction(0)] * (degree - len(coeffs))
        return cls(m, tuple(coeffs[:degree]))

    def _poly(self) -> Poly:
        return Poly([Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)], _z, domain=QQ)

    def lift(self, m2: int) -> "CycValue":
        """The same value inside Q(zeta_m2), m dividing m2"""
        if m2 == self.m:
            return self
        if m2 % self.m:
            raise PreconditionError(f"Q(zeta_{self.m}) is not contained in Q(zeta_{m2})")
        step = m2 // self.m
        terms = {i * step: Rational(c.numerator, c.denominator) for i, c in enumerate(self.coeffs) if c}
        if not terms:
            return CycValue.rational(0, m2)
        poly = Poly.from_dict({(k,): v for k, v in terms.items()}, _z, domain=QQ)
        return CycValue._from_poly(m2, poly)

    # arithmetic

    def _align(self, other) -> Tuple["CycValue", "CycValue"]:
        if isinstance(other, (int, Fraction)):
            return self, CycValue.rational(other, self.m)
        if isinstance(other, CycValue):
            if other.m == self.m:
                return self, other
            m = lcm(self.m, other.m)
            return self.lift(m), other.lift(m)
        return None

    def __add__(self, other):
        pair = self._align(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycValue(a.m, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CycValue":
        return CycValue(self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        pair = self._align(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycValue(a.m, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycValue(self.m, tuple(c * other for c in self.coeffs))
        pair = self._align(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycValue._from_poly(a.m, a._poly() * b._poly())

    __rmul__ = __mul__

    def inverse(self) -> "CycValue":
        if self.is_zero():
            raise FieldArithmeticError("Division by zero in a cyclotomic field", {"m": self.m})
        if self.is_rational():
            return CycValue.rational(1 / self.coeffs[0], self.m)
        try:
            inv = self._poly().invert(cyclotomic_modulus(self.m))
        except NotInvertible:
            raise FieldArithmeticError("Element is not invertible", {"value": str(self)})
        return CycValue._from_poly(self.m, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise FieldArithmeticError("Division by zero in a cyclotomic field", {"m": self.m})
            return CycValue(self.m, tuple(c / other for c in self.coeffs))
        if isinstance(other, CycValue):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return CycValue.rational(other, self.m) * self.inverse()

    def __pow__(self, k: int) -> "CycValue":
        if k < 0:
            return self.inverse() ** (-k)
        result = CycValue.rational(1, self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # predicates

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise PreconditionError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other) -> bool:
        pair = self._align(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.m, self.coeffs))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            num = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if i == 0:
                terms.append(num)
            elif c == 1:
                terms.append(f"z^{i}")
            else:
                terms.append(f"{num}*z^{i}")
        return "+".join(terms).replace("+-", "-") if terms else "0"


def as_cyc(x, m: int = 1) -> CycValue:
    if isinstance(x, CycValue):
        return x
    return CycValue.rational(x, m)


Subset = FrozenSet[int]


class AdjoinedValue:
    """sum over subsets S of c_S * prod_{i in S} sqrt(v_i)

    The radicands v_i are cyclotomic values; products of equal roots
    collapse to the radicand.
    """

    def __init__(self, radicands: Sequence[CycValue], terms: Dict[Subset, CycValue]):
        self.radicands: Tuple[CycValue, ...] = tuple(radicands)
        cleaned = {frozenset(S): c for S, c in terms.items() if not as_cyc(c).is_zero()}
        self.terms: Dict[Subset, CycValue] = {S: as_cyc(c) for S, c in cleaned.items()}

    @classmethod
    def sqrt(cls, v: CycValue, sign: int = 1) -> "AdjoinedValue":
        return cls([v], {frozenset([0]): CycValue.rational(sign, v.m)})

    @classmethod
    def of(cls, x) -> "AdjoinedValue":
        if isinstance(x, AdjoinedValue):
            return x
        return cls([], {frozenset(): as_cyc(x)})

    def _merge(self, other: "AdjoinedValue") -> Tuple["AdjoinedValue", "AdjoinedValue"]:
        radicands = list(self.radicands)
        remap: Dict[int, int] = {}
        for i, v in enumerate(other.radicands):
            for j, w in enumerate(radicands):
                if w == v:
                    remap[i] = j
                    break
            else:
                remap[i] = len(radicands)
                radicands.append(v)
        left = AdjoinedValue(radicands, self.terms)
        right = AdjoinedValue(radicands, {frozenset(remap[i] for i in S): c for S, c in other.terms.items()})
        return left, right

    def __add__(self, other):
        if not isinstance(other, (AdjoinedValue, CycValue, int, Fraction)):
            return NotImplemented
        a, b = self._merge(AdjoinedValue.of(other))
        terms = dict(a.terms)
        for S, c in b.terms.items():
            terms[S] = terms[S] + c if S in terms else c
        return AdjoinedValue(a.radicands, terms)

    __radd__ = __add__

    def __neg__(self) -> "AdjoinedValue":
        return AdjoinedValue(self.radicands, {S: -c for S, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-AdjoinedValue.of(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (AdjoinedValue, CycValue, int, Fraction)):
            return NotImplemented
        a, b = self._merge(AdjoinedValue.of(other))
        terms: Dict[Subset, CycValue] = {}
        for S, c in a.terms.items():
            for T, d in b.terms.items():
                coeff = c * d
                for i in S & T:
                    coeff = coeff * a.radicands[i]
                key = S ^ T
                terms[key] = terms[key] + coeff if key in terms else coeff
        return AdjoinedValue(a.radicands, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (CycValue, int, Fraction)):
            return self * as_cyc(other).inverse()
        collapsed = AdjoinedValue.of(other).collapse()
        if isinstance(collapsed, CycValue):
            return self * collapsed.inverse()
        raise PreconditionError("Division by a value with formal square roots")

    def __pow__(self, k: int) -> "AdjoinedValue":
        if k < 0:
            raise PreconditionError("Negative powers of adjoined values are not supported")
        result = AdjoinedValue.of(1)
        for _ in range(k):
            result = result * self
        return result

    def is_zero(self) -> bool:
        return not self.terms

    def collapse(self) -> Union[CycValue, "AdjoinedValue"]:
        """The plain cyclotomic value when no square root survives"""
        if not self.terms:
            return CycValue.rational(0)
        if set(self.terms) == {frozenset()}:
            return self.terms[frozenset()]
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, (AdjoinedValue, CycValue, int, Fraction)):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        collapsed = self.collapse()
        if isinstance(collapsed, CycValue):
            return hash(collapsed)
        return hash(frozenset(self.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for S in sorted(self.terms, key=lambda s: (len(s), sorted(s))):
            roots = "*".join(f"sqrt({self.radicands[i]})" for i in sorted(S))
            c = self.terms[S]
            parts.append(f"({c})*{roots}" if roots else f"({c})")
        return " + ".join(parts)


Value = Union[CycValue, AdjoinedValue]


def simplify(x) -> Value:
    if isinstance(x, AdjoinedValue):
        return x.collapse()
    return as_cyc(x)


def value_is_zero(x) -> bool:
    if isinstance(x, (CycValue, AdjoinedValue)):
        return x.is_zero()
    return x == 0


# characters of the class group

@dataclass(frozen=True)
class UnramifiedCharacter:
    """Character of the class group given by exponents on the cyclic factors"""

    structure: Tuple[int, ...]
    exponents: Tuple[int, ...]
    conductor: int = 0

    def __post_init__(self):
        exps = tuple(k % d for k, d in zip(self.exponents, self.structure))
        object.__setattr__(self, "exponents", exps)
        if not self.conductor:
            object.__setattr__(self, "conductor", default_conductor(self.structure))
        if self.conductor % group_exponent(self.structure):
            raise PreconditionError(f"Conductor {self.conductor} does not carry the character values")

    @classmethod
    def trivial(cls, structure: Sequence[int], conductor: int = 0) -> "UnramifiedCharacter":
        return cls(tuple(structure), tuple(0 for _ in structure), conductor)

    def _index(self, class_exponents: Sequence[int]) -> int:
        m = self.conductor
        return sum(k * e * (m // d) for k, e, d in zip(self.exponents, class_exponents, self.structure)) % m

    def __call__(self, c) -> CycValue:
        """Value at an ideal class"""
        return CycValue.zeta(self.conductor, self._index(c.exponents))

    def of_ideal(self, cg, ideal) -> CycValue:
        return self(cg.class_of(ideal))

    def __mul__(self, other: "UnramifiedCharacter") -> "UnramifiedCharacter":
        return UnramifiedCharacter(
            self.structure,
            tuple(a + b for a, b in zip(self.exponents, other.exponents)),
            lcm(self.conductor, other.conductor),
        )

    def __pow__(self, k: int) -> "UnramifiedCharacter":
        return UnramifiedCharacter(self.structure, tuple(a * k for a in self.exponents), self.conductor)

    def inverse(self) -> "UnramifiedCharacter":
        return self ** -1

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def order(self) -> int:
        result = 1
        for k, d in zip(self.exponents, self.structure):
            result = lcm(result, d // gcd(k, d))
        return result

    def is_quadratic(self) -> bool:
        return self.order() <= 2

    def trivial_on(self, classes: Iterable) -> bool:
        return all(self._index(c.exponents) == 0 for c in classes)

    def __str__(self) -> str:
        return "chi(" + ",".join(str(k) for k in self.exponents) + ")"


def group_exponent(structure: Sequence[int]) -> int:
    result = 1
    for d in structure:
        result = lcm(result, d)
    return result


def default_conductor(structure: Sequence[int]) -> int:
    """Smallest m with all character values and signs in Q(zeta_m)"""
    return lcm(2, group_exponent(structure))


def all_characters(structure: Sequence[int], conductor: int = 0) -> List[UnramifiedCharacter]:
    """Every character of the group, trivial first"""
    return [
        UnramifiedCharacter(tuple(structure), exps, conductor)
        for exps in itertools.product(*(range(d) for d in structure))
    ]


def quadratic_characters(structure: Sequence[int], conductor: int = 0) -> List[UnramifiedCharacter]:
    return [psi for psi in all_characters(structure, conductor) if psi.is_quadratic()]
