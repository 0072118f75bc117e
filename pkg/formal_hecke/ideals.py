#!/usr/bin/env python3
"""
Integral and fractional ideals of the ring of integers
Hermite-normal-form ideals, their arithmetic, factorization and
the divisor functions phi, psi and eta
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import factorint, primerange

from .errors import (
    InexactDivisionError,
    NotContainedError,
    NotCoprimeError,
    PreconditionError,
)
from .qfield import FieldDesc, FieldElement
from .zlattice import hnf_basis, solve_two_row

logger = logging.getLogger(__name__)


def _int_coords(e: FieldElement) -> Tuple[int, int]:
    if not e.is_integral():
        raise PreconditionError(f"Element {e} is not integral")
    return (int(e.x), int(e.y))


@dataclass(frozen=True)
class Ideal:
    """Integral ideal with Z-basis {a, b + c*w} in Hermite normal form"""

    field: FieldDesc
    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if a <= 0 or c <= 0 or not 0 <= b < a or a % c or b % c:
            raise PreconditionError(f"[{a},{b},{c}] is not a reduced ideal basis")
        a1, b1 = a // c, b // c
        if (b1 * b1 + self.field.t * b1 + self.field.n) % a1:
            raise PreconditionError(f"[{a},{b},{c}] is not closed under multiplication by w")

    # construction

    @classmethod
    def unit(cls, field: FieldDesc) -> "Ideal":
        return cls(field, 1, 0, 1)

    @classmethod
    def from_gens(cls, field: FieldDesc, gens: Iterable[FieldElement]) -> "Ideal":
        """Smallest integral ideal containing the given integral elements"""
        vectors = []
        w = field.omega
        for g in gens:
            vectors.append(_int_coords(g))
            vectors.append(_int_coords(g * w))
        (a, _), (b, c) = hnf_basis(vectors, 2)
        return cls(field, a, b, c)

    @classmethod
    def principal(cls, g: Union[FieldElement, int], field: Optional[FieldDesc] = None) -> "Ideal":
        if isinstance(g, int):
            g = field.element(g)
        return cls.from_gens(g.field, [g])

    # basic data

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def hnf(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def basis(self) -> Tuple[FieldElement, FieldElement]:
        return (self.field.element(self.a), self.field.element(self.b, self.c))

    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.norm, self.a, self.b, self.c)

    def is_one(self) -> bool:
        return self.a == 1

    @property
    def frac(self) -> "FractionalIdeal":
        return FractionalIdeal(self, 1)

    def contains(self, e: FieldElement) -> bool:
        if not e.is_integral():
            return False
        x, y = int(e.x), int(e.y)
        if y % self.c:
            return False
        return (x - (y // self.c) * self.b) % self.a == 0

    def __contains__(self, e: FieldElement) -> bool:
        return self.contains(e)

    def divides(self, other: "Ideal") -> bool:
        """True when self contains other"""
        return all(self.contains(e) for e in other.basis())

    def is_coprime_to(self, other: "Ideal") -> bool:
        return (self + other).is_one()

    # arithmetic

    def __mul__(self, other):
        if isinstance(other, Ideal):
            gens = [x * y for x in self.basis() for y in other.basis()]
            return Ideal.from_gens(self.field, gens)
        if isinstance(other, FieldElement):
            return self.frac.scale(other)
        if isinstance(other, FractionalIdeal):
            return self.frac * other
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Ideal.unit(self.field)
        for _ in range(k):
            result = result * self
        return result

    def __add__(self, other):
        if isinstance(other, Ideal):
            return Ideal.from_gens(self.field, list(self.basis()) + list(other.basis()))
        if isinstance(other, FractionalIdeal):
            return self.frac + other
        return NotImplemented

    def intersect(self, other):
        if isinstance(other, Ideal):
            return (self.frac.intersect(other.frac)).as_integral()
        return self.frac.intersect(other)

    def conj(self) -> "Ideal":
        return Ideal.from_gens(self.field, [e.conj() for e in self.basis()])

    def inverse(self) -> "FractionalIdeal":
        return FractionalIdeal(self.conj(), self.norm)

    def divide(self, other, integral: bool = False):
        result = self.frac / other
        if integral:
            return result.as_integral()
        return result

    def __truediv__(self, other):
        return self.divide(other)

    def reduce(self, e: FieldElement) -> FieldElement:
        """Representative of e modulo self in the box 0 <= x < a, 0 <= y < c"""
        x, y = _int_coords(e)
        k = y // self.c
        y -= k * self.c
        x = (x - k * self.b) % self.a
        return self.field.element(x, y)

    def residues(self) -> List[FieldElement]:
        """Residue system of O/self, ordered by (y, x)"""
        return [self.field.element(x, y) for y in range(self.c) for x in range(self.a)]

    def __str__(self) -> str:
        return f"[{self.a},{self.b},{self.c}]"


@dataclass(frozen=True)
class FractionalIdeal:
    """numerator / denominator with the common content removed"""

    numerator: Ideal
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise PreconditionError("Denominator must be positive")
        g = gcd(self.denominator, self.numerator.c)
        if g > 1:
            num = self.numerator
            object.__setattr__(self, "numerator", Ideal(num.field, num.a // g, num.b // g, num.c // g))
            object.__setattr__(self, "denominator", self.denominator // g)

    @classmethod
    def from_gens(cls, field: FieldDesc, gens: Iterable[FieldElement]) -> "FractionalIdeal":
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            raise PreconditionError("Ideal generated by zero elements")
        den = 1
        for g in gens:
            den = lcm(den, g.denominator())
        return cls(Ideal.from_gens(field, [g * den for g in gens]), den)

    @classmethod
    def unit(cls, field: FieldDesc) -> "FractionalIdeal":
        return cls(Ideal.unit(field), 1)

    @property
    def field(self) -> FieldDesc:
        return self.numerator.field

    @property
    def frac(self) -> "FractionalIdeal":
        return self

    def norm(self) -> Fraction:
        return Fraction(self.numerator.norm, self.denominator ** 2)

    def basis(self) -> Tuple[FieldElement, FieldElement]:
        e1, e2 = self.numerator.basis()
        return (e1 / self.denominator, e2 / self.denominator)

    def sort_key(self) -> Tuple:
        return (self.norm(), self.denominator, self.numerator.hnf)

    def is_integral(self) -> bool:
        return self.denominator == 1

    def is_one(self) -> bool:
        return self.denominator == 1 and self.numerator.is_one()

    def as_integral(self) -> Ideal:
        if self.denominator != 1:
            raise InexactDivisionError(f"Fractional ideal {self} is not integral")
        return self.numerator

    def contains(self, e: FieldElement) -> bool:
        return self.numerator.contains(e * self.denominator)

    def __contains__(self, e: FieldElement) -> bool:
        return self.contains(e)

    def contains_ideal(self, other) -> bool:
        return all(self.contains(e) for e in as_fractional(other).basis())

    def scale(self, e: FieldElement) -> "FractionalIdeal":
        if e.is_zero():
            raise PreconditionError("Cannot scale an ideal by zero")
        return FractionalIdeal.from_gens(self.field, [e * b for b in self.basis()])

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            return self.scale(other)
        if isinstance(other, (Ideal, FractionalIdeal)):
            o = as_fractional(other)
            return FractionalIdeal(self.numerator * o.numerator, self.denominator * o.denominator)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "FractionalIdeal":
        if k < 0:
            return self.inverse() ** (-k)
        result = FractionalIdeal.unit(self.field)
        for _ in range(k):
            result = result * self
        return result

    def __add__(self, other):
        if not isinstance(other, (Ideal, FractionalIdeal)):
            return NotImplemented
        return FractionalIdeal.from_gens(self.field, list(self.basis()) + list(as_fractional(other).basis()))

    __radd__ = __add__

    def inverse(self) -> "FractionalIdeal":
        num = self.numerator
        return FractionalIdeal(num.conj(), num.norm).scale(self.field.element(self.denominator))

    def __truediv__(self, other) -> "FractionalIdeal":
        if isinstance(other, FieldElement):
            return self.scale(other.inverse())
        return self * as_fractional(other).inverse()

    def intersect(self, other) -> "FractionalIdeal":
        o = as_fractional(other)
        return (self * o) / (self + o)

    def __str__(self) -> str:
        if self.denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"


def as_fractional(x) -> FractionalIdeal:
    if isinstance(x, FractionalIdeal):
        return x
    if isinstance(x, Ideal):
        return FractionalIdeal(x, 1)
    if isinstance(x, FieldElement):
        return FractionalIdeal.from_gens(x.field, [x])
    raise PreconditionError(f"Cannot interpret {x!r} as an ideal")


def ideal_from_gens(field: FieldDesc, gens: Sequence[FieldElement]) -> FractionalIdeal:
    """Smallest fractional ideal containing the generators, in canonical form"""
    return FractionalIdeal.from_gens(field, gens)


# principal ideals and generators

def principal_generator(ideal) -> Optional[FieldElement]:
    """A generator of a principal ideal (minimal sort_key), or None"""
    f = as_fractional(ideal)
    num = f.numerator
    for e in num.field.elements_of_norm(num.norm):
        if num.contains(e):
            return e / f.denominator
    return None


def is_principal(ideal) -> bool:
    return principal_generator(ideal) is not None


def _small_combinations(radius: int) -> Iterable[Tuple[int, int]]:
    for r in range(1, radius + 1):
        ring = [(u, v) for u in range(-r, r + 1) for v in range(-r, r + 1) if max(abs(u), abs(v)) == r]
        ring.sort(key=lambda uv: (abs(uv[1]), abs(uv[0]), -uv[1], -uv[0]))
        yield from ring


def small_elements(ideal, radius: int = 12) -> Iterable[FieldElement]:
    """Nonzero elements u*e1 + v*e2 of the ideal in order of growing coefficients"""
    e1, e2 = as_fractional(ideal).basis()
    for u, v in _small_combinations(radius):
        yield e1 * u + e2 * v


def second_generator(ideal, first: FieldElement, radius: int = 40) -> FieldElement:
    """Some beta with <first, beta> equal to the ideal"""
    target = as_fractional(ideal)
    if not target.contains(first):
        raise NotContainedError(f"{first} is not in {target}")
    for beta in small_elements(target, radius):
        if FractionalIdeal.from_gens(target.field, [first, beta]) == target:
            return beta
    raise PreconditionError(f"No second generator found for {target} with first {first}")


def smallest_positive_integer(ideal) -> Fraction:
    f = as_fractional(ideal)
    return Fraction(f.numerator.a, f.denominator)


def two_generators(ideal, constraint: Optional[Ideal] = None) -> Tuple[FieldElement, FieldElement]:
    """(alpha, beta) generating the ideal, alpha in the constraint ideal when given"""
    f = as_fractional(ideal)
    meet = f.intersect(constraint) if constraint is not None else f
    alpha = f.field.element(smallest_positive_integer(meet))
    return alpha, second_generator(f, alpha)


def solve_in_ideals(target: FieldElement, terms: Sequence[Tuple[FieldElement, object]]) -> List[FieldElement]:
    """Elements r_i of the given ideals with sum coef_i * r_i = target.

    Raises NotContainedError when target is outside sum coef_i * ideal_i.
    """
    columns = []
    bases = []
    for coef, ideal in terms:
        e1, e2 = as_fractional(ideal).basis()
        bases.append((e1, e2))
        columns.extend([coef * e1, coef * e2])
    den = target.denominator()
    for col in columns:
        den = lcm(den, col.denominator())
    int_cols = [(int(c.x * den), int(c.y * den)) for c in columns]
    sol = solve_two_row(int_cols, (int(target.x * den), int(target.y * den)))
    if sol is None:
        raise NotContainedError(f"{target} is not in the span of the given ideals")
    return [e1 * sol[2 * i] + e2 * sol[2 * i + 1] for i, (e1, e2) in enumerate(bases)]


def crt_split(A, B) -> Tuple[FieldElement, FieldElement]:
    """(e, f) with e in A, f in B and e + f = 1 for coprime A, B"""
    field = as_fractional(A).field
    try:
        e, f = solve_in_ideals(field.one, [(field.one, A), (field.one, B)])
    except NotContainedError:
        raise NotCoprimeError(f"{A} and {B} are not coprime")
    return e, f


def crt_element(field: FieldDesc, congruences: Sequence[Tuple[FieldElement, Ideal]]) -> FieldElement:
    """x with x = r mod I for each (r, I), the ideals pairwise coprime"""
    x = field.zero
    modulus = Ideal.unit(field)
    for r, I in congruences:
        e, f = crt_split(modulus, I)
        x = x * f + r * e
        modulus = modulus * I
    return modulus.reduce(x)


# factorization

def primes_above(field: FieldDesc, p: int) -> List[Ideal]:
    """Prime ideals above the rational prime p"""
    roots = [r for r in range(p) if (r * r - field.t * r + field.n) % p == 0]
    if not roots:
        return [Ideal(field, p, 0, p)]
    return sorted((Ideal(field, p, (-r) % p, 1) for r in roots), key=lambda P: P.sort_key())


def valuation(ideal: Ideal, prime: Ideal) -> int:
    v = 0
    J = ideal
    inv = prime.inverse()
    while prime.divides(J):
        J = (J.frac * inv).as_integral()
        v += 1
    return v


def factor(ideal: Ideal) -> List[Tuple[Ideal, int]]:
    """Prime factorization, primes sorted by norm then HNF"""
    out = []
    for p in sorted(factorint(ideal.norm)):
        for P in primes_above(ideal.field, p):
            v = valuation(ideal, P)
            if v:
                out.append((P, v))
    return sorted(out, key=lambda pe: pe[0].sort_key())


def prime_divisors(ideal: Ideal) -> List[Ideal]:
    return [P for P, _ in factor(ideal)]


def product(ideals: Iterable[Ideal], field: FieldDesc) -> Ideal:
    result = Ideal.unit(field)
    for I in ideals:
        result = result * I
    return result


def euler_phi(n: Ideal) -> int:
    value = Fraction(n.norm)
    for P, _ in factor(n):
        value *= 1 - Fraction(1, P.norm)
    return int(value)


def euler_psi(n: Ideal) -> int:
    value = Fraction(n.norm)
    for P, _ in factor(n):
        value *= 1 + Fraction(1, P.norm)
    return int(value)


def eta(b: Ideal) -> int:
    """Number of sublattices of index b in a rank-2 lattice"""
    value = 1
    for P, e in factor(b):
        value *= sum(P.norm ** i for i in range(e + 1))
    return value


def exact_divisors(n: Ideal) -> List[Ideal]:
    """Divisors q of n with q + n/q = O"""
    powers = [P ** e for P, e in factor(n)]
    out = set()
    for mask in itertools.product((0, 1), repeat=len(powers)):
        out.add(product((q for q, bit in zip(powers, mask) if bit), n.field))
    return sorted(out, key=lambda I: I.sort_key())


def divisors(n: Ideal) -> List[Ideal]:
    fac = factor(n)
    out = []
    for exps in itertools.product(*(range(e + 1) for _, e in fac)):
        out.append(product((P ** k for (P, _), k in zip(fac, exps)), n.field))
    return sorted(out, key=lambda I: I.sort_key())


def is_exact_divisor(q: Ideal, n: Ideal) -> bool:
    if not q.divides(n):
        return False
    return q.is_coprime_to(n.divide(q, integral=True))


def ideals_of_norm(field: FieldDesc, N: int) -> List[Ideal]:
    """All integral ideals of norm N, sorted by HNF"""
    out = []
    for c in range(1, isqrt(N) + 1):
        if N % (c * c):
            continue
        a1 = N // (c * c)
        for b1 in range(a1):
            if (b1 * b1 + field.t * b1 + field.n) % a1 == 0:
                out.append(Ideal(field, a1 * c, b1 * c, c))
    return sorted(out, key=lambda I: I.sort_key())


def ideals_up_to_norm(field: FieldDesc, bound: int) -> List[Ideal]:
    out = []
    for N in range(1, bound + 1):
        out.extend(ideals_of_norm(field, N))
    return out


def primes_up_to(field: FieldDesc, bound: int) -> List[Ideal]:
    """Prime ideals of norm at most bound, sorted by norm then HNF"""
    out = []
    for p in primerange(2, bound + 1):
        out.extend(P for P in primes_above(field, p) if P.norm <= bound)
    return sorted(out, key=lambda P: P.sort_key())
