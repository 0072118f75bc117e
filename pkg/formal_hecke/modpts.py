#!/usr/bin/env python3
"""
Modular points for Gamma_0(n) and Gamma_1(n)
Standard points, admissible bases, diamond operators and formal sums
of points with exact coefficients
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from .cache_manager import cache_result
from .classgroup import ClassGroup, IdealClass, class_group
from .errors import NotContainedError, NotCoprimeError, PreconditionError
from .ideals import (
    FractionalIdeal,
    Ideal,
    as_fractional,
    principal_generator,
    second_generator,
    small_elements,
    solve_in_ideals,
)
from .linmod import PseudoLattice, add_vectors, elementary_divisors, from_vec4, scale_vector
from .mat2 import Mat2, Vector, apply
from .msym import ResidueRing
from .qfield import FieldElement

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ModularPoint0:
    """A pair L inside Lp with Lp/L cyclic of order n"""

    L: PseudoLattice
    Lp: PseudoLattice
    level: Ideal

    @property
    def field(self):
        return self.level.field

    def key(self) -> Tuple:
        return (self.L.key, self.Lp.key)

    def sort_key(self) -> Tuple:
        return self.key()

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.level == other.level and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.level, self.key()))

    def point_class(self, cg: ClassGroup) -> IdealClass:
        return self.L.steinitz_class(cg)

    def times(self, U: Mat2) -> "ModularPoint0":
        return ModularPoint0(self.L.times(U), self.Lp.times(U), self.level)

    def scale(self, a) -> "ModularPoint0":
        return ModularPoint0(self.L.scale(a), self.Lp.scale(a), self.level)

    def gamma0(self) -> "ModularPoint0":
        return self

    def __str__(self) -> str:
        return f"({self.L.canonical()}, {self.Lp.canonical()})"


@dataclass(frozen=True, eq=False)
class ModularPoint1(ModularPoint0):
    """A Gamma_0 point with a generator beta of Lp/L, kept reduced modulo L"""

    beta: Vector = None

    def __post_init__(self):
        if self.beta is None:
            raise PreconditionError("Gamma_1 point needs a generator")
        object.__setattr__(self, "beta", self.L.reduce_vector(self.beta))

    def key(self) -> Tuple:
        return (self.L.key, self.Lp.key, tuple(c for e in self.beta for c in e.coords()))

    def times(self, U: Mat2) -> "ModularPoint1":
        return ModularPoint1(self.L.times(U), self.Lp.times(U), self.level, apply(self.beta, U))

    def scale(self, a) -> "ModularPoint1":
        if not isinstance(a, FieldElement):
            raise PreconditionError("Gamma_1 points only scale by field elements")
        return ModularPoint1(self.L.scale(a), self.Lp.scale(a), self.level, scale_vector(a, self.beta))

    def with_beta(self, beta: Vector) -> "ModularPoint1":
        return ModularPoint1(self.L, self.Lp, self.level, beta)

    def gamma0(self) -> ModularPoint0:
        return ModularPoint0(self.L, self.Lp, self.level)

    def __str__(self) -> str:
        return f"({self.L.canonical()}, {self.Lp.canonical()}, ({self.beta[0]}, {self.beta[1]}))"


ModularPoint = Union[ModularPoint0, ModularPoint1]


# validation

def validate0(P: ModularPoint0) -> bool:
    try:
        a1, a2 = elementary_divisors(P.Lp, P.L)
    except NotContainedError:
        return False
    return a1.is_one() and a2 == P.level


def validate1(P: ModularPoint1) -> bool:
    if not validate0(P):
        return False
    if not P.Lp.contains_vector(P.beta):
        return False
    return P.L.add_vectors([P.beta]) == P.Lp


def validate(P: ModularPoint) -> bool:
    if isinstance(P, ModularPoint1):
        return validate1(P)
    return validate0(P)


def apply_matrix(P: ModularPoint, U: Mat2) -> ModularPoint:
    """P*U = (L*U, Lp*U[, beta*U])"""
    return P.times(U)


# standard points

@cache_result(key_prefix="modpts.n0")
def level_generator(n: Ideal) -> FieldElement:
    """n0 with n^-1 = <1, n0>, fixed once per level"""
    field = n.field
    if n.is_one():
        return field.zero
    return second_generator(n.inverse(), field.one)


@cache_result(key_prefix="modpts.zj")
def gamma1_scalars(n: Ideal) -> List[FieldElement]:
    """z_j with a_j*q_j = <z_j> and a_j coprime to n, one per square class"""
    cg = class_group(n.field, n)
    out = []
    for q in cg.reps_q:
        a = cg.ideal_in_class_coprime_to(cg.class_of(q).inverse(), n)
        out.append(principal_generator(a * q))
    return out


def _standard_lattices(i: int, j: int, n: Ideal, cg: ClassGroup) -> Tuple[PseudoLattice, PseudoLattice]:
    p = cg.reps_p[i - 1]
    q = cg.reps_q[j - 1]
    pq = p * q
    L = PseudoLattice.split(pq, q)
    Lp = PseudoLattice.split(pq, q.frac * n.inverse())
    return L, Lp


def standard_point0(i: int, j: int, n: Ideal, cg: Optional[ClassGroup] = None) -> ModularPoint0:
    """(p_i q_j + q_j, p_i q_j + q_j n^-1)"""
    cg = cg or class_group(n.field, n)
    L, Lp = _standard_lattices(i, j, n, cg)
    return ModularPoint0(L, Lp, n)


def standard_beta(j: int, n: Ideal) -> Vector:
    field = n.field
    return (field.zero, level_generator(n) * gamma1_scalars(n)[j - 1])


def standard_point1(i: int, j: int, n: Ideal, cg: Optional[ClassGroup] = None) -> ModularPoint1:
    """Standard point with beta_j = (0, n0*z_j)"""
    cg = cg or class_group(n.field, n)
    L, Lp = _standard_lattices(i, j, n, cg)
    return ModularPoint1(L, Lp, n, standard_beta(j, n))


def standard_points0(n: Ideal, cg: Optional[ClassGroup] = None) -> List[ModularPoint0]:
    cg = cg or class_group(n.field, n)
    return [standard_point0(i, j, n, cg) for i in range(1, cg.h2 + 1) for j in range(1, cg.h2prime + 1)]


def point_indices(P: ModularPoint, cg: ClassGroup) -> Tuple[int, int]:
    return cg.decompose(P.point_class(cg))


# admissible bases

def _line_ideal(L: PseudoLattice, v: Vector) -> FractionalIdeal:
    """{x : x*v in L}"""
    s = apply(v, L.U.inverse())
    parts = [as_fractional(c).inverse() * b for c, b in zip(s, (L.b1, L.b2)) if not c.is_zero()]
    result = parts[0]
    for extra in parts[1:]:
        result = result.intersect(extra)
    return result


def _small_lattice_vectors(L: PseudoLattice, radius: int = 2) -> Iterator[Vector]:
    basis = [from_vec4(L.field, v) for v in L.z_basis()]
    combos = sorted(
        itertools.product(range(-radius, radius + 1), repeat=len(basis)),
        key=lambda cs: (sum(abs(c) for c in cs), [-c for c in cs]),
    )
    for cs in combos:
        if not any(cs):
            continue
        v = (L.field.zero, L.field.zero)
        for c, b in zip(cs, basis):
            if c:
                v = add_vectors(v, scale_vector(L.field.element(c), b))
        yield v


def _adapted_basis(P: ModularPoint0) -> Tuple[FractionalIdeal, FractionalIdeal, Mat2]:
    """(I, J, U0) with L = (I + nJ)U0 and Lp = (I + J)U0"""
    field = P.field
    v1 = None
    for v in _small_lattice_vectors(P.L):
        if _line_ideal(P.L, v) == _line_ideal(P.Lp, v):
            v1 = v
            break
    if v1 is None:
        raise PreconditionError(f"No adapted vector found for {P}")
    e2 = (field.zero, field.one) if not v1[0].is_zero() else (field.one, field.zero)
    B = Mat2.from_rows(v1, e2)
    Cp = P.Lp.times(B.inverse()).canonical()
    return Cp.b1, Cp.b2, Cp.U * B


def admissible_basis0(P: ModularPoint0, cg: Optional[ClassGroup] = None) -> Mat2:
    """U with P = P_ij * U for the standard point of the class of P"""
    n = P.level
    cg = cg or class_group(n.field, n)
    field = n.field
    i, j = point_indices(P, cg)
    p = cg.reps_p[i - 1]
    q = cg.reps_q[j - 1]
    Q = ModularPoint0(P.L.scale(q.inverse()), P.Lp.scale(q.inverse()), n)
    b1, b2, U0 = _adapted_basis(Q)
    nb1 = n.frac * b1
    nb2 = n.frac * b2
    t = principal_generator(b1 * b2 * n / p)
    if t is None:
        raise PreconditionError(f"Class bookkeeping failed for {P}")
    a = cg.ideal_in_class_coprime_to(cg.class_of(nb1).inverse())
    z = principal_generator(a * nb1)
    an = a * n
    x = None
    for cand in small_elements(nb2.inverse()):
        if (nb2.scale(cand).as_integral()).is_coprime_to(an):
            x = cand
            break
    if x is None:
        raise PreconditionError(f"No coprime element found while building a basis for {P}")
    w, y = solve_in_ideals(field.one, [(x, nb2), (-z, b1.inverse())])
    V = Mat2(x, y, z, w)
    U = Mat2.diag(t, field.one) * V * U0
    logger.debug(f"Admissible basis {U} for point of class ({i},{j})")
    return U


def _gamma_u(u: FieldElement, p: Ideal, n: Ideal) -> Mat2:
    """Element of Gamma_0^p(n) with determinant 1 and (2,2)-entry congruent to u mod n"""
    field = n.field
    pinv = p.inverse()
    shifts = [field.zero] + list(small_elements(n))
    for c in small_elements(n * p):
        cp = (pinv * c)
        for s in shifts:
            d = u + s
            if d.is_zero():
                continue
            if (as_fractional(d) + cp).is_one():
                a, b = solve_in_ideals(field.one, [(d, Ideal.unit(field)), (-c, pinv)])
                return Mat2(a, b, c, d)
    raise PreconditionError(f"No Gamma_0 element with lower-right entry {u}")


def admissible_basis1(P: ModularPoint1, cg: Optional[ClassGroup] = None) -> Mat2:
    """U with P equal to the standard Gamma_1 point times U"""
    n = P.level
    cg = cg or class_group(n.field, n)
    U = admissible_basis0(P.gamma0(), cg)
    if n.is_one():
        return U
    i, j = point_indices(P, cg)
    q = cg.reps_q[j - 1]
    y = apply(P.beta, U.inverse())[1]
    nj = standard_beta(j, n)[1]
    ring = ResidueRing(n)
    for r in ring.units():
        u = ring.element(r)
        if q.frac.contains(y - u * nj):
            return _gamma_u(u, cg.reps_p[i - 1], n) * U
    raise PreconditionError(f"Generator of {P} is not a unit multiple of the standard one")


def in_gamma0p(M: Mat2, p: Ideal, n: Ideal) -> bool:
    """Membership in Gamma_0^p(n)"""
    return (
        M.a.is_integral()
        and M.d.is_integral()
        and p.inverse().contains(M.b)
        and (n * p).contains(M.c)
        and M.det().is_unit()
    )


def in_gamma1p(M: Mat2, p: Ideal, n: Ideal) -> bool:
    return in_gamma0p(M, p, n) and n.contains(M.d - 1)


def diamond(alpha: FieldElement, P: ModularPoint1) -> ModularPoint1:
    """<alpha>(L, Lp, beta) = (L, Lp, alpha*beta)"""
    if not alpha.is_integral() or alpha.is_zero() or not Ideal.principal(alpha).is_coprime_to(P.level):
        raise NotCoprimeError(f"{alpha} is not a unit modulo {P.level}")
    return P.with_beta(scale_vector(alpha, P.beta))


# formal sums

Coefficient = Union[int, Fraction, object]


def _is_zero(c) -> bool:
    return c == 0


class FormalSum:
    """Finite linear combination of modular points with exact coefficients"""

    def __init__(self, level: Ideal, terms: Iterable[Tuple[ModularPoint, Coefficient]] = ()):
        self.level = level
        merged: Dict[ModularPoint, Coefficient] = {}
        for point, coeff in terms:
            if point.level != level:
                raise PreconditionError(f"Point of level {point.level} in a sum of level {level}")
            if point in merged:
                merged[point] = merged[point] + coeff
            else:
                merged[point] = coeff
        items = [(pt, c) for pt, c in merged.items() if not _is_zero(c)]
        items.sort(key=lambda item: item[0].sort_key())
        self.terms: Tuple[Tuple[ModularPoint, Coefficient], ...] = tuple(items)

    @classmethod
    def point(cls, P: ModularPoint, coeff: Coefficient = 1) -> "FormalSum":
        return cls(P.level, [(P, Fraction(coeff) if isinstance(coeff, int) else coeff)])

    @classmethod
    def zero(cls, level: Ideal) -> "FormalSum":
        return cls(level)

    def __iter__(self) -> Iterator[Tuple[ModularPoint, Coefficient]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def points(self) -> List[ModularPoint]:
        return [p for p, _ in self.terms]

    def coefficient(self, P: ModularPoint) -> Coefficient:
        for point, coeff in self.terms:
            if point == P:
                return coeff
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FormalSum") -> "FormalSum":
        if self.level != other.level:
            raise PreconditionError("Cannot add formal sums of different levels")
        return FormalSum(self.level, list(self.terms) + list(other.terms))

    def __neg__(self) -> "FormalSum":
        return FormalSum(self.level, [(p, -c) for p, c in self.terms])

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __mul__(self, scalar) -> "FormalSum":
        return FormalSum(self.level, [(p, c * scalar) for p, c in self.terms])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self.level == other.level and (self - other).is_zero()

    def __hash__(self):
        return hash((self.level, tuple(p for p, _ in self.terms)))

    def map_points(self, f: Callable[[ModularPoint], "FormalSum"], level: Optional[Ideal] = None) -> "FormalSum":
        """Linear extension of a point map"""
        target = level or self.level
        out: List[Tuple[ModularPoint, Coefficient]] = []
        for point, coeff in self.terms:
            for image, c in f(point):
                out.append((image, c * coeff))
        return FormalSum(target, out)

    def classes(self, cg: ClassGroup) -> List[IdealClass]:
        return sorted({p.point_class(cg) for p in self.points()}, key=lambda c: c.exponents)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{p}" for p, c in self.terms)


def graded_component(v: FormalSum, c: IdealClass, cg: ClassGroup) -> FormalSum:
    """The part of v supported on points of class c"""
    return FormalSum(v.level, [(p, x) for p, x in v if p.point_class(cg) == c])


def twist_formal_sum(v: FormalSum, psi, cg: ClassGroup) -> FormalSum:
    """v (x) psi = sum over classes c of psi(c)^-1 * v_c"""
    return FormalSum(v.level, [(p, x * psi(p.point_class(cg)).inverse()) for p, x in v])
