#!/usr/bin/env python3
"""
Rank-2 lattices in K + K given by pseudo-bases
Canonical forms via the rank-4 integer HNF, module operations, index
ideals, elementary divisors, (a,b)-matrices and sublattice enumeration
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .cache_manager import cache_result, lattice_cache
from .errors import NonPrincipalError, NotContainedError, PreconditionError, RankError
from .ideals import (
    FractionalIdeal,
    Ideal,
    as_fractional,
    crt_split,
    divisors,
    principal_generator,
    small_elements,
    solve_in_ideals,
    two_generators,
)
from .mat2 import Mat2, Vector, apply
from .msym import enumerate_p1
from .qfield import FieldDesc, FieldElement
from .zlattice import coordinates, intersect_lattices, inverse_columns, scaled_hnf, unscale

logger = logging.getLogger(__name__)

Vec4 = Tuple[Fraction, Fraction, Fraction, Fraction]
IdealLike = Union[Ideal, FractionalIdeal]


def to_vec4(v: Vector) -> Vec4:
    return (v[0].x, v[0].y, v[1].x, v[1].y)


def from_vec4(field: FieldDesc, v: Sequence[Fraction]) -> Vector:
    return (field.element(v[0], v[1]), field.element(v[2], v[3]))


def scale_vector(e: FieldElement, v: Vector) -> Vector:
    return (e * v[0], e * v[1])


def add_vectors(v: Vector, w: Vector) -> Vector:
    return (v[0] + w[0], v[1] + w[1])


@dataclass(frozen=True, eq=False)
class PseudoLattice:
    """The module b1*u1 + b2*u2 where u1, u2 are the rows of U"""

    b1: FractionalIdeal
    b2: FractionalIdeal
    U: Mat2

    def __post_init__(self):
        object.__setattr__(self, "b1", as_fractional(self.b1))
        object.__setattr__(self, "b2", as_fractional(self.b2))
        if self.U.is_singular():
            raise RankError("Pseudo-basis matrix is singular")

    @classmethod
    def free(cls, field: FieldDesc) -> "PseudoLattice":
        """O + O"""
        unit = FractionalIdeal.unit(field)
        return cls(unit, unit, Mat2.identity(field))

    @classmethod
    def split(cls, b1: IdealLike, b2: IdealLike) -> "PseudoLattice":
        """b1 + b2 in the standard basis"""
        f = as_fractional(b1)
        return cls(f, as_fractional(b2), Mat2.identity(f.field))

    @classmethod
    def from_zbasis(cls, field: FieldDesc, vectors: Sequence[Sequence[Fraction]]) -> "PseudoLattice":
        """Canonical pseudo-basis of the Z-span of rank-4 rational vectors"""
        den, W = scaled_hnf(vectors, 4)
        return cls._from_hnf(field, den, W)

    @classmethod
    def _from_hnf(cls, field: FieldDesc, den: int, W) -> "PseudoLattice":
        I1 = FractionalIdeal(Ideal(field, W[0][0], W[1][0], W[1][1]), den)
        I2 = FractionalIdeal(Ideal(field, W[2][2], W[3][2], W[3][3]), den)
        alpha2 = field.element(Fraction(W[2][0], den), Fraction(W[2][1], den))
        beta2 = field.element(Fraction(W[2][2], den))
        alpha3 = field.element(Fraction(W[3][0], den), Fraction(W[3][1], den))
        beta3 = field.element(Fraction(W[3][2], den), Fraction(W[3][3], den))
        inv = I2.inverse()
        x2, x3 = solve_in_ideals(field.one, [(beta2, inv), (beta3, inv)])
        gamma = x2 * alpha2 + x3 * alpha3
        lattice = cls(I1, I2, Mat2(field.one, field.zero, gamma, field.one))
        object.__setattr__(lattice, "key", (den, W))
        return lattice

    @property
    def field(self) -> FieldDesc:
        return self.U.field

    def rows(self) -> Tuple[Vector, Vector]:
        return self.U.rows()

    def z_basis(self) -> List[Vec4]:
        u1, u2 = self.U.rows()
        out = [to_vec4(scale_vector(e, u1)) for e in self.b1.basis()]
        out += [to_vec4(scale_vector(e, u2)) for e in self.b2.basis()]
        return out

    @cached_property
    def key(self) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
        return scaled_hnf(self.z_basis(), 4)

    @cached_property
    def _inverse(self):
        den, W = self.key
        return inverse_columns(unscale(den, W))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PseudoLattice):
            return NotImplemented
        return self.field == other.field and self.key == other.key

    def __hash__(self) -> int:
        return hash((self.field, self.key))

    def sort_key(self):
        return self.key

    def canonical(self) -> "PseudoLattice":
        den, W = self.key
        return PseudoLattice._from_hnf(self.field, den, W)

    # membership

    def contains_vector(self, v: Vector) -> bool:
        return all(x.denominator == 1 for x in coordinates(self._inverse, to_vec4(v)))

    def contains(self, other: "PseudoLattice") -> bool:
        return all(self.contains_vector(from_vec4(self.field, v)) for v in other.z_basis())

    def reduce_vector(self, v: Vector) -> Vector:
        """Canonical representative of v modulo the lattice"""
        den, W = self.key
        coords = coordinates(self._inverse, to_vec4(v))
        frac = [x - (x.numerator // x.denominator) for x in coords]
        basis = unscale(den, W)
        return from_vec4(self.field, [sum(f * b[i] for f, b in zip(frac, basis)) for i in range(4)])

    # module operations

    def __add__(self, other: "PseudoLattice") -> "PseudoLattice":
        return PseudoLattice.from_zbasis(self.field, self.z_basis() + other.z_basis())

    def add_vectors(self, vectors: Iterable[Vector]) -> "PseudoLattice":
        """self + O*v for each v"""
        extra = []
        w = self.field.omega
        for v in vectors:
            extra.append(to_vec4(v))
            extra.append(to_vec4(scale_vector(w, v)))
        return PseudoLattice.from_zbasis(self.field, self.z_basis() + extra)

    def intersect(self, other: "PseudoLattice") -> "PseudoLattice":
        den, W = intersect_lattices(unscale(*self.key), unscale(*other.key))
        return PseudoLattice._from_hnf(self.field, den, W)

    def scale(self, factor: Union[IdealLike, FieldElement]) -> "PseudoLattice":
        """a*L for a fractional ideal or element a"""
        if isinstance(factor, FieldElement):
            factor = as_fractional(factor)
        a = as_fractional(factor)
        return PseudoLattice(a * self.b1, a * self.b2, self.U)

    def times(self, M: Mat2) -> "PseudoLattice":
        """L*M"""
        if M.is_singular():
            raise RankError("Cannot apply a singular matrix to a lattice")
        return PseudoLattice(self.b1, self.b2, self.U * M)

    def steinitz_class(self, cg):
        return cg.class_of(self.b1) * cg.class_of(self.b2)

    def __str__(self) -> str:
        return f"{{{self.b1}, {self.b2}, {self.U}}}"


def canonical_form(L: PseudoLattice) -> PseudoLattice:
    return L.canonical()


def module_sum(L1: PseudoLattice, L2: PseudoLattice) -> PseudoLattice:
    return L1 + L2


def module_intersect(L1: PseudoLattice, L2: PseudoLattice) -> PseudoLattice:
    return L1.intersect(L2)


def steinitz_class(L: PseudoLattice, cg):
    return L.steinitz_class(cg)


def index_ideal(Lbig: PseudoLattice, Lsmall: PseudoLattice) -> Ideal:
    """[Lbig : Lsmall] as an integral ideal"""
    if not Lbig.contains(Lsmall):
        raise NotContainedError("Second lattice is not contained in the first")
    ratio = Lsmall.U.det() / Lbig.U.det()
    return (as_fractional(ratio) * Lsmall.b1 * Lsmall.b2 / (Lbig.b1 * Lbig.b2)).as_integral()


def elementary_divisors(Lbig: PseudoLattice, Lsmall: PseudoLattice) -> Tuple[Ideal, Ideal]:
    """(a1, a2) with a1 | a2 and Lbig/Lsmall = O/a1 + O/a2"""
    index = index_ideal(Lbig, Lsmall)
    T = Lsmall.U * Lbig.U.inverse()
    coeffs = (Lsmall.b1, Lsmall.b2)
    targets = (Lbig.b1.inverse(), Lbig.b2.inverse())
    entries = ((T.a, T.b), (T.c, T.d))
    a1 = None
    for j in range(2):
        for k in range(2):
            t = entries[j][k]
            if t.is_zero():
                continue
            term = coeffs[j].scale(t) * targets[k]
            a1 = term if a1 is None else a1 + term
    a1_int = a1.as_integral()
    a2 = (index.frac / a1_int).as_integral()
    return a1_int, a2


# (a,b)-matrices

def is_ab_matrix(M: Mat2, a: IdealLike, b: IdealLike, level: Optional[Ideal] = None) -> bool:
    """True when (O+O)M = a+b, with (2,1)-entry in the level when given"""
    if principal_generator(as_fractional(a) * as_fractional(b)) is None:
        return False
    if M.is_singular() or not M.is_integral():
        return False
    if level is not None and not level.contains(M.c):
        return False
    return PseudoLattice.free(M.field).times(M) == PseudoLattice.split(a, b)


def ab_matrix(a: Ideal, b: Ideal, level: Optional[Ideal] = None) -> Mat2:
    """An (a,b)-matrix whose first column generates a, (2,1)-entry in the level"""
    g = principal_generator(a * b)
    if g is None:
        raise NonPrincipalError(f"{a}*{b} is not principal")
    z, x = two_generators(a, level)
    w, y = solve_in_ideals(g, [(x, b), (-z, b)])
    return Mat2(x, y, z, w)


def in_Delta(M: Mat2, a: IdealLike, b: IdealLike) -> bool:
    """Membership in the stabilizer Delta(a, b) of a+b"""
    fa, fb = as_fractional(a), as_fractional(b)
    return (
        M.a.is_integral()
        and M.d.is_integral()
        and (fa.inverse() * fb).contains(M.b)
        and (fa * fb.inverse()).contains(M.c)
        and M.det().is_unit()
    )


# sublattices

def coprime_pseudo_basis(L: PseudoLattice, avoid: Ideal) -> Tuple[Vector, Ideal, Vector]:
    """(v1, J, v2) with L = O*v1 + J*v2 and J integral, coprime to avoid"""
    C = L.canonical()
    I1, I2 = C.b1, C.b2
    field = L.field
    u1, u2 = C.rows()
    alpha = I1.basis()[0]
    A = (as_fractional(alpha) * I1.inverse()).as_integral()
    inv2 = I2.inverse()
    beta = None
    for cand in small_elements(I2):
        if (as_fractional(cand) * inv2 + A).is_one():
            beta = cand
            break
    if beta is None:
        raise PreconditionError("No coprime pseudo-basis element found")
    gamma_p, delta_p = solve_in_ideals(field.one, [(alpha, I1.inverse()), (beta, inv2)])
    w1 = add_vectors(scale_vector(alpha, u1), scale_vector(beta, u2))
    w2 = add_vectors(scale_vector(-delta_p, u1), scale_vector(gamma_p, u2))
    J0 = I1 * I2
    for t in small_elements(J0.inverse()):
        J = J0.scale(t).as_integral()
        if J.is_coprime_to(avoid):
            return w1, J, scale_vector(t.inverse(), w2)
    raise PreconditionError("No integral rescaling coprime to the index found")


def _cyclic_sublattices(L: PseudoLattice, b1: Ideal, v1: Vector, J: Ideal, v2: Vector) -> List[PseudoLattice]:
    if b1.is_one():
        return [L]
    jj, _ = crt_split(J, b1)
    base = L.scale(b1)
    out = []
    for s in enumerate_p1(b1):
        g = add_vectors(scale_vector(s.c, v1), scale_vector(s.d * jj, v2))
        out.append(base.add_vectors([g]))
    return out


def _lattice_index_key(L: PseudoLattice, b: Ideal) -> Tuple:
    return (L.field.d, L.key, (b.a, b.b, b.c))


@cache_result(manager=lattice_cache, key_func=_lattice_index_key)
def _sublattices(L: PseudoLattice, b: Ideal) -> Tuple[PseudoLattice, ...]:
    if b.is_one():
        return (L.canonical(),)
    v1, J, v2 = coprime_pseudo_basis(L, b)
    found = {}
    for b2 in divisors(b):
        sq = b2 * b2
        if not sq.divides(b):
            continue
        b1 = b.divide(sq, integral=True)
        for M in _cyclic_sublattices(L, b1, v1, J, v2):
            scaled = M.scale(b2)
            found.setdefault(scaled.key, scaled)
    logger.debug(f"{len(found)} sublattices of index {b}")
    return tuple(found[k] for k in sorted(found))


@cache_result(manager=lattice_cache, key_func=_lattice_index_key)
def _superlattices(L: PseudoLattice, b: Ideal) -> Tuple[PseudoLattice, ...]:
    inv = b.inverse()
    return tuple(sorted((M.scale(inv) for M in _sublattices(L, b)), key=lambda M: M.key))


def sublattices_of_index(L: PseudoLattice, b: Ideal) -> List[PseudoLattice]:
    """All M inside L with [L:M] = b, sorted by canonical key"""
    return list(_sublattices(L, b))


def superlattices_of_index(L: PseudoLattice, b: Ideal) -> List[PseudoLattice]:
    """All M containing L with [M:L] = b, sorted by canonical key"""
    return list(_superlattices(L, b))
