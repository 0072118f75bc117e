#!/usr/bin/env python3
"""
Integer lattice helpers
Hermite and Smith normal forms (via sympy), rational rescaling, dual lattices
and a small extended-gcd solver for 2-row integer systems
"""

import logging
from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix, Rational, ZZ
try:
    from sympy import igcdex
except ImportError:  # sympy >= 1.13 no longer re-exports it at top level
    from sympy.core.intfunc import igcdex
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form

from .errors import RankError

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]
RatVector = Tuple[Fraction, ...]


def hnf_basis(vectors: Sequence[Sequence[int]], dim: int) -> Tuple[IntVector, ...]:
    """Column Hermite normal form of the Z-span of integer vectors.

    Returns ``dim`` basis vectors; vector ``j`` has zero entries below
    position ``j``, a positive pivot at ``j``, and entries right of each pivot
    reduced modulo it.
    """
    cols = [list(v) for v in vectors if any(v)]
    if not cols:
        raise RankError("Zero lattice has no basis")
    M = Matrix(dim, len(cols), lambda i, j: cols[j][i])
    H = hermite_normal_form(M)
    if H.shape[1] != dim:
        raise RankError(f"Lattice has rank {H.shape[1]}, expected {dim}")
    return tuple(tuple(int(H[i, j]) for i in range(dim)) for j in range(dim))


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    r = Rational(value)
    return Fraction(int(r.p), int(r.q))


def common_denominator(vectors: Sequence[Sequence[Fraction]]) -> int:
    den = 1
    for v in vectors:
        for x in v:
            den = lcm(den, Fraction(x).denominator)
    return den


def scaled_hnf(vectors: Sequence[Sequence[Fraction]], dim: int) -> Tuple[int, Tuple[IntVector, ...]]:
    """Canonical form of a full-rank rational lattice.

    Returns ``(den, basis)`` with ``basis`` the integer HNF of ``den`` times the
    lattice and ``den`` minimal, so equal lattices give equal pairs.
    """
    den = common_denominator(vectors)
    ints = [[int(Fraction(x) * den) for x in v] for v in vectors]
    basis = hnf_basis(ints, dim)
    g = den
    for v in basis:
        for x in v:
            g = gcd(g, x)
    if g > 1:
        den //= g
        basis = tuple(tuple(x // g for x in v) for v in basis)
    return den, basis


def unscale(den: int, basis: Sequence[IntVector]) -> Tuple[RatVector, ...]:
    return tuple(tuple(Fraction(x, den) for x in v) for v in basis)


def _column_matrix(basis: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(basis)
    return Matrix(n, n, lambda i, j: Rational(Fraction(basis[j][i]).numerator, Fraction(basis[j][i]).denominator))


def inverse_columns(basis: Sequence[Sequence[Fraction]]) -> Matrix:
    """Inverse of the square matrix whose columns are ``basis``"""
    B = _column_matrix(basis)
    if B.det() == 0:
        raise RankError("Basis is singular")
    return B.inv()


def coordinates(inverse: Matrix, v: Sequence[Fraction]) -> RatVector:
    """Coordinates of ``v`` with respect to a basis, given the basis inverse"""
    col = Matrix(len(v), 1, lambda i, _: Rational(Fraction(v[i]).numerator, Fraction(v[i]).denominator))
    x = inverse * col
    return tuple(_to_fraction(x[i, 0]) for i in range(len(v)))


def dual_basis(basis: Sequence[Sequence[Fraction]]) -> Tuple[RatVector, ...]:
    """Basis of the dual lattice {x : x.b is an integer for all b}"""
    D = inverse_columns(basis).T
    n = len(basis)
    return tuple(tuple(_to_fraction(D[i, j]) for i in range(n)) for j in range(n))


def intersect_lattices(basis1: Sequence[Sequence[Fraction]], basis2: Sequence[Sequence[Fraction]]) -> Tuple[int, Tuple[IntVector, ...]]:
    """Intersection of two full-rank lattices, by duality of the sum"""
    dim = len(basis1)
    den, summed = scaled_hnf(list(dual_basis(basis1)) + list(dual_basis(basis2)), dim)
    return scaled_hnf(dual_basis(unscale(den, summed)), dim)


def invariant_factors(relations: Sequence[Sequence[int]], ncols: int) -> List[int]:
    """Nontrivial invariant factors of Z^ncols modulo the span of ``relations``"""
    M = Matrix(len(relations), ncols, lambda i, j: relations[i][j])
    S = smith_normal_form(M, domain=ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
    if len(diag) < ncols or 0 in diag:
        raise RankError("Relation lattice does not have full rank")
    return sorted(x for x in diag if x > 1)


def solve_two_row(columns: Sequence[Tuple[int, int]], target: Tuple[int, int]) -> Optional[List[int]]:
    """Integer solution u of sum_k u_k * columns[k] = target, or None.

    Column operations by extended gcd bring the 2 x k system to lower
    triangular form while tracking the unimodular transform.
    """
    k = len(columns)
    A = [list(c) for c in columns]
    V = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def combine(i: int, j: int, row: int) -> None:
        a, b = A[i][row], A[j][row]
        if b == 0:
            return
        s, t, g = igcdex(a, b)
        s, t, g = int(s), int(t), int(g)
        ai, aj = a // g, b // g
        A[i], A[j] = (
            [s * x + t * y for x, y in zip(A[i], A[j])],
            [ai * y - aj * x for x, y in zip(A[i], A[j])],
        )
        for r in range(k):
            vi, vj = V[r][i], V[r][j]
            V[r][i], V[r][j] = s * vi + t * vj, ai * vj - aj * vi

    def expand(z: List[int]) -> List[int]:
        return [sum(V[r][c] * z[c] for c in range(k)) for r in range(k)]

    if k == 0:
        return [] if target == (0, 0) else None
    for j in range(1, k):
        combine(0, j, 0)
    z = [0] * k
    if A[0][0] == 0:
        # row 0 vanishes: pivot row 1 in column 0 instead
        for j in range(1, k):
            combine(0, j, 1)
        if target[0] != 0:
            return None
        if A[0][1] == 0:
            return z if target[1] == 0 else None
        if target[1] % A[0][1]:
            return None
        z[0] = target[1] // A[0][1]
        return expand(z)
    for j in range(2, k):
        combine(1, j, 1)
    if target[0] % A[0][0]:
        return None
    z[0] = target[0] // A[0][0]
    rest = target[1] - A[0][1] * z[0]
    g1 = A[1][1] if k > 1 else 0
    if g1 == 0:
        if rest != 0:
            return None
    else:
        if rest % g1:
            return None
        z[1] = rest // g1
    return expand(z)
