#!/usr/bin/env python3
"""
M-symbols: points (c:d) of the projective line over O/n
Enumeration in a fixed scan order and lifting to SL(2, O) and Gamma_0(m)
"""

import logging
from dataclasses import dataclass
from typing import List, Set, Tuple

from .cache_manager import cache_result
from .errors import NotCoprimeError, PreconditionError
from .ideals import Ideal, crt_split, prime_divisors, small_elements, solve_in_ideals
from .mat2 import Mat2
from .qfield import FieldElement

logger = logging.getLogger(__name__)

Residue = Tuple[int, int]


class ResidueRing:
    """Integer arithmetic in O/n on residues (x, y) with 0 <= x < a, 0 <= y < c"""

    def __init__(self, n: Ideal):
        self.n = n
        self.field = n.field
        self.primes = prime_divisors(n)

    def reduce(self, x: int, y: int) -> Residue:
        a, b, c = self.n.hnf
        k = y // c
        return ((x - k * b) % a, y - k * c)

    def mul(self, r: Residue, s: Residue) -> Residue:
        t, nn = self.field.t, self.field.n
        return self.reduce(r[0] * s[0] - nn * r[1] * s[1], r[0] * s[1] + s[0] * r[1] + t * r[1] * s[1])

    @staticmethod
    def _in(ideal: Ideal, r: Residue) -> bool:
        a, b, c = ideal.hnf
        return r[1] % c == 0 and (r[0] - (r[1] // c) * b) % a == 0

    def is_unit(self, r: Residue) -> bool:
        return not any(self._in(P, r) for P in self.primes)

    def coprime_pair(self, c: Residue, d: Residue) -> bool:
        return not any(self._in(P, c) and self._in(P, d) for P in self.primes)

    def residues(self) -> List[Residue]:
        a, _, c = self.n.hnf
        return [(x, y) for y in range(c) for x in range(a)]

    def units(self) -> List[Residue]:
        return [r for r in self.residues() if self.is_unit(r)]

    def element(self, r: Residue) -> FieldElement:
        return self.field.element(r[0], r[1])

    def of(self, e: FieldElement) -> Residue:
        if not e.is_integral():
            raise PreconditionError(f"{e} is not integral")
        return self.reduce(int(e.x), int(e.y))


def scan_key(r: Residue) -> Tuple[int, int]:
    return (r[1], r[0])


@cache_result(key_prefix="msym.units")
def unit_residues(n: Ideal) -> List[Residue]:
    return ResidueRing(n).units()


@dataclass(frozen=True)
class MSymbol:
    """(c:d) in P^1(O/n), stored as the first equivalent pair in scan order"""

    level: Ideal
    c: FieldElement
    d: FieldElement

    def __str__(self) -> str:
        return f"({self.c}:{self.d})"


def symbols_equivalent(c1: FieldElement, d1: FieldElement, c2: FieldElement, d2: FieldElement, n: Ideal) -> bool:
    return n.contains(c1 * d2 - c2 * d1)


def normalize(c: FieldElement, d: FieldElement, n: Ideal) -> MSymbol:
    """Canonical representative of (c:d); rejects pairs not coprime to n"""
    ring = ResidueRing(n)
    rc, rd = ring.of(c), ring.of(d)
    if not ring.coprime_pair(rc, rd):
        raise NotCoprimeError(f"({c}:{d}) is not coprime to level {n}")
    best = min(
        ((ring.mul(u, rc), ring.mul(u, rd)) for u in unit_residues(n)),
        key=lambda pair: (scan_key(pair[0]), scan_key(pair[1])),
    )
    return MSymbol(n, ring.element(best[0]), ring.element(best[1]))


@cache_result(key_prefix="msym.p1")
def enumerate_p1(n: Ideal) -> List[MSymbol]:
    """All psi(n) symbols of level n in scan order"""
    ring = ResidueRing(n)
    units = unit_residues(n)
    residues = sorted(ring.residues(), key=scan_key)
    seen: Set[Tuple[Residue, Residue]] = set()
    out = []
    for rc in residues:
        for rd in residues:
            if (rc, rd) in seen or not ring.coprime_pair(rc, rd):
                continue
            for u in units:
                seen.add((ring.mul(u, rc), ring.mul(u, rd)))
            out.append(MSymbol(n, ring.element(rc), ring.element(rd)))
    logger.debug(f"P1 of level {n}: {len(out)} symbols")
    return out


def _generates_unit_ideal(x: FieldElement, y: FieldElement) -> bool:
    if x.is_zero() and y.is_zero():
        return False
    return Ideal.from_gens(x.field, [x, y]).is_one()


def lift_pair(c: FieldElement, d: FieldElement, n: Ideal) -> Mat2:
    """Determinant-one integral matrix with bottom row congruent to (c, d) mod n"""
    field = n.field
    if n.is_one():
        return Mat2.identity(field)
    c0, d0 = n.reduce(c), n.reduce(d)
    shifts = [field.zero] + list(small_elements(n))
    cc = dd = None
    if not n.contains(c0):
        for t in shifts:
            if _generates_unit_ideal(c0, d0 + t):
                cc, dd = c0, d0 + t
                break
    else:
        for t in shifts:
            if _generates_unit_ideal(t, d0):
                cc, dd = t, d0
                break
    if cc is None:
        raise PreconditionError(f"Could not lift ({c}:{d}) at level {n}")
    a, b = solve_in_ideals(field.one, [(dd, Ideal.unit(field)), (-cc, Ideal.unit(field))])
    return Mat2(a, b, cc, dd)


def lift_to_sl2(s: MSymbol) -> Mat2:
    """Section P^1(n) -> SL(2, O)"""
    return lift_pair(s.c, s.d, s.level)


def lift_to_gamma0(s: MSymbol, m: Ideal) -> Mat2:
    """Matrix in Gamma_0(m) whose bottom row is s in P^1(n) and (0:1) in P^1(m)"""
    n = s.level
    if m.is_one():
        return lift_to_sl2(s)
    if not m.is_coprime_to(n):
        raise NotCoprimeError(f"Levels {m} and {n} are not coprime")
    e, f = crt_split(n, m)
    return lift_pair(s.c * f, s.d * f + e, m * n)


def in_gamma0(M: Mat2, n: Ideal) -> bool:
    return M.is_integral() and M.det().is_unit() and n.contains(M.c)
