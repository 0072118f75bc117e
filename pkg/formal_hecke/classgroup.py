#!/usr/bin/env python3
"""
Ideal class group of an imaginary quadratic field
Reduced binary quadratic forms label the classes; the group structure comes
from the Smith normal form of the relation lattice; representatives p_i, q_j
follow the coset scheme Cl = {[p_i][q_j]^2}
"""

import itertools
import logging
from dataclasses import dataclass
from math import gcd, isqrt, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .cache_manager import cache_result
from .errors import PreconditionError
from .ideals import Ideal, as_fractional, ideals_of_norm
from .qfield import FieldDesc
from .zlattice import invariant_factors

logger = logging.getLogger(__name__)

Form = Tuple[int, int, int]


def normalize_form(a: int, b: int, c: int) -> Form:
    if -a < b <= a:
        return (a, b, c)
    r = (a - b) // (2 * a)
    return (a, b + 2 * r * a, a * r * r + b * r + c)


def reduce_form(a: int, b: int, c: int) -> Form:
    """Reduced representative of a positive definite form"""
    a, b, c = normalize_form(a, b, c)
    while a > c or (a == c and b < 0):
        s = (c + b) // (c + c)
        a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
    return normalize_form(a, b, c)


def reduced_forms(disc: int) -> List[Form]:
    """All reduced forms of a negative discriminant, sorted"""
    out = []
    for a in range(1, isqrt(-disc // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            out.append((a, b, c))
    return sorted(out)


def form_of_ideal(ideal) -> Form:
    """Reduced form attached to the class of a (fractional) ideal"""
    num = as_fractional(ideal).numerator
    field = num.field
    a1, b1 = num.a // num.c, num.b // num.c
    return reduce_form(a1, 2 * b1 + field.t, (b1 * b1 + field.t * b1 + field.n) // a1)


@dataclass(frozen=True)
class IdealClass:
    """Class group element as an exponent vector over fixed generators"""

    exponents: Tuple[int, ...]
    moduli: Tuple[int, ...]

    def __mul__(self, other: "IdealClass") -> "IdealClass":
        return IdealClass(
            tuple((x + y) % m for x, y, m in zip(self.exponents, other.exponents, self.moduli)),
            self.moduli,
        )

    def inverse(self) -> "IdealClass":
        return IdealClass(tuple((-x) % m for x, m in zip(self.exponents, self.moduli)), self.moduli)

    def __pow__(self, k: int) -> "IdealClass":
        return IdealClass(tuple((x * k) % m for x, m in zip(self.exponents, self.moduli)), self.moduli)

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def order(self) -> int:
        result = 1
        for x, m in zip(self.exponents, self.moduli):
            result = lcm(result, m // gcd(x, m))
        return result

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.exponents) + ")"


class _ClassGroupCore:
    """Level-independent structure: forms, generators, discrete logarithms"""

    def __init__(self, field: FieldDesc):
        self.field = field
        self.logger = logging.getLogger(__name__)
        self.forms = reduced_forms(field.disc)
        self.index = {f: i for i, f in enumerate(self.forms)}
        self.reps = [Ideal(field, A, ((B - field.t) // 2) % A, 1) for A, B, _ in self.forms]
        self.h = len(self.forms)
        self._products: Dict[Tuple[int, int], int] = {}
        spanning = self._spanning_set()
        self.invariants = self._invariants(spanning)
        self.generator_indices = self._find_generators()
        self.generators = [self.reps[i] for i in self.generator_indices]
        self.dlog_table = self._build_dlog()
        self.logger.debug(f"Class group of {field}: h={self.h}, invariants={self.invariants}")

    def times(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in self._products:
            self._products[key] = self.index[form_of_ideal(self.reps[i] * self.reps[j])]
        return self._products[key]

    def _closure(self, start: set, gens: Sequence[int]) -> set:
        group = set(start)
        frontier = list(group)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.times(x, g)
                if y not in group:
                    group.add(y)
                    frontier.append(y)
        return group

    def _spanning_set(self) -> List[int]:
        spanning: List[int] = []
        group = {0}
        for i in range(1, self.h):
            if i not in group:
                spanning.append(i)
                group = self._closure(group, spanning)
        return spanning

    def _invariants(self, spanning: List[int]) -> List[int]:
        if self.h == 1:
            return []
        relations = []
        identity = [0] * self.h
        identity[0] = 1
        relations.append(identity)
        for s in spanning:
            for j in range(self.h):
                row = [0] * self.h
                row[s] += 1
                row[j] += 1
                row[self.times(s, j)] -= 1
                relations.append(row)
        return invariant_factors(relations, self.h)

    def _order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.times(x, i)
            k += 1
        return k

    def _find_generators(self) -> List[int]:
        chosen: List[int] = []

        def search(k: int, group: set) -> bool:
            if k == len(self.invariants):
                return True
            d = self.invariants[k]
            for i in range(1, self.h):
                if i in group or self._order(i) != d:
                    continue
                extended = self._closure(group, chosen + [i])
                if len(extended) != len(group) * d:
                    continue
                chosen.append(i)
                if search(k + 1, extended):
                    return True
                chosen.pop()
            return False

        if not search(0, {0}):
            raise PreconditionError(f"No generators found for class group of {self.field}")
        return list(chosen)

    def _build_dlog(self) -> Dict[int, Tuple[int, ...]]:
        table = {}
        for exps in itertools.product(*(range(d) for d in self.invariants)):
            idx = 0
            for g, e in zip(self.generator_indices, exps):
                for _ in range(e):
                    idx = self.times(idx, g)
            table[idx] = tuple(exps)
        return table


@cache_result(key_prefix="classgroup.core")
def _core(field: FieldDesc) -> _ClassGroupCore:
    return _ClassGroupCore(field)


class ClassGroup:
    """Class group with representatives coprime to a level"""

    def __init__(self, field: FieldDesc, level: Optional[Ideal] = None):
        self.field = field
        self.level = level or Ideal.unit(field)
        self.logger = logging.getLogger(__name__)
        self._core = _core(field)
        self.h = self._core.h
        self.cyclic_structure = list(self._core.invariants)
        self.generators = list(self._core.generators)
        self.identity = IdealClass(tuple(0 for _ in self.cyclic_structure), tuple(self.cyclic_structure))
        self.reps_p, self.reps_q = self._representatives()
        self.h2 = len(self.reps_p)
        self.h2prime = len(self.reps_q)

    # classification

    def dlog(self, ideal) -> Tuple[int, ...]:
        return self._core.dlog_table[self._core.index[form_of_ideal(ideal)]]

    def class_of(self, ideal) -> IdealClass:
        return IdealClass(self.dlog(ideal), tuple(self.cyclic_structure))

    def is_principal(self, ideal) -> bool:
        return self.class_of(ideal).is_trivial()

    def element(self, exponents: Sequence[int]) -> IdealClass:
        return IdealClass(tuple(e % m for e, m in zip(exponents, self.cyclic_structure)), tuple(self.cyclic_structure))

    def elements(self) -> List[IdealClass]:
        return [self.element(e) for e in itertools.product(*(range(d) for d in self.cyclic_structure))]

    @property
    def exponent(self) -> int:
        result = 1
        for d in self.cyclic_structure:
            result = lcm(result, d)
        return result

    def squares(self) -> List[IdealClass]:
        return sorted({c ** 2 for c in self.elements()}, key=lambda c: c.exponents)

    def two_torsion(self) -> List[IdealClass]:
        return [c for c in self.elements() if (c ** 2).is_trivial()]

    def rep(self, c: IdealClass) -> Ideal:
        """Reduced representative ideal (minimal norm) of a class"""
        for idx, exps in self._core.dlog_table.items():
            if exps == c.exponents:
                return self._core.reps[idx]
        raise PreconditionError(f"Unknown class {c}")

    # representatives

    def ideals_coprime_to(self, n: Ideal):
        """Integral ideals coprime to n, by increasing norm then HNF"""
        N = 1
        while True:
            for I in ideals_of_norm(self.field, N):
                if I.is_coprime_to(n):
                    yield I
            N += 1

    def ideal_in_class_coprime_to(self, c: IdealClass, n: Optional[Ideal] = None) -> Ideal:
        """Smallest (norm, HNF) integral ideal of class c coprime to n"""
        n = n or Ideal.unit(self.field)
        for I in self.ideals_coprime_to(n):
            if self.class_of(I) == c:
                return I
        raise PreconditionError("unreachable")

    def _representatives(self) -> Tuple[List[Ideal], List[Ideal]]:
        squares = set(self.squares())
        h2 = self.h // len(squares)
        coset_of: Dict[frozenset, Ideal] = {}
        square_of: Dict[IdealClass, Ideal] = {}
        for I in self.ideals_coprime_to(self.level):
            c = self.class_of(I)
            coset = frozenset(c * s for s in squares)
            coset_of.setdefault(coset, I)
            square_of.setdefault(c ** 2, I)
            if len(coset_of) == h2 and len(square_of) == len(squares):
                break
        reps_p = sorted(coset_of.values(), key=lambda I: I.sort_key())
        reps_q = sorted(square_of.values(), key=lambda I: I.sort_key())
        return reps_p, reps_q

    def decompose(self, c: IdealClass) -> Tuple[int, int]:
        """(i, j), 1-based, with c = [p_i][q_j]^2"""
        for i, p in enumerate(self.reps_p, start=1):
            for j, q in enumerate(self.reps_q, start=1):
                if self.class_of(p) * self.class_of(q) ** 2 == c:
                    return i, j
        raise PreconditionError(f"Class {c} not covered by representatives")

    def summary(self) -> Dict[str, object]:
        return {
            "d": self.field.d,
            "h": self.h,
            "structure": self.cyclic_structure,
            "generators": [str(g) for g in self.generators],
            "reps_p": [str(p) for p in self.reps_p],
            "reps_q": [str(q) for q in self.reps_q],
            "h2": self.h2,
            "h2prime": self.h2prime,
        }


@cache_result(key_prefix="classgroup.level")
def class_group(field: FieldDesc, level: Optional[Ideal] = None) -> ClassGroup:
    """Class group of the field with representatives coprime to the level"""
    return ClassGroup(field, level)
