#!/usr/bin/env python3
"""
Hecke eigensystems (alpha, chi) over exact coefficient fields
Twisting, inner twists, restriction to principal operators and the
recovery of every eigensystem with a given principal restriction
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Rational, sqrt as sym_sqrt, totient

from .classgroup import ClassGroup, IdealClass, class_group
from .cyclotomic import (
    AdjoinedValue,
    CycValue,
    UnramifiedCharacter,
    Value,
    all_characters,
    as_cyc,
    quadratic_characters,
    simplify,
    value_is_zero,
)
from .errors import InconsistentRestrictionError, PreconditionError
from .heckeops import OperatorDescriptor, OperatorKind
from .ideals import Ideal, factor, ideals_up_to_norm, primes_up_to
from .verify_runner import Check, VerificationRunner, all_passed

logger = logging.getLogger(__name__)


def _prime_key(p: Ideal):
    return p.sort_key()


def stored_powers(p: Ideal, bound: int) -> int:
    """Number of powers p^k kept for a prime: those of norm <= bound, and at least two"""
    k = 1
    while p.norm ** (k + 1) <= bound:
        k += 1
    return max(k, 2)


def _same_character(chi1: UnramifiedCharacter, chi2: UnramifiedCharacter) -> bool:
    return chi1.structure == chi2.structure and chi1.exponents == chi2.exponents


@dataclass
class Eigensystem:
    """Eigenvalues alpha(p^k) for primes of norm <= bound and the character chi"""

    level: Ideal
    chi: UnramifiedCharacter
    alpha: Dict[Ideal, Tuple[Value, ...]]
    bound: int

    @property
    def field(self):
        return self.level.field

    def class_group(self) -> ClassGroup:
        return class_group(self.field, self.level)

    def primes(self) -> List[Ideal]:
        return sorted(self.alpha, key=_prime_key)

    def divides_level(self, p: Ideal) -> bool:
        return p.divides(self.level)

    def value(self, p: Ideal, k: int) -> Value:
        """alpha(p^k), with alpha(p^0) = 1"""
        if k == 0:
            return CycValue.rational(1)
        if p not in self.alpha or k > len(self.alpha[p]):
            raise PreconditionError(f"alpha({p}^{k}) is beyond the stored bound {self.bound}")
        return self.alpha[p][k - 1]

    def chi_of(self, ideal) -> CycValue:
        return self.chi(self.class_group().class_of(ideal))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Eigensystem):
            return NotImplemented
        if self.level != other.level or not _same_character(self.chi, other.chi):
            return False
        if set(self.alpha) != set(other.alpha):
            return False
        return all(
            len(self.alpha[p]) == len(other.alpha[p]) and all(x == y for x, y in zip(self.alpha[p], other.alpha[p]))
            for p in self.alpha
        )

    __hash__ = None

    def summary(self) -> Dict[str, object]:
        return {
            "level": str(self.level),
            "chi": list(self.chi.exponents),
            "bound": self.bound,
            "primes": len(self.alpha),
        }


def extend_powers(alpha_p: Value, p: Ideal, chi_p: CycValue, count: int, ramified: bool) -> Tuple[Value, ...]:
    """alpha(p), ..., alpha(p^count) from alpha(p) by the local recurrence"""
    values: List[Value] = [CycValue.rational(1), alpha_p]
    for k in range(1, count):
        if ramified:
            values.append(values[k] * alpha_p)
        else:
            values.append(values[k] * alpha_p - values[k - 1] * chi_p * p.norm)
    return tuple(simplify(v) for v in values[1 : count + 1])


# validation and evaluation

def relation_failures(lam: Eigensystem) -> List[str]:
    """Stored values violating the prime-power relations"""
    failures = []
    for p in lam.primes():
        values = lam.alpha[p]
        if len(values) != stored_powers(p, lam.bound):
            failures.append(f"{p}: {len(values)} powers stored")
            continue
        ramified = lam.divides_level(p)
        expected = extend_powers(values[0], p, lam.chi_of(p), len(values), ramified)
        for k, (have, want) in enumerate(zip(values, expected), start=1):
            if have != want:
                failures.append(f"alpha({p}^{k})")
    missing = [str(p) for p in primes_up_to(lam.field, lam.bound) if p not in lam.alpha]
    failures.extend(f"{p} missing" for p in missing)
    return failures


def validate(lam: Eigensystem) -> bool:
    """All stored values satisfy the Hecke relations"""
    failures = relation_failures(lam)
    if failures:
        logger.debug(f"Eigensystem fails at {', '.join(failures[:5])}")
    return not failures


def _hecke_value(lam: Eigensystem, b) -> Value:
    """lam(T_b) for an integral ideal b"""
    result: Value = CycValue.rational(1)
    for P, e in factor(b):
        result = result * lam.value(P, e)
    return result


def evaluate(lam: Eigensystem, T: OperatorDescriptor) -> Value:
    """lam on a product of T_a and T_{a,a}"""
    if T.kind is OperatorKind.COMPOSITE:
        result: Value = CycValue.rational(1)
        for part in T.parts:
            result = result * evaluate(lam, part)
        return simplify(result)
    if T.kind is OperatorKind.TAA:
        return lam.chi_of(T.ideal)
    if T.kind is OperatorKind.TA:
        return simplify(_hecke_value(lam, T.ideal))
    raise PreconditionError(f"Eigensystems are evaluated on T_a and T_(a,a) only, not {T}")


def principal_descriptor(a: Ideal, factors: Sequence[Ideal]) -> OperatorDescriptor:
    """T_{a,a} T_{b_1} ... T_{b_k}"""
    parts = [OperatorDescriptor.Taa(a)] + [OperatorDescriptor.Ta(b) for b in factors]
    return OperatorDescriptor.compose(*parts)


# twisting

def twist(lam: Eigensystem, psi: UnramifiedCharacter) -> Eigensystem:
    """lam (x) psi: alpha(p^k) -> psi(p)^k alpha(p^k), chi -> chi psi^2"""
    cg = lam.class_group()
    alpha = {}
    for p, values in lam.alpha.items():
        s = psi(cg.class_of(p))
        alpha[p] = tuple(simplify(v * s ** k) for k, v in enumerate(values, start=1))
    return Eigensystem(lam.level, lam.chi * psi ** 2, alpha, lam.bound)


def inner_twists(lam: Eigensystem) -> List[UnramifiedCharacter]:
    """Characters psi with lam (x) psi = lam on the stored data"""
    cg = lam.class_group()
    return [psi for psi in quadratic_characters(cg.cyclic_structure, lam.chi.conductor) if twist(lam, psi) == lam]


def _closure(classes: Iterable[IdealClass], identity: IdealClass) -> List[IdealClass]:
    group = {identity}
    frontier = set(classes)
    while frontier:
        group |= frontier
        frontier = {a * b for a in group for b in group} - group
    return sorted(group, key=lambda c: c.exponents)


def support_subgroup(lam: Eigensystem, cg: Optional[ClassGroup] = None) -> List[IdealClass]:
    """Subgroup generated by the squares and the classes where some alpha(p^k) is nonzero"""
    cg = cg or lam.class_group()
    classes = set(cg.squares())
    for p, values in lam.alpha.items():
        c = cg.class_of(p)
        for k, v in enumerate(values, start=1):
            if not value_is_zero(v):
                classes.add(c ** k)
    return _closure(classes, cg.identity)


# principal restriction

def _coset_vector(c: IdealClass) -> Tuple[int, ...]:
    """Image of a class in Cl/Cl^2"""
    return tuple(e % 2 for e, m in zip(c.exponents, c.moduli) if m % 2 == 0)


def _half_class(cg: ClassGroup, c: IdealClass) -> IdealClass:
    for s in cg.elements():
        if s ** 2 == c:
            return s
    raise PreconditionError(f"Class {c} is not a square")


class _ClassIdeals:
    """Smallest ideal coprime to the level in each class, memoized"""

    def __init__(self, cg: ClassGroup, level: Ideal):
        self.cg = cg
        self.level = level
        self._cache: Dict[IdealClass, Ideal] = {}

    def __call__(self, c: IdealClass) -> Ideal:
        if c not in self._cache:
            self._cache[c] = self.cg.ideal_in_class_coprime_to(c, self.level)
        return self._cache[c]

    def scaling_for(self, factors: Sequence[Ideal]) -> Ideal:
        """a with a^2 b_1 ... b_k principal"""
        total = self.cg.identity
        for b in factors:
            total = total * self.cg.class_of(b)
        return self(_half_class(self.cg, total.inverse()))


ROLES = ("character", "square_class", "prime_square", "pair", "check", "product")


@dataclass(frozen=True)
class RestrictionEntry:
    """Value of lam on T_{a,a} T_{b_1} ... T_{b_k} with a^2 b_1 ... b_k principal"""

    role: str
    a: Ideal
    factors: Tuple[Ideal, ...]
    value: Value

    def descriptor(self) -> OperatorDescriptor:
        return principal_descriptor(self.a, self.factors)

    def label(self) -> str:
        return str(self.descriptor())

    def key(self) -> Tuple[str, Tuple]:
        return self.role, tuple(b.hnf for b in self.factors)


@dataclass
class PrincipalRestriction:
    """lam on the principal operators the recovery consumes"""

    level: Ideal
    bound: int
    entries: List[RestrictionEntry]
    witnesses: List[Tuple[CycValue, CycValue]] = field(default_factory=list)

    @property
    def field(self):
        return self.level.field

    def lookup(self, role: str, factors: Sequence[Ideal]) -> RestrictionEntry:
        key = (role, tuple(b.hnf for b in factors))
        for entry in self.entries:
            if entry.key() == key:
                return entry
        raise InconsistentRestrictionError(
            f"Restriction has no {role} value for {', '.join(str(b) for b in factors)}",
            descriptor=role,
            source=",".join(str(b) for b in factors),
        )

    def by_role(self, role: str) -> List[RestrictionEntry]:
        return [e for e in self.entries if e.role == role]

    def root_of(self, v: CycValue) -> Value:
        """A square root of v: a registered witness, an exact rational root, or a formal one"""
        if v.is_zero():
            return CycValue.rational(0)
        for square, root in self.witnesses:
            if square == v:
                return root
        if v.is_rational() and v.to_fraction() > 0:
            r = sym_sqrt(Rational(v.to_fraction().numerator, v.to_fraction().denominator))
            if r.is_Rational:
                return CycValue.rational(Fraction(int(r.p), int(r.q)))
        return AdjoinedValue.sqrt(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrincipalRestriction):
            return NotImplemented
        if self.level != other.level or self.bound != other.bound or len(self.entries) != len(other.entries):
            return False
        return all(
            x.role == y.role and x.a == y.a and x.factors == y.factors and x.value == y.value
            for x, y in zip(self.entries, other.entries)
        )

    __hash__ = None


def _group_cosets(primes: Sequence[Ideal], cg: ClassGroup) -> Dict[Tuple[int, ...], List[Ideal]]:
    """Primes outside the square classes, grouped by coset of Cl^2"""
    cosets: Dict[Tuple[int, ...], List[Ideal]] = {}
    for p in primes:
        v = _coset_vector(cg.class_of(p))
        if any(v):
            cosets.setdefault(v, []).append(p)
    return cosets


def _span_basis(vectors: Sequence[Tuple[int, ...]]) -> Tuple[List[Tuple[int, ...]], Dict[Tuple[int, ...], Tuple[int, ...]]]:
    """Greedy GF(2) basis of the vectors and, for each vector, the basis indices summing to it"""
    basis: List[Tuple[int, ...]] = []
    span: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    combos: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    for v in vectors:
        if v in span:
            combos[v] = span[v]
            continue
        index = len(basis)
        basis.append(v)
        zero = tuple(0 for _ in v)
        span.setdefault(zero, ())
        for w, S in list(span.items()):
            span[tuple(x ^ y for x, y in zip(w, v))] = S + (index,)
        combos[v] = (index,)
    return basis, combos


def _reference_layout(cosets: Dict[Tuple[int, ...], List[Ideal]], nonzero) -> Tuple[Dict, List, Dict]:
    """Reference prime per coset, the basis cosets and each coset's basis combination"""
    references = {}
    for v, primes in cosets.items():
        for p in primes:
            if nonzero(p):
                references[v] = p
                break
    ordered = sorted(references, key=lambda v: _prime_key(references[v]))
    basis, combos = _span_basis(ordered)
    return references, basis, combos


def restrict_to_principal(lam: Eigensystem, with_witnesses: bool = True) -> PrincipalRestriction:
    """lam on T_{a,a} (a^2 principal), T_{a,a}T_p ([p] square), T_{a,a}T_{p^2}, pairs and coset products"""
    cg = lam.class_group()
    ideals = _ClassIdeals(cg, lam.level)
    entries: List[RestrictionEntry] = []

    def add(role: str, factors: Sequence[Ideal]):
        a = ideals.scaling_for(factors)
        value = lam.chi_of(a)
        for b in factors:
            value = value * _hecke_value(lam, b)
        entries.append(RestrictionEntry(role, a, tuple(factors), simplify(value)))

    for c in cg.two_torsion():
        a = ideals(c)
        entries.append(RestrictionEntry("character", a, (), lam.chi(c)))
    primes = lam.primes()
    for p in primes:
        add("prime_square", [p * p])
        if not any(_coset_vector(cg.class_of(p))):
            add("square_class", [p])

    cosets = _group_cosets(primes, cg)
    references, basis, combos = _reference_layout(cosets, lambda p: not value_is_zero(lam.value(p, 1)))
    for v, coset_primes in sorted(cosets.items()):
        ref = references.get(v)
        if ref is None:
            continue
        others = [p for p in coset_primes if p != ref]
        for p in others:
            add("pair", [p, ref])
        for p, q in zip(others, others[1:]):
            add("check", [p, q])
    for v, indices in combos.items():
        if len(indices) > 1:
            add("product", [references[v]] + [references[basis[i]] for i in indices])

    witnesses: List[Tuple[CycValue, CycValue]] = []
    if with_witnesses:
        for v in basis:
            ref = references[v]
            root = lam.value(ref, 1)
            if isinstance(root, AdjoinedValue):
                continue
            for psi in all_characters(cg.cyclic_structure, lam.chi.conductor):
                s = psi(cg.class_of(ref))
                witnesses.append((root * root * s * s, root * s))
    logger.debug(f"Restriction at level {lam.level}: {len(entries)} values, {len(witnesses)} witness roots")
    return PrincipalRestriction(lam.level, lam.bound, entries, witnesses)


# recovery

def _inverse_monomial(x: Value) -> Value:
    """1/x for x a cyclotomic multiple of a product of square roots"""
    if isinstance(x, CycValue):
        return x.inverse()
    collapsed = x.collapse()
    if isinstance(collapsed, CycValue):
        return collapsed.inverse()
    square = simplify(x * x)
    if not isinstance(square, CycValue):
        raise PreconditionError(f"Cannot invert {x}")
    return simplify(x * square.inverse())


def _divide(num: Value, den: Value) -> Value:
    return simplify(num * _inverse_monomial(den))


def _character_candidates(r: PrincipalRestriction, cg: ClassGroup) -> List[UnramifiedCharacter]:
    """Characters agreeing with the restriction on Cl[2]"""
    chars = r.by_role("character")
    values = {cg.class_of(e.a): e.value for e in chars}
    for e in chars:
        if e.value * e.value != 1:
            raise InconsistentRestrictionError(
                f"{e.label()} has value {e.value}, not a square root of 1",
                descriptor=e.label(),
                source=e.label(),
            )
    for e1, e2 in itertools.combinations_with_replacement(chars, 2):
        c3 = cg.class_of(e1.a) * cg.class_of(e2.a)
        if c3 in values and e1.value * e2.value != values[c3]:
            raise InconsistentRestrictionError(
                f"{e1.label()} and {e2.label()} are not multiplicative",
                descriptor=e1.label(),
                source=e2.label(),
            )
    candidates = [
        chi
        for chi in all_characters(cg.cyclic_structure)
        if all(chi(cg.class_of(e.a)) == e.value for e in chars)
    ]
    if not candidates:
        first = chars[0].label() if chars else "Taa"
        raise InconsistentRestrictionError("No character matches the T_(a,a) values", descriptor=first, source=first)
    return candidates


class _Recovery:
    """Recovery of every eigensystem with a given principal restriction"""

    def __init__(self, r: PrincipalRestriction, cg: ClassGroup):
        self.r = r
        self.cg = cg
        self.level = r.level
        self.primes = primes_up_to(r.field, r.bound)
        self.logger = logging.getLogger(__name__)

    def _chi_scaled(self, entry: RestrictionEntry, chi: UnramifiedCharacter) -> Value:
        """entry value divided by chi(a)"""
        return _divide(entry.value, chi(self.cg.class_of(entry.a)))

    def _square_value(self, p: Ideal, alpha2: Value, chi: UnramifiedCharacter) -> Value:
        if p.divides(self.level):
            return alpha2
        return simplify(alpha2 + chi(self.cg.class_of(p)) * p.norm)

    def _require_square(self, p: Ideal, a1: Value, sq: Value, entry: RestrictionEntry) -> None:
        if simplify(a1 * a1) != sq:
            source = self.r.lookup("prime_square", [p * p])
            raise InconsistentRestrictionError(
                f"alpha({p})^2 from {entry.label()} disagrees with {source.label()}",
                descriptor=entry.label(),
                source=source.label(),
            )

    def for_character(self, chi: UnramifiedCharacter) -> List[Eigensystem]:
        r = self.r
        squares: Dict[Ideal, Value] = {}
        alpha1: Dict[Ideal, Value] = {}
        for p in self.primes:
            alpha2 = self._chi_scaled(r.lookup("prime_square", [p * p]), chi)
            squares[p] = self._square_value(p, alpha2, chi)
            if not any(_coset_vector(self.cg.class_of(p))):
                entry = r.lookup("square_class", [p])
                alpha1[p] = self._chi_scaled(entry, chi)
                self._require_square(p, alpha1[p], squares[p], entry)

        cosets = _group_cosets(self.primes, self.cg)
        references, basis, combos = _reference_layout(cosets, lambda p: not value_is_zero(squares[p]))
        for v, coset_primes in cosets.items():
            if v not in references:
                for p in coset_primes:
                    alpha1[p] = CycValue.rational(0)

        roots = [r.root_of(as_cyc(squares[references[v]])) for v in basis]
        out = []
        for signs in itertools.product((1, -1), repeat=len(basis)):
            values = dict(alpha1)
            for v, root, s in zip(basis, roots, signs):
                values[references[v]] = simplify(root * s)
            for v, indices in combos.items():
                if len(indices) > 1:
                    refs = [references[basis[i]] for i in indices]
                    entry = r.lookup("product", [references[v]] + refs)
                    den: Value = CycValue.rational(1)
                    for q in refs:
                        den = den * values[q]
                    values[references[v]] = _divide(self._chi_scaled(entry, chi), den)
                    self._require_square(references[v], values[references[v]], squares[references[v]], entry)
            for v, ref in references.items():
                for p in cosets[v]:
                    if p == ref:
                        continue
                    entry = r.lookup("pair", [p, ref])
                    values[p] = _divide(self._chi_scaled(entry, chi), values[ref])
                    self._require_square(p, values[p], squares[p], entry)
            self._check_pairs(values, chi)
            alpha = {
                p: extend_powers(values[p], p, chi(self.cg.class_of(p)), stored_powers(p, r.bound), p.divides(self.level))
                for p in self.primes
            }
            out.append(Eigensystem(self.level, chi, alpha, r.bound))
        return out

    def _check_pairs(self, values: Dict[Ideal, Value], chi: UnramifiedCharacter) -> None:
        pairs = {e.factors[0]: e for e in self.r.by_role("pair")}
        for entry in self.r.by_role("check"):
            p, q = entry.factors
            if simplify(values[p] * values[q]) != self._chi_scaled(entry, chi):
                source = pairs[p].label() if p in pairs else entry.label()
                raise InconsistentRestrictionError(
                    f"{entry.label()} disagrees with {source}",
                    descriptor=entry.label(),
                    source=source,
                )


def recover(r: PrincipalRestriction, cg: Optional[ClassGroup] = None) -> List[Eigensystem]:
    """Every eigensystem whose principal restriction is r, up to the stored bound"""
    cg = cg or class_group(r.field, r.level)
    recovery = _Recovery(r, cg)
    found: List[Eigensystem] = []
    for chi in _character_candidates(r, cg):
        for lam in recovery.for_character(chi):
            if not any(lam == other for other in found):
                found.append(lam)
    logger.info(f"Recovered {len(found)} eigensystems at level {r.level}, bound {r.bound}")
    return found


def twist_orbit(lam: Eigensystem) -> List[Eigensystem]:
    """Distinct twists of lam by every unramified character"""
    cg = lam.class_group()
    out: List[Eigensystem] = []
    for psi in all_characters(cg.cyclic_structure, lam.chi.conductor):
        mu = twist(lam, psi)
        if not any(mu == other for other in out):
            out.append(mu)
    return out


# synthetic systems

def _random_integer(rng: random.Random, m: int) -> CycValue:
    """Nonzero small element of Z[zeta_m]"""
    degree = int(totient(m))
    while True:
        coeffs = [rng.randint(-4, 4) for _ in range(min(degree, 2))] + [0] * max(degree - 2, 0)
        if any(coeffs):
            return CycValue(m, tuple(coeffs))


def synthesize(
    seed: int,
    cg: ClassGroup,
    n: Ideal,
    bound: int,
    force_inner_twist: bool = False,
    chi: Optional[UnramifiedCharacter] = None,
) -> Eigensystem:
    """A random eigensystem satisfying the Hecke relations

    With force_inner_twist, alpha(p) vanishes on primes outside an index-2
    subgroup containing Cl^2, so the system is its own quadratic twist.
    """
    rng = random.Random(seed)
    characters = all_characters(cg.cyclic_structure)
    chi = chi or characters[rng.randrange(len(characters))]
    support = None
    if force_inner_twist:
        twisting = [psi for psi in quadratic_characters(cg.cyclic_structure) if not psi.is_trivial()]
        if not twisting:
            raise PreconditionError(f"Class number {cg.h} has no quadratic characters")
        psi = twisting[rng.randrange(len(twisting))]
        support = [c for c in cg.elements() if psi(c) == 1]
    alpha = {}
    for p in primes_up_to(cg.field, bound):
        c = cg.class_of(p)
        if support is not None and c not in support:
            a1 = CycValue.rational(0, chi.conductor)
        else:
            a1 = _random_integer(rng, chi.conductor)
        alpha[p] = extend_powers(a1, p, chi(c), stored_powers(p, bound), p.divides(n))
    logger.debug(f"Synthesized eigensystem seed={seed} chi={chi} at level {n}")
    return Eigensystem(n, chi, alpha, bound)


# power series

def dirichlet_coefficients(lam: Eigensystem, bound: Optional[int] = None) -> List[Tuple[Ideal, Value]]:
    """lam(T_a) for every integral ideal of norm <= bound"""
    bound = bound or lam.bound
    if bound > lam.bound:
        raise PreconditionError(f"Bound {bound} exceeds the stored bound {lam.bound}")
    return [(a, simplify(_hecke_value(lam, a))) for a in ideals_up_to_norm(lam.field, bound)]


def euler_factor_check(lam: Eigensystem, p: Ideal) -> Tuple[bool, str]:
    """sum lam(T_{p^k}) X^k times the local factor is 1 up to the stored degree"""
    count = len(lam.alpha[p])
    series = [lam.value(p, k) for k in range(count + 1)]
    local = [CycValue.rational(1), -lam.value(p, 1)]
    if not lam.divides_level(p):
        local.append(lam.chi_of(p) * p.norm)
    for k in range(1, count + 1):
        total: Value = CycValue.rational(0)
        for i, f in enumerate(local[: k + 1]):
            total = total + series[k - i] * f
        if not value_is_zero(simplify(total)):
            return False, f"coefficient of X^{k} is {simplify(total)}"
    return True, ""


def check_eigensystem(lam: Eigensystem, runner: Optional[VerificationRunner] = None) -> bool:
    """Relations and local factors of every stored prime"""
    runner = runner or VerificationRunner()
    checks = [Check("relations", lambda: (validate(lam), ", ".join(relation_failures(lam)[:5])))]
    checks += [Check(f"euler_factor:{p}", lambda p=p: euler_factor_check(lam, p)) for p in lam.primes()]
    return all_passed(runner.run(checks))
