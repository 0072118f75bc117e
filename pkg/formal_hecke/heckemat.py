#!/usr/bin/env python3
"""
Matrices for principal Hecke and Atkin-Lehner operators
Hecke matrices of level n for dual T_{a,a} T_b, the explicit special
cases, W_q^m-matrices, the T_p W_q set and their sublattice verification
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .classgroup import IdealClass, class_group
from .errors import NonPrincipalError, NotCoprimeError, PreconditionError
from .heckeops import OperatorDescriptor, OperatorKind, ideal_norm
from .ideals import (
    Ideal,
    crt_element,
    divisors,
    eta,
    exact_divisors,
    factor,
    is_exact_divisor,
    principal_generator,
    small_elements,
    solve_in_ideals,
)
from .linmod import PseudoLattice, ab_matrix, index_ideal
from .mat2 import Mat2
from .modpts import FormalSum, ModularPoint0, validate0
from .msym import MSymbol, enumerate_p1, lift_pair, lift_to_gamma0
from .qfield import FieldElement
from .verify_runner import Check, CheckResult, VerificationRunner, all_passed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeckeMatrixSet:
    """Integral matrices realizing a principal dual operator at level n"""

    level: Ideal
    descriptor: OperatorDescriptor
    delta: FieldElement
    matrices: Tuple[Mat2, ...]
    expected_count: int
    symbols: Tuple[MSymbol, ...] = ()
    aux: Optional[FieldElement] = None

    @property
    def field(self):
        return self.level.field

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def normalizes(self) -> bool:
        """True when the sublattices form a full index class, stable under GL(2, O)"""
        parts = self.descriptor.parts if self.descriptor.kind is OperatorKind.COMPOSITE else (self.descriptor,)
        return not any(p.kind is OperatorKind.WQ_DUAL for p in parts)

    def scale(self) -> Fraction:
        return descriptor_scale(self.descriptor)


def descriptor_scale(T: OperatorDescriptor) -> Fraction:
    """Norm factor of a product of dual operators"""
    if T.kind is OperatorKind.COMPOSITE:
        result = Fraction(1)
        for part in T.parts:
            result *= descriptor_scale(part)
        return result
    if T.kind is OperatorKind.TA_DUAL or T.kind is OperatorKind.WQ_DUAL:
        return ideal_norm(T.ideal)
    if T.kind is OperatorKind.TAA_DUAL:
        return ideal_norm(T.ideal) ** 2
    raise PreconditionError(f"{T} has no integral matrix realization")


def _dual_descriptor(a: Ideal, b: Ideal) -> OperatorDescriptor:
    parts = []
    if not a.is_one():
        parts.append(OperatorDescriptor(OperatorKind.TAA_DUAL, ideal=a))
    parts.append(OperatorDescriptor(OperatorKind.TA_DUAL, ideal=b))
    return parts[0] if len(parts) == 1 else OperatorDescriptor.compose(*parts)


def _generator(ideal, what: str) -> FieldElement:
    g = principal_generator(ideal)
    if g is None:
        raise NonPrincipalError(f"{what} is not principal")
    return g


def _require_coprime(ideal: Ideal, n: Ideal, what: str) -> None:
    if not ideal.is_coprime_to(n):
        raise NotCoprimeError(f"{what} {ideal} is not coprime to the level {n}")


def _is_prime(p: Ideal) -> bool:
    return factor(p) == [(p, 1)]


def choose_nu(n: Ideal, excluded: Sequence[Ideal]) -> FieldElement:
    """Smallest-norm element of n outside every excluded prime"""
    candidates = [e for e in small_elements(n) if not any(P.contains(e) for P in excluded)]
    if not candidates:
        raise PreconditionError(f"No element of {n} avoids {', '.join(str(P) for P in excluded)}")
    return min(candidates, key=lambda e: (e.norm(), e.sort_key()))


def _coset_lifts(b1: Ideal, n: Ideal) -> List[Mat2]:
    """Representatives in Gamma_0(n) of Gamma_0(b1) cosets in GL(2, O)"""
    return [lift_to_gamma0(s, n) for s in enumerate_p1(b1)]


# general construction

def hecke_matrices_index_b(a: Ideal, b: Ideal, n: Ideal) -> HeckeMatrixSet:
    """eta(b) matrices B*C with B an (a b1 b2, a b2)-matrix of level n, b = b1 b2^2"""
    beta = _generator(a * a * b, f"{a}^2*{b}")
    _require_coprime(b, n, "Index ideal")
    _require_coprime(a, n, "Scaling ideal")
    matrices: List[Mat2] = []
    for b2 in divisors(b):
        sq = b2 * b2
        if not sq.divides(b):
            continue
        b1 = b.divide(sq, integral=True)
        B = ab_matrix(a * b1 * b2, a * b2, n)
        # B has determinant beta up to a unit
        u = beta / B.det()
        B = Mat2(B.a * u, B.b, B.c * u, B.d)
        matrices.extend(B * C for C in _coset_lifts(b1, n))
    logger.debug(f"{len(matrices)} Hecke matrices for a={a}, b={b} at level {n}")
    return HeckeMatrixSet(n, _dual_descriptor(a, b), beta, tuple(matrices), eta(b))


# explicit special cases

def principal_prime(pi: FieldElement, n: Ideal) -> HeckeMatrixSet:
    """diag(pi, 1) and [[1, x], [0, pi]] for x mod p"""
    field = pi.field
    p = Ideal.principal(pi)
    _require_coprime(p, n, "Prime")
    one, zero = field.one, field.zero
    matrices = [Mat2(pi, zero, zero, one)]
    matrices += [Mat2(one, x, zero, pi) for x in p.residues()]
    return HeckeMatrixSet(n, _dual_descriptor(Ideal.unit(field), p), pi, tuple(matrices), p.norm + 1)


def square_class_prime(a: Ideal, p: Ideal, n: Ideal) -> HeckeMatrixSet:
    """B and B*[[1, x], [nu, 1 + x nu]] for x mod p, B an (ap, a)-matrix of level n"""
    field = n.field
    delta = _generator(a * a * p, f"{a}^2*{p}")
    _require_coprime(p, n, "Prime")
    _require_coprime(a, n, "Scaling ideal")
    B = ab_matrix(a * p, a, n)
    nu = choose_nu(n, [p])
    one = field.one
    matrices = [B] + [B * Mat2(one, x, nu, one + x * nu) for x in p.residues()]
    return HeckeMatrixSet(n, _dual_descriptor(a, p), delta, tuple(matrices), p.norm + 1)


def principal_prime_square(beta: FieldElement, p: Ideal, n: Ideal) -> HeckeMatrixSet:
    """A (p, p)-matrix, [[1, x], [0, beta]] for x mod p^2 and [[beta, 0], [y nu, 1]] for y in p mod p^2"""
    field = n.field
    p2 = p * p
    if Ideal.principal(beta) != p2:
        raise NonPrincipalError(f"{beta} does not generate {p}^2")
    _require_coprime(p, n, "Prime")
    one, zero = field.one, field.zero
    nu = choose_nu(n, [p])
    matrices = [ab_matrix(p, p, n)]
    matrices += [Mat2(one, x, zero, beta) for x in p2.residues()]
    matrices += [Mat2(beta, zero, y * nu, one) for y in p2.residues() if p.contains(y)]
    return HeckeMatrixSet(n, _dual_descriptor(Ideal.unit(field), p2), beta, tuple(matrices), eta(p2))


def taa_tp2(a: Ideal, p: Ideal, n: Ideal) -> HeckeMatrixSet:
    """B1 an (ap, ap)-matrix and B2*C, B2 an (ap^2, a)-matrix, C over P^1(p^2)"""
    p2 = p * p
    delta = _generator(a * a * p2, f"{a}^2*{p}^2")
    _require_coprime(p, n, "Prime")
    _require_coprime(a, n, "Scaling ideal")
    B1 = ab_matrix(a * p, a * p, n)
    B2 = ab_matrix(a * p2, a, n)
    matrices = [B1] + [B2 * C for C in _coset_lifts(p2, n)]
    return HeckeMatrixSet(n, _dual_descriptor(a, p2), delta, tuple(matrices), eta(p2))


def principal_pq(beta: FieldElement, p: Ideal, q: Ideal, n: Ideal) -> HeckeMatrixSet:
    """Hecke matrices for a principal product of two distinct primes"""
    field = n.field
    pq = p * q
    if p == q or Ideal.principal(beta) != pq:
        raise NonPrincipalError(f"{beta} does not generate {p}*{q} for distinct primes")
    _require_coprime(pq, n, "Index ideal")
    one, zero = field.one, field.zero
    nu = choose_nu(n, [p, q])
    residues = pq.residues()
    matrices = [Mat2(one, x, zero, beta) for x in residues]
    matrices += [Mat2(beta, zero, y * nu, one) for y in residues if p.contains(y) or q.contains(y)]
    matrices += [ab_matrix(p, q, n), ab_matrix(q, p, n)]
    return HeckeMatrixSet(n, _dual_descriptor(Ideal.unit(field), pq), beta, tuple(matrices), eta(pq))


def taa_tpq(a: Ideal, p: Ideal, q: Ideal, n: Ideal) -> HeckeMatrixSet:
    """B*C with B an (apq, a)-matrix of level n and C over P^1(pq)"""
    if p == q:
        raise PreconditionError("Primes must be distinct")
    pq = p * q
    delta = _generator(a * a * pq, f"{a}^2*{p}*{q}")
    _require_coprime(pq, n, "Index ideal")
    _require_coprime(a, n, "Scaling ideal")
    B = ab_matrix(a * pq, a, n)
    matrices = [B * C for C in _coset_lifts(pq, n)]
    return HeckeMatrixSet(n, _dual_descriptor(a, pq), delta, tuple(matrices), eta(pq))


# Atkin-Lehner matrices

def is_wqm_matrix(M: Mat2, q: Ideal, m: Ideal, n: Ideal) -> bool:
    """M in [[mq, m], [mn, mq]] with <det M> = q m^2"""
    if M.is_singular():
        return False
    mq = m * q
    return (
        mq.contains(M.a)
        and mq.contains(M.d)
        and m.contains(M.b)
        and (m * n).contains(M.c)
        and Ideal.principal(M.det()) == q * m * m
    ) if M.is_integral() else False


def is_wq_matrix(M: Mat2, q: Ideal, n: Ideal) -> bool:
    return is_wqm_matrix(M, q, Ideal.unit(n.field), n)


def wqm_matrix(q: Ideal, m: Ideal, n: Ideal) -> Mat2:
    """A W_q^m-matrix of level n: [[x, y], [z, g w]] with q m^2 = <g>"""
    field = n.field
    if not is_exact_divisor(q, n):
        raise PreconditionError(f"{q} is not an exact divisor of {n}")
    if q.is_one() and m.is_one():
        return Mat2.identity(field)
    qp = n.divide(q, integral=True)
    if not m.is_coprime_to(qp):
        raise NotCoprimeError(f"{m} is not coprime to {qp}")
    g = _generator(q * m * m, f"{q}*{m}^2")
    cg = class_group(field, n)
    mn = m * n
    a = cg.ideal_in_class_coprime_to(cg.class_of(mn).inverse(), mn)
    z = principal_generator(a * mn)
    mq = m * q
    b = cg.ideal_in_class_coprime_to(cg.class_of(mq).inverse(), a * qp)
    x = principal_generator(b * mq)
    w, y = solve_in_ideals(g, [(g * x, m), (-z, m)])
    M = Mat2(x, y, z, g * w)
    logger.debug(f"W_{q}^{m} matrix at level {n}: {M}")
    return M


def wq_matrix(q: Ideal, n: Ideal) -> Mat2:
    """A W_q-matrix of level n for a principal exact divisor q"""
    if principal_generator(q) is None:
        raise NonPrincipalError(f"{q} is not principal")
    return wqm_matrix(q, Ideal.unit(n.field), n)


def wqm_product_class(q1: Ideal, m1: Ideal, q2: Ideal, m2: Ideal) -> Tuple[Ideal, Ideal]:
    """(q3, m3) with m3 = a m1 m2, q3 = q1 q2 a^-2 and a = q1 + q2"""
    a = q1 + q2
    q3 = (q1 * q2).divide(a * a, integral=True)
    return q3, a * m1 * m2


def wqm_matrix_set(q: Ideal, m: Ideal, n: Ideal) -> HeckeMatrixSet:
    """The single matrix for dual W_q composed with dual T_{m,m}"""
    M = wqm_matrix(q, m, n)
    parts = [OperatorDescriptor(OperatorKind.WQ_DUAL, ideal=q)]
    if not m.is_one():
        parts.insert(0, OperatorDescriptor(OperatorKind.TAA_DUAL, ideal=m))
    desc = parts[0] if len(parts) == 1 else OperatorDescriptor.compose(*parts)
    return HeckeMatrixSet(n, desc, M.det(), (M,), 1)


def fricke_matrix(n: Ideal, m: Optional[Ideal] = None) -> Mat2:
    """A W_n^m-matrix; m defaults to the smallest ideal coprime to n with n m^2 principal"""
    if m is None:
        cg = class_group(n.field, n)
        cn = cg.class_of(n)
        for c in cg.elements():
            if (cn * c ** 2).is_trivial():
                m = cg.ideal_in_class_coprime_to(c, n)
                break
        else:
            raise NonPrincipalError(f"The class of {n} is not a square")
    return wqm_matrix(n, m, n)


@dataclass(frozen=True)
class WqmEntry:
    """A W_q^m-matrix labelled by (q, [m])"""

    q: Ideal
    m_class: IdealClass
    m: Ideal
    matrix: Mat2

    def label(self) -> Tuple[Tuple[int, int, int], Tuple[int, ...]]:
        return (self.q.hnf, self.m_class.exponents)


def wqm_group(n: Ideal) -> List[WqmEntry]:
    """One W_q^m-matrix per label (q, [m]) with q m^2 principal"""
    cg = class_group(n.field, n)
    out = []
    for q in exact_divisors(n):
        cq = cg.class_of(q)
        for c in cg.elements():
            if not (cq * c ** 2).is_trivial():
                continue
            m = cg.ideal_in_class_coprime_to(c, n)
            out.append(WqmEntry(q, c, m, wqm_matrix(q, m, n)))
    logger.info(f"{len(out)} W_q^m labels at level {n}")
    return out


# T_p W_q

def tp_wq_matrices(p: Ideal, q: Ideal, n: Ideal) -> HeckeMatrixSet:
    """N(p)+1 matrices [[d, c/h], [b g h, a g]] for dual T_p composed with dual W_q"""
    field = n.field
    if q.is_one():
        raise PreconditionError("Use Hecke matrices when q is trivial")
    if not _is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    _require_coprime(p, n, "Prime")
    if not is_exact_divisor(q, n):
        raise PreconditionError(f"{q} is not an exact divisor of {n}")
    g = _generator(p * q, f"{p}*{q}")
    qp = n.divide(q, integral=True)
    cg = class_group(field, n)
    b = cg.ideal_in_class_coprime_to(cg.class_of(qp).inverse(), p * q)
    bqp = b * qp
    h = principal_generator(bqp)
    modulus = p * q * bqp
    one, zero = field.one, field.zero
    matrices = []
    symbols = enumerate_p1(p)
    for s in symbols:
        c = crt_element(field, [(s.c, p), (one, q), (zero, bqp)])
        d = crt_element(field, [(s.d, p), (zero, q), (one, bqp)])
        lift = lift_pair(c, d, modulus)
        matrices.append(Mat2(lift.d, lift.c / h, lift.b * g * h, lift.a * g))
    desc = OperatorDescriptor.compose(
        OperatorDescriptor(OperatorKind.TA_DUAL, ideal=p),
        OperatorDescriptor(OperatorKind.WQ_DUAL, ideal=q),
    )
    return HeckeMatrixSet(n, desc, g, tuple(matrices), p.norm + 1, tuple(symbols), h)


# verification

def principal_point(n: Ideal) -> ModularPoint0:
    """(O + O, O + n^-1)"""
    field = n.field
    return ModularPoint0(PseudoLattice.free(field), PseudoLattice.split(Ideal.unit(field), n.inverse()), n)


def sublattice_set(S: HeckeMatrixSet) -> FrozenSet[PseudoLattice]:
    free = PseudoLattice.free(S.field)
    return frozenset(free.times(g) for g in S.matrices)


def _gl2_generators(field) -> List[Mat2]:
    one, zero = field.one, field.zero
    gens = [Mat2(zero, -one, one, zero), Mat2(one, one, zero, one), Mat2(one, field.omega, zero, one)]
    gens += [Mat2(u, zero, zero, one) for u in field.units() if u != one]
    return gens


@dataclass
class SublatticeReport:
    """Outcome of verify_sublattice_action"""

    descriptor: str
    results: List[CheckResult]
    units: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all_passed(self.results)

    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]


def verify_sublattice_action(S: HeckeMatrixSet, runner: Optional[VerificationRunner] = None) -> SublatticeReport:
    """Distinctness, count, determinants, level and normalization of a matrix set"""
    runner = runner or VerificationRunner()
    n = S.level
    fld = S.field
    free = PseudoLattice.free(fld)
    Lp = PseudoLattice.split(Ideal.unit(fld), n.inverse())
    lattices = [free.times(g) for g in S.matrices]
    delta_ideal = Ideal.principal(S.delta)

    def distinct():
        dupes = len(lattices) - len(set(lattices))
        return dupes == 0, f"{dupes} repeated sublattices" if dupes else ""

    def count():
        return len(S.matrices) == S.expected_count, f"{len(S.matrices)} matrices, expected {S.expected_count}"

    def determinants():
        bad = [str(g) for g in S.matrices if g.is_singular() or not (g.det() / S.delta).is_unit()]
        return not bad, "; ".join(bad)

    def index():
        bad = [str(g) for g, L in zip(S.matrices, lattices) if index_ideal(free, L) != delta_ideal]
        return not bad, "; ".join(bad)

    def level():
        bad = [str(g) for g in S.matrices if not g.is_integral() or not n.contains(g.c)]
        return not bad, "; ".join(bad)

    def level_structure():
        bad = [str(g) for g in S.matrices if not validate0(ModularPoint0(free.times(g), Lp.times(g), n))]
        return not bad, "; ".join(bad)

    def normalization():
        target = set(lattices)
        for gamma in _gl2_generators(fld):
            if {L.times(gamma) for L in lattices} != target:
                return False, f"not stable under {gamma}"
        return True, ""

    checks = [
        Check("distinct", distinct),
        Check("count", count),
        Check("determinant", determinants),
        Check("index", index),
        Check("level", level),
        Check("level_structure", level_structure),
    ]
    if S.normalizes():
        checks.append(Check("normalization", normalization))
    if S.symbols:
        checks.append(Check("symbol_containment", lambda: _tp_wq_containment(S)))
    results = runner.run(checks)
    units = [str(g.det() / S.delta) for g in S.matrices if not g.is_singular()]
    report = SublatticeReport(str(S.descriptor), results, units)
    if not report.passed:
        logger.warning(f"Matrix set {S.descriptor} failed {report.failures()}")
    return report


def _tp_wq_containment(S: HeckeMatrixSet) -> Tuple[bool, str]:
    """Top rows in the sublattice of the symbol, bottom rows in p, entries in [[q, O], [n, q]]"""
    p_desc, q_desc = S.descriptor.parts
    p, q, n = p_desc.ideal, q_desc.ideal, S.level
    h = S.aux
    for s, M in zip(S.symbols, S.matrices):
        if not p.contains(s.c * M.a - s.d * h * M.b):
            return False, f"{M} not in the sublattice of {s}"
        if not (p.contains(M.c) and p.contains(M.d)):
            return False, f"bottom row of {M} not in {p}"
        if not (q.contains(M.a) and q.contains(M.d) and n.contains(M.c) and M.b.is_integral()):
            return False, f"{M} has entries outside [[q, O], [n, q]]"
    return True, ""


def apply_matrix_set(S: HeckeMatrixSet, U: Optional[Mat2] = None, scaled: bool = True) -> FormalSum:
    """Sum of (O + O, O + n^-1) g U over the set, times the dual norm factor"""
    P = principal_point(S.level)
    coeff = S.scale() if scaled else Fraction(1)
    terms = []
    for g in S.matrices:
        M = g if U is None else g * U
        terms.append((P.times(M), coeff))
    return FormalSum(S.level, terms)
