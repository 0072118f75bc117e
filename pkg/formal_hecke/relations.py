#!/usr/bin/env python3
"""
Relation suites for the formal Hecke algebra
Each suite builds named checks comparing formal sums exactly; the
verification runner executes them
"""

import logging
import threading
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .classgroup import ClassGroup, IdealClass, class_group
from .errors import PreconditionError
from .heckemat import (
    HeckeMatrixSet,
    apply_matrix_set,
    hecke_matrices_index_b,
    is_wq_matrix,
    is_wqm_matrix,
    principal_point,
    principal_pq,
    principal_prime,
    principal_prime_square,
    square_class_prime,
    sublattice_set,
    taa_tp2,
    taa_tpq,
    tp_wq_matrices,
    verify_sublattice_action,
    wq_matrix,
    wqm_group,
    wqm_product_class,
)
from .heckeops import (
    OperatorDescriptor,
    OperatorKind,
    a_d,
    class_shift,
    diamond_op,
    evaluate,
    t_a,
    t_a_dual,
    t_aa,
    w_q,
    w_q_dual,
)
from .ideals import (
    Ideal,
    divisors,
    exact_divisors,
    factor,
    is_principal,
    primes_up_to,
    principal_generator,
)
from .linmod import PseudoLattice
from .mat2 import Mat2
from .modpts import FormalSum, ModularPoint, ModularPoint0, standard_point1, standard_points0
from .qfield import FieldDesc, FieldElement
from .verify_runner import Check, CheckResult, VerificationRunner

logger = logging.getLogger(__name__)

CheckOutcome = Tuple[bool, str]


def _compare(lhs: FormalSum, rhs: FormalSum) -> CheckOutcome:
    if lhs == rhs:
        return True, ""
    diff = lhs - rhs
    return False, f"{len(diff)} points differ, e.g. {diff.terms[0][0]}"


def _weighted_sum(level: Ideal, points: Sequence[ModularPoint]) -> FormalSum:
    """sum (k+1) P_k, so that no two points can cancel"""
    return FormalSum(level, [(P, k + 1) for k, P in enumerate(points)])


def _translates(P: ModularPoint) -> List[ModularPoint]:
    """P times a lower unipotent matrix and P scaled by 2; both are distinct from P when n != O"""
    field = P.field
    lower = Mat2(field.one, field.zero, field.one, field.one)
    return [P.times(lower), P.scale(field.element(2))]


def sample_points0(n: Ideal, cg: Optional[ClassGroup] = None) -> List[ModularPoint0]:
    """Standard points of every class and two translates of the first"""
    cg = cg or class_group(n.field, n)
    points = standard_points0(n, cg)
    points += _translates(points[0])
    return list(dict.fromkeys(points))


def sample_points1(n: Ideal, cg: Optional[ClassGroup] = None) -> List[ModularPoint]:
    cg = cg or class_group(n.field, n)
    points = [standard_point1(i, j, n, cg) for i in range(1, cg.h2 + 1) for j in range(1, cg.h2prime + 1)]
    points += _translates(points[0])
    return list(dict.fromkeys(points))


@dataclass
class RelationContext:
    """Field, level, sample points and the ideals the suites exercise"""

    field: FieldDesc
    level: Ideal
    cg: ClassGroup
    points0: List[ModularPoint0]
    points1: List[ModularPoint]
    coprime_primes: List[Ideal]
    level_primes: List[Ideal]
    max_power: int = 3
    _images: Dict[Tuple[Ideal, FormalSum], FormalSum] = dataclass_field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = dataclass_field(default_factory=threading.Lock, repr=False, compare=False)

    @classmethod
    def build(cls, fld: FieldDesc, level: Ideal, prime_bound: int = 13, max_power: int = 3) -> "RelationContext":
        cg = class_group(fld, level)
        coprime = [p for p in primes_up_to(fld, prime_bound) if p.is_coprime_to(level)][:2]
        if not coprime:
            raise PreconditionError(f"No prime of norm <= {prime_bound} is coprime to {level}")
        points1 = sample_points1(level, cg) if not level.is_one() else []
        return cls(
            fld,
            level,
            cg,
            sample_points0(level, cg),
            points1,
            coprime,
            [P for P, _ in factor(level)],
            max_power,
        )

    def v0(self) -> FormalSum:
        return _weighted_sum(self.level, self.points0)

    def v1(self) -> FormalSum:
        return _weighted_sum(self.level, self.points1)

    @property
    def p1(self) -> Ideal:
        return self.coprime_primes[0]

    def pairs(self) -> List[Tuple[Ideal, Ideal]]:
        ps = self.coprime_primes
        return [(ps[0], ps[1])] if len(ps) > 1 else []

    def ta(self, a: Ideal, v: FormalSum) -> FormalSum:
        """T_a v, computed once per context and shared between checks"""
        key = (a, v)
        with self._lock:
            if key in self._images:
                return self._images[key]
        image = t_a(a, v)
        with self._lock:
            return self._images.setdefault(key, image)


# Hecke relations

def hecke_relation_checks(ctx: RelationContext) -> List[Check]:
    """Identity, T_{a,a} multiplicativity, commutation, coprime products and prime powers"""
    n, v = ctx.level, ctx.v0()
    unit = Ideal.unit(ctx.field)
    checks = [
        Check("hecke.identity", lambda: (ctx.ta(unit, v) == v and t_aa(unit, v) == v, "")),
    ]
    p1 = ctx.p1
    checks.append(Check(f"hecke.taa_inverse:{p1}", lambda: _compare(t_aa(p1.inverse(), t_aa(p1, v)), v)))
    for a, b in ctx.pairs():
        checks.append(Check(
            f"hecke.taa_product:{a},{b}",
            lambda a=a, b=b: _compare(t_aa(a, t_aa(b, v)), t_aa(a * b, v)),
        ))
        checks.append(Check(
            f"hecke.taa_commute:{a},{b}",
            lambda a=a, b=b: _compare(t_aa(a, t_aa(b, v)), t_aa(b, t_aa(a, v))),
        ))
        checks.append(Check(
            f"hecke.coprime_product:{a},{b}",
            lambda a=a, b=b: _compare(ctx.ta(a, ctx.ta(b, v)), ctx.ta(a * b, v)),
        ))
        checks.append(Check(
            f"hecke.ta_commute:{a},{b}",
            lambda a=a, b=b: _compare(ctx.ta(a, ctx.ta(b, v)), ctx.ta(b, ctx.ta(a, v))),
        ))
    for b in ctx.coprime_primes[1:] + ctx.level_primes:
        checks.append(Check(
            f"hecke.taa_ta_commute:{p1},{b}",
            lambda b=b: _compare(t_aa(p1, ctx.ta(b, v)), ctx.ta(b, t_aa(p1, v))),
        ))
    for q in ctx.level_primes:
        checks.append(Check(
            f"hecke.coprime_product:{p1},{q}",
            lambda q=q: _compare(ctx.ta(p1, ctx.ta(q, v)), ctx.ta(p1 * q, v)),
        ))
        for k in range(2, ctx.max_power + 1):
            checks.append(Check(f"hecke.level_prime_power:{q}^{k}", lambda q=q, k=k: _level_power(ctx, q, k, v)))
    for p in ctx.coprime_primes:
        for k in range(1, ctx.max_power + 1):
            checks.append(Check(f"hecke.prime_power_recurrence:{p}^{k}", lambda p=p, k=k: _recurrence(ctx, p, k, v)))
    return checks


def _level_power(ctx: RelationContext, q: Ideal, k: int, v: FormalSum) -> CheckOutcome:
    """T_{q^k} = T_q^k for q dividing the level"""
    rhs = v
    for _ in range(k):
        rhs = ctx.ta(q, rhs)
    return _compare(ctx.ta(q ** k, v), rhs)


def _recurrence(ctx: RelationContext, p: Ideal, k: int, v: FormalSum) -> CheckOutcome:
    """T_{p^k} T_p = T_{p^(k+1)} + N(p) T_{p^(k-1)} T_{p,p}"""
    lhs = ctx.ta(p ** k, ctx.ta(p, v))
    lower = ctx.ta(p ** (k - 1), t_aa(p, v)) if k > 1 else t_aa(p, v)
    rhs = ctx.ta(p ** (k + 1), v) + lower * p.norm
    return _compare(lhs, rhs)


# Atkin-Lehner relations

def atkin_lehner_checks(ctx: RelationContext) -> List[Check]:
    """W_q^2 = T_{q,q}, the product rule and commutation with T_a"""
    n, v = ctx.level, ctx.v0()
    qs = [q for q in exact_divisors(n) if not q.is_one()]
    checks = []
    for q in qs:
        checks.append(Check(f"al.square:{q}", lambda q=q: _compare(w_q(q, w_q(q, v)), t_aa(q, v))))
        for a in ctx.coprime_primes:
            checks.append(Check(
                f"al.ta_commute:{a},{q}",
                lambda q=q, a=a: _compare(t_a(a, w_q(q, v)), w_q(q, t_a(a, v))),
            ))
    for i, q1 in enumerate(qs):
        for q2 in qs[i + 1 :]:
            checks.append(Check(f"al.product:{q1},{q2}", lambda q1=q1, q2=q2: _al_product(q1, q2, v)))
    return checks


def _al_product(q1: Ideal, q2: Ideal, v: FormalSum) -> CheckOutcome:
    """W_q1 W_q2 = T_{q,q} W_q3 with q = q1 + q2 and q3 = q1 q2 q^-2"""
    q = q1 + q2
    q3 = (q1 * q2).divide(q * q, integral=True)
    return _compare(w_q(q1, w_q(q2, v)), t_aa(q, w_q(q3, v)))


# level change

def _level_pairs(n: Ideal) -> List[Tuple[Ideal, Ideal]]:
    """(m, d) with m | n, d | n/m, m != n"""
    out = []
    for m in divisors(n):
        if m == n:
            continue
        for d in divisors(n.divide(m, integral=True)):
            out.append((m, d))
    return out


def level_change_checks(ctx: RelationContext, limit: int = 6) -> List[Check]:
    """A_d against T_p, T_{q,q}, T_a and both Atkin-Lehner cases"""
    n, v = ctx.level, ctx.v0()
    checks = []
    p1 = ctx.p1
    for m, d in _level_pairs(n)[:limit]:
        checks.append(Check(
            f"ad.tp:{m},{d},{p1}",
            lambda m=m, d=d: _compare(a_d(m, d, t_a(p1, v)), t_a(p1, a_d(m, d, v))),
        ))
        checks.append(Check(
            f"ad.taa:{m},{d},{p1}",
            lambda m=m, d=d: _compare(a_d(m, d, t_aa(p1, v)), t_aa(p1, a_d(m, d, v))),
        ))
        for a, b in ctx.pairs():
            checks.append(Check(
                f"ad.ta:{m},{d},{a * b}",
                lambda m=m, d=d, ab=a * b: _compare(a_d(m, d, t_a(ab, v)), t_a(ab, a_d(m, d, v))),
            ))
    checks.extend(_ad_wq_checks(n, v))
    return checks


def _ad_wq_checks(n: Ideal, v: FormalSum) -> List[Check]:
    """n = p^(a+b) m with d = p^a, d' = p^b and q || m"""
    checks = []
    for P, e in factor(n):
        for k in range(1, e + 1):
            m = n.divide(P ** k, integral=True)
            for alpha in range(k + 1):
                d, dp = P ** alpha, P ** (k - alpha)
                for q in exact_divisors(m):
                    if not P.divides(q):
                        checks.append(Check(
                            f"ad.wq_coprime:{m},{d},{q}",
                            lambda m=m, d=d, q=q: _compare(a_d(m, d, w_q(q, v)), w_q(q, a_d(m, d, v))),
                        ))
                        continue
                    qp = d * dp * q
                    checks.append(Check(
                        f"ad.wq_complement:{m},{d},{q}",
                        lambda m=m, d=d, dp=dp, q=q, qp=qp: _compare(
                            a_d(m, d, w_q(qp, v)), w_q(q, t_aa(dp, a_d(m, dp, v)))
                        ),
                    ))
    return checks


# dual operators

def dual_checks(ctx: RelationContext) -> List[Check]:
    """Dual T_a = T_{a,a}^-1 T_a, dual W_q = T_{q,q}^-1 W_q, (dual W_q)^2 = T_{q^-1,q^-1}"""
    n, v = ctx.level, ctx.v0()
    checks = []
    for a in ctx.coprime_primes:
        checks.append(Check(
            f"dual.ta:{a}",
            lambda a=a: _compare(t_a_dual(a, v), t_aa(a.inverse(), t_a(a, v))),
        ))
    for q in exact_divisors(n):
        if q.is_one():
            continue
        checks.append(Check(
            f"dual.wq:{q}",
            lambda q=q: _compare(w_q_dual(q, v), t_aa(q.inverse(), w_q(q, v))),
        ))
        checks.append(Check(
            f"dual.wq_square:{q}",
            lambda q=q: _compare(w_q_dual(q, w_q_dual(q, v)), t_aa(q.inverse(), v)),
        ))
    return checks


# grading

def _grading_outcome(T: OperatorDescriptor, points: Sequence[ModularPoint], cg: ClassGroup) -> CheckOutcome:
    shift = class_shift(T, cg)
    for P in points:
        target = shift * P.point_class(cg)
        image = evaluate(T, FormalSum.point(P))
        for Q, _ in image:
            if Q.point_class(cg) != target:
                return False, f"{T} maps {P} into class {Q.point_class(cg)}, expected {target}"
    return True, ""


def grading_checks(ctx: RelationContext) -> List[Check]:
    """Images of class-c points lie in class class_shift(T) * c"""
    n, p1 = ctx.level, ctx.p1
    ops = [
        OperatorDescriptor.Ta(p1),
        OperatorDescriptor.Taa(p1),
        OperatorDescriptor.dual(OperatorDescriptor.Ta(p1)),
        OperatorDescriptor.dual(OperatorDescriptor.Taa(p1)),
    ]
    for q in exact_divisors(n):
        if not q.is_one():
            ops += [OperatorDescriptor.Wq(q), OperatorDescriptor.dual(OperatorDescriptor.Wq(q))]
    ops += [OperatorDescriptor.Ad(m, d) for m, d in _level_pairs(n)[:3]]
    return [Check(f"grading:{T}", lambda T=T: _grading_outcome(T, ctx.points0, ctx.cg)) for T in ops]


# diamond operators

def _diamond_element(n: Ideal) -> FieldElement:
    """Smallest integral element coprime to n and not 1 mod n"""
    for e in n.field.integral_elements_up_to(4 * n.norm + 4):
        if Ideal.principal(e).is_coprime_to(n) and not n.contains(e - n.field.one):
            return e
    return n.field.one


def diamond_checks(ctx: RelationContext) -> List[Check]:
    """<alpha> commutes with T_a and T_{a,a} on Gamma_1 sums"""
    if not ctx.points1:
        return []
    v = ctx.v1()
    alpha = _diamond_element(ctx.level)
    checks = []
    for a in ctx.coprime_primes:
        checks.append(Check(
            f"diamond.ta:{alpha},{a}",
            lambda a=a: _compare(diamond_op(alpha, t_a(a, v)), t_a(a, diamond_op(alpha, v))),
        ))
        checks.append(Check(
            f"diamond.taa:{alpha},{a}",
            lambda a=a: _compare(diamond_op(alpha, t_aa(a, v)), t_aa(a, diamond_op(alpha, v))),
        ))
    return checks


# matrix realizations

def _half_class(cg: ClassGroup, c: IdealClass) -> Optional[IdealClass]:
    for s in cg.elements():
        if s ** 2 == c:
            return s
    return None


def _index_data(S: HeckeMatrixSet) -> Tuple[Ideal, Ideal]:
    """(a, b) of a set realizing dual T_{a,a} dual T_b"""
    parts = S.descriptor.parts if S.descriptor.kind is OperatorKind.COMPOSITE else (S.descriptor,)
    a = next((p.ideal for p in parts if p.kind is OperatorKind.TAA_DUAL), Ideal.unit(S.field))
    b = next(p.ideal for p in parts if p.kind is OperatorKind.TA_DUAL)
    return a, b


def principal_matrix_sets(ctx: RelationContext) -> List[HeckeMatrixSet]:
    """Every explicit constructor that applies to the context's primes"""
    n, cg = ctx.level, ctx.cg
    sets: List[HeckeMatrixSet] = []

    def scaling(total: IdealClass) -> Optional[Ideal]:
        half = _half_class(cg, total.inverse())
        return None if half is None else cg.ideal_in_class_coprime_to(half, n)

    for p in ctx.coprime_primes:
        c = cg.class_of(p)
        g = principal_generator(p)
        if g is not None:
            sets.append(principal_prime(g, n))
        else:
            a = scaling(c)
            if a is not None:
                sets.append(square_class_prime(a, p, n))
        sets.append(taa_tp2(cg.ideal_in_class_coprime_to(c.inverse(), n), p, n))
        g2 = principal_generator(p * p)
        if g2 is not None:
            sets.append(principal_prime_square(g2, p, n))
    for p, q in ctx.pairs():
        g = principal_generator(p * q)
        if g is not None:
            sets.append(principal_pq(g, p, q, n))
        a = scaling(cg.class_of(p * q))
        if a is not None:
            sets.append(taa_tpq(a, p, q, n))
    return sets


def _matrix_set_outcome(S: HeckeMatrixSet) -> CheckOutcome:
    report = verify_sublattice_action(S, VerificationRunner(workers=1))
    if not report.passed:
        return False, f"failed {report.failures()}"
    a, b = _index_data(S)
    if sublattice_set(S) != sublattice_set(hecke_matrices_index_b(a, b, S.level)):
        return False, "sublattices differ from the general construction"
    return _compare(apply_matrix_set(S), evaluate(S.descriptor, FormalSum.point(principal_point(S.level))))


def _wq_outcome(q: Ideal, n: Ideal) -> CheckOutcome:
    M = wq_matrix(q, n)
    if not is_wq_matrix(M, q, n):
        return False, f"{M} is not a W_q-matrix"
    P = principal_point(n)
    unit = Ideal.unit(n.field)
    expected = ModularPoint0(PseudoLattice.split(q, unit), PseudoLattice.split(unit, n.divide(q, integral=True).inverse()), n)
    if P.times(M) != expected:
        return False, f"(O+O, O+n^-1) M = {P.times(M)}"
    if P.times(M).times(M) != P.scale(q):
        return False, "M^2 does not scale the principal point by q"
    return True, ""


def _wqm_group_outcome(n: Ideal) -> CheckOutcome:
    entries = wqm_group(n)
    for e in entries:
        if not is_wqm_matrix(e.matrix, e.q, e.m, n):
            return False, f"{e.matrix} is not a W_q^m-matrix for {e.q}, {e.m}"
    for e1 in entries:
        for e2 in entries:
            q3, m3 = wqm_product_class(e1.q, e1.m, e2.q, e2.m)
            if not is_wqm_matrix(e1.matrix * e2.matrix, q3, m3, n):
                return False, f"product of {e1.label()} and {e2.label()} is not a W_q^m-matrix"
    return True, ""


def _tp_wq_outcome(p: Ideal, q: Ideal, n: Ideal) -> CheckOutcome:
    S = tp_wq_matrices(p, q, n)
    report = verify_sublattice_action(S, VerificationRunner(workers=1))
    if not report.passed:
        return False, f"failed {report.failures()}"
    return _compare(apply_matrix_set(S), evaluate(S.descriptor, FormalSum.point(principal_point(n))))


def matrix_checks(ctx: RelationContext) -> List[Check]:
    """Matrix constructors against sublattice enumeration and the dual operators"""
    n = ctx.level
    checks = [Check(f"matrices:{S.descriptor}", lambda S=S: _matrix_set_outcome(S)) for S in principal_matrix_sets(ctx)]
    for q in exact_divisors(n):
        if q.is_one():
            continue
        if is_principal(q):
            checks.append(Check(f"matrices.wq:{q}", lambda q=q: _wq_outcome(q, n)))
        for p in ctx.coprime_primes:
            if is_principal(p * q):
                checks.append(Check(f"matrices.tp_wq:{p},{q}", lambda p=p, q=q: _tp_wq_outcome(p, q, n)))
    checks.append(Check("matrices.wqm_group", lambda: _wqm_group_outcome(n)))
    return checks


SUITES: Dict[str, Callable[[RelationContext], List[Check]]] = {
    "hecke": hecke_relation_checks,
    "atkin_lehner": atkin_lehner_checks,
    "level_change": level_change_checks,
    "duals": dual_checks,
    "grading": grading_checks,
    "diamond": diamond_checks,
    "matrices": matrix_checks,
}


def suite_names(selector: str = "all") -> List[str]:
    if selector == "all":
        return list(SUITES)
    names = [s.strip() for s in selector.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise PreconditionError(f"Unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    return names


def run_suites(ctx: RelationContext, selector: str = "all", runner: Optional[VerificationRunner] = None) -> List[CheckResult]:
    """Run the selected suites in order and return one result per check"""
    runner = runner or VerificationRunner()
    checks: List[Check] = []
    for name in suite_names(selector):
        checks.extend(SUITES[name](ctx))
    logger.info(f"Running {len(checks)} relation checks at level {ctx.level} over {ctx.field}")
    return runner.run(checks)
