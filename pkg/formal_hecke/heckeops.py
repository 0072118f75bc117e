#!/usr/bin/env python3
"""
Formal Hecke operators on formal sums of modular points
T_a, T_{a,a}, diamond operators, Atkin-Lehner W_q, level-changing A_d,
the dual operators and the class grading of the Hecke algebra
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from .cache_manager import cache_result, lattice_cache
from .classgroup import ClassGroup, IdealClass
from .errors import NotCoprimeError, PreconditionError
from .ideals import (
    FractionalIdeal,
    Ideal,
    as_fractional,
    crt_split,
    is_exact_divisor,
    prime_divisors,
    valuation,
)
from .linmod import scale_vector, sublattices_of_index, superlattices_of_index
from .modpts import FormalSum, ModularPoint, ModularPoint0, ModularPoint1, diamond, validate0
from .qfield import FieldElement

logger = logging.getLogger(__name__)

IdealLike = Union[Ideal, FractionalIdeal]


class OperatorKind(str, Enum):
    TA = "Ta"
    TAA = "Taa"
    DIAMOND = "Diamond"
    WQ = "Wq"
    AD = "Ad"
    TA_DUAL = "TaDual"
    TAA_DUAL = "TaaDual"
    WQ_DUAL = "WqDual"
    COMPOSITE = "Composite"


_DUAL_OF = {
    OperatorKind.TA: OperatorKind.TA_DUAL,
    OperatorKind.TAA: OperatorKind.TAA_DUAL,
    OperatorKind.WQ: OperatorKind.WQ_DUAL,
}


@dataclass(frozen=True)
class OperatorDescriptor:
    """A formal Hecke operator, or a product of operators applied right to left"""

    kind: OperatorKind
    ideal: Optional[IdealLike] = None
    target: Optional[Ideal] = None
    element: Optional[FieldElement] = None
    parts: Tuple["OperatorDescriptor", ...] = ()

    # constructors

    @classmethod
    def Ta(cls, a: Ideal) -> "OperatorDescriptor":
        return cls(OperatorKind.TA, ideal=a)

    @classmethod
    def Taa(cls, a: IdealLike) -> "OperatorDescriptor":
        return cls(OperatorKind.TAA, ideal=a)

    @classmethod
    def Diamond(cls, alpha: FieldElement) -> "OperatorDescriptor":
        return cls(OperatorKind.DIAMOND, element=alpha)

    @classmethod
    def Wq(cls, q: Ideal) -> "OperatorDescriptor":
        return cls(OperatorKind.WQ, ideal=q)

    @classmethod
    def Ad(cls, m: Ideal, d: Ideal) -> "OperatorDescriptor":
        return cls(OperatorKind.AD, ideal=d, target=m)

    @classmethod
    def dual(cls, op: "OperatorDescriptor") -> "OperatorDescriptor":
        if op.kind not in _DUAL_OF:
            raise PreconditionError(f"No dual operator for {op.kind.value}")
        return cls(_DUAL_OF[op.kind], ideal=op.ideal)

    @classmethod
    def compose(cls, *parts: "OperatorDescriptor") -> "OperatorDescriptor":
        flat: List[OperatorDescriptor] = []
        for p in parts:
            flat.extend(p.parts if p.kind is OperatorKind.COMPOSITE else (p,))
        return cls(OperatorKind.COMPOSITE, parts=tuple(flat))

    def __mul__(self, other: "OperatorDescriptor") -> "OperatorDescriptor":
        return OperatorDescriptor.compose(self, other)

    def check(self, level: Ideal, gamma1: bool = False) -> None:
        """Raise when the operator is not defined on sums of this level"""
        kind = self.kind
        if kind is OperatorKind.COMPOSITE:
            current = level
            for part in reversed(self.parts):
                part.check(current, gamma1)
                current = part.output_level(current)
            return
        if kind in (OperatorKind.TA, OperatorKind.TA_DUAL) and not as_fractional(self.ideal).is_integral():
            raise PreconditionError(f"{kind.value} needs an integral ideal, got {self.ideal}")
        if kind in (OperatorKind.TA_DUAL, OperatorKind.TAA_DUAL) or (kind is OperatorKind.TAA and gamma1):
            if not is_coprime_to_level(self.ideal, level):
                raise NotCoprimeError(f"{kind.value}({self.ideal}) needs an ideal coprime to {level}")
        if kind in (OperatorKind.WQ, OperatorKind.WQ_DUAL):
            if gamma1:
                raise PreconditionError("Atkin-Lehner operators act on Gamma_0 points only")
            if not is_exact_divisor(self.ideal, level):
                raise PreconditionError(f"{self.ideal} is not an exact divisor of {level}")
        if kind is OperatorKind.AD:
            if gamma1:
                raise PreconditionError("Level-changing operators act on Gamma_0 points only")
            m = self.target
            if not m.divides(level):
                raise PreconditionError(f"Target level {m} does not divide {level}")
            if not self.ideal.divides(level.divide(m, integral=True)):
                raise PreconditionError(f"{self.ideal} does not divide {level}/{m}")
        if kind is OperatorKind.DIAMOND:
            alpha = self.element
            if alpha.is_zero() or not is_coprime_to_level(as_fractional(alpha), level):
                raise NotCoprimeError(f"{alpha} is not coprime to {level}")

    def output_level(self, level: Ideal) -> Ideal:
        if self.kind is OperatorKind.AD:
            return self.target
        if self.kind is OperatorKind.COMPOSITE:
            for part in reversed(self.parts):
                level = part.output_level(level)
        return level

    def __str__(self) -> str:
        kind = self.kind
        if kind is OperatorKind.COMPOSITE:
            return "Comp[" + ",".join(str(p) for p in self.parts) + "]"
        if kind is OperatorKind.DIAMOND:
            return f"Diamond({self.element})"
        if kind is OperatorKind.AD:
            return f"Ad({self.target},{self.ideal})"
        for base, dual in _DUAL_OF.items():
            if kind is dual:
                return f"dual:{base.value}({self.ideal})"
        return f"{kind.value}({self.ideal})"


# helpers

def ideal_norm(a) -> Fraction:
    """Norm of an integral or fractional ideal as a positive rational"""
    f = as_fractional(a)
    return f.norm()


def is_coprime_to_level(a, level: Ideal) -> bool:
    """True when the fractional ideal a has valuation 0 at every prime dividing the level"""
    f = as_fractional(a)
    den = Ideal.principal(f.denominator, f.field)
    for p in prime_divisors(level):
        if valuation(f.numerator, p) != valuation(den, p):
            return False
    return True


def _scale(coeff: Fraction, scaled: bool) -> Fraction:
    return coeff if scaled else Fraction(1)


def _integral_part_of_inverse(a: IdealLike) -> Ideal:
    """O intersected with a^-1"""
    f = as_fractional(a)
    return f.inverse().intersect(FractionalIdeal.unit(f.field)).as_integral()


def _one_mod_level(A: Ideal, level: Ideal) -> FieldElement:
    """u in A with u = 1 mod level"""
    if level.is_one():
        return level.field.one
    u, _ = crt_split(A, level)
    return u


def _pointwise(v: FormalSum, f: Callable[[ModularPoint], List[Tuple[ModularPoint, Fraction]]], level: Optional[Ideal] = None) -> FormalSum:
    return v.map_points(f, level)


# T_a and T_{a,a}

def _point_image_key(P: ModularPoint, a: Ideal, scaled: bool) -> Tuple:
    n = P.level
    return (type(P).__name__, n.field.d, (n.a, n.b, n.c), P.key(), (a.a, a.b, a.c), scaled)


@cache_result(manager=lattice_cache, key_func=_point_image_key)
def _t_a_image(P: ModularPoint, a: Ideal, scaled: bool) -> Tuple[Tuple[ModularPoint, Fraction], ...]:
    coeff = _scale(1 / ideal_norm(a), scaled)
    n = P.level
    out = []
    for M in superlattices_of_index(P.L, a):
        Mp = M + P.Lp
        if not validate0(ModularPoint0(M, Mp, n)):
            continue
        if isinstance(P, ModularPoint1):
            out.append((ModularPoint1(M, Mp, n, P.beta), coeff))
        else:
            out.append((ModularPoint0(M, Mp, n), coeff))
    return tuple(out)


def t_a(a: Ideal, v: FormalSum, scaled: bool = True) -> FormalSum:
    """Sum over superlattices M of index a with (M, M + L') a modular point"""
    if a.is_one():
        return v
    result = _pointwise(v, lambda P: _t_a_image(P, a, scaled))
    logger.debug(f"T_{a} on {len(v)} points gave {len(result)} terms")
    return result


def t_aa(a: IdealLike, v: FormalSum, scaled: bool = True) -> FormalSum:
    """(L, L') -> N(a)^-2 (a^-1 L, a^-1 L')"""
    fa = as_fractional(a)
    if fa.is_one():
        return v
    n = v.level
    inv = fa.inverse()
    coeff = _scale(1 / ideal_norm(fa) ** 2, scaled)
    u = None

    def image(P: ModularPoint):
        nonlocal u
        if isinstance(P, ModularPoint1):
            if u is None:
                if not is_coprime_to_level(fa, n):
                    raise NotCoprimeError(f"T_{{a,a}} on Gamma_1 points needs {fa} coprime to {n}")
                u = _one_mod_level(_integral_part_of_inverse(fa), n)
            beta = scale_vector(u, P.beta)
            return [(ModularPoint1(P.L.scale(inv), P.Lp.scale(inv), n, beta), coeff)]
        return [(ModularPoint0(P.L.scale(inv), P.Lp.scale(inv), n), coeff)]

    return _pointwise(v, image)


def diamond_op(alpha: FieldElement, v: FormalSum) -> FormalSum:
    """<alpha> on Gamma_1 points; trivial on Gamma_0 points"""

    def image(P: ModularPoint):
        if isinstance(P, ModularPoint1):
            return [(diamond(alpha, P), Fraction(1))]
        return [(P, Fraction(1))]

    return _pointwise(v, image)


# Atkin-Lehner and level change

def _require_gamma0(v: FormalSum, name: str) -> None:
    if any(isinstance(P, ModularPoint1) for P in v.points()):
        raise PreconditionError(f"{name} acts on Gamma_0 points only")


def w_q(q: Ideal, v: FormalSum, scaled: bool = True) -> FormalSum:
    """(L, L') -> N(q)^-1 (L + q'L', q^-1 L + L') with n = q q'"""
    n = v.level
    if not is_exact_divisor(q, n):
        raise PreconditionError(f"{q} is not an exact divisor of {n}")
    _require_gamma0(v, "W_q")
    if q.is_one():
        return v
    qp = n.divide(q, integral=True)
    qinv = q.inverse()
    coeff = _scale(1 / ideal_norm(q), scaled)

    def image(P: ModularPoint0):
        L1 = P.L + P.Lp.scale(qp)
        L1p = P.L.scale(qinv) + P.Lp
        return [(ModularPoint0(L1, L1p, n), coeff)]

    return _pointwise(v, image)


def a_d(m: Ideal, d: Ideal, v: FormalSum, scaled: bool = True) -> FormalSum:
    """(L, L') -> N(d) (L cap dL', (L cap dL') + m^-1 n L') at level m"""
    n = v.level
    if not m.divides(n):
        raise PreconditionError(f"Target level {m} does not divide {n}")
    quotient = n.divide(m, integral=True)
    if not d.divides(quotient):
        raise PreconditionError(f"{d} does not divide {quotient}")
    _require_gamma0(v, "A_d")
    coeff = _scale(ideal_norm(d), scaled)

    def image(P: ModularPoint0):
        Ltilde = P.L.intersect(P.Lp.scale(d))
        Ltp = Ltilde + P.Lp.scale(quotient)
        return [(ModularPoint0(Ltilde, Ltp, m), coeff)]

    return _pointwise(v, image, level=m)


# dual operators

def t_a_dual(a: Ideal, v: FormalSum, scaled: bool = True) -> FormalSum:
    """Sum over sublattices M of index a with (M, M + aL') a modular point"""
    n = v.level
    if not a.is_coprime_to(n):
        raise NotCoprimeError(f"Dual T_a needs {a} coprime to {n}")
    if a.is_one():
        return v
    coeff = _scale(ideal_norm(a), scaled)
    u = _one_mod_level(a, n)

    def image(P: ModularPoint):
        out = []
        aLp = P.Lp.scale(a)
        for M in sublattices_of_index(P.L, a):
            Mp = M + aLp
            if not validate0(ModularPoint0(M, Mp, n)):
                continue
            if isinstance(P, ModularPoint1):
                out.append((ModularPoint1(M, Mp, n, scale_vector(u, P.beta)), coeff))
            else:
                out.append((ModularPoint0(M, Mp, n), coeff))
        return out

    return _pointwise(v, image)


def t_aa_dual(a: IdealLike, v: FormalSum, scaled: bool = True) -> FormalSum:
    """T_{a^-1, a^-1}"""
    if not is_coprime_to_level(a, v.level):
        raise NotCoprimeError(f"Dual T_{{a,a}} needs {a} coprime to {v.level}")
    return t_aa(as_fractional(a).inverse(), v, scaled)


def w_q_dual(q: Ideal, v: FormalSum, scaled: bool = True) -> FormalSum:
    """(L, L') -> N(q) (qL + nL', L + qL')"""
    n = v.level
    if not is_exact_divisor(q, n):
        raise PreconditionError(f"{q} is not an exact divisor of {n}")
    _require_gamma0(v, "dual W_q")
    if q.is_one():
        return v
    coeff = _scale(ideal_norm(q), scaled)

    def image(P: ModularPoint0):
        L1 = P.L.scale(q) + P.Lp.scale(n)
        L1p = P.L + P.Lp.scale(q)
        return [(ModularPoint0(L1, L1p, n), coeff)]

    return _pointwise(v, image)


# evaluation and grading

def evaluate(T: OperatorDescriptor, v: FormalSum, scaled: bool = True) -> FormalSum:
    """Apply a descriptor; composites act right to left"""
    kind = T.kind
    if kind is OperatorKind.COMPOSITE:
        for part in reversed(T.parts):
            v = evaluate(part, v, scaled)
        return v
    if kind is OperatorKind.TA:
        return t_a(T.ideal, v, scaled)
    if kind is OperatorKind.TAA:
        return t_aa(T.ideal, v, scaled)
    if kind is OperatorKind.DIAMOND:
        return diamond_op(T.element, v)
    if kind is OperatorKind.WQ:
        return w_q(T.ideal, v, scaled)
    if kind is OperatorKind.AD:
        return a_d(T.target, T.ideal, v, scaled)
    if kind is OperatorKind.TA_DUAL:
        return t_a_dual(T.ideal, v, scaled)
    if kind is OperatorKind.TAA_DUAL:
        return t_aa_dual(T.ideal, v, scaled)
    if kind is OperatorKind.WQ_DUAL:
        return w_q_dual(T.ideal, v, scaled)
    raise PreconditionError(f"Unknown operator kind {kind}")


_CLASS_POWER: Dict[OperatorKind, int] = {
    OperatorKind.TA: 1,
    OperatorKind.TAA: 2,
    OperatorKind.WQ: 1,
    OperatorKind.TA_DUAL: -1,
    OperatorKind.TAA_DUAL: -2,
    OperatorKind.WQ_DUAL: -1,
    OperatorKind.AD: -1,
}


def operator_class(T: OperatorDescriptor, cg: ClassGroup) -> IdealClass:
    """[T_a] = [a], [T_{a,a}] = [a]^2, [W_q] = [q], duals and A_d inverted"""
    if T.kind is OperatorKind.COMPOSITE:
        result = cg.identity
        for part in T.parts:
            result = result * operator_class(part, cg)
        return result
    if T.kind is OperatorKind.DIAMOND:
        return cg.identity
    k = _CLASS_POWER[T.kind]
    c = cg.class_of(T.ideal)
    return c ** k if k > 0 else c.inverse() ** (-k)


def class_shift(T: OperatorDescriptor, cg: ClassGroup) -> IdealClass:
    """The image of a class-c point lies in class class_shift(T) * c"""
    return operator_class(T, cg).inverse()


def is_principal_operator(T: OperatorDescriptor, cg: ClassGroup) -> bool:
    return operator_class(T, cg).is_trivial()
