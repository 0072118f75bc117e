#!/usr/bin/env python3
"""
Literal parsers
Textual forms of field elements, ideals, matrices, pseudo-lattices,
modular points and operator descriptors; str() of each object prints its literal
"""

import logging
import re
from fractions import Fraction
from typing import List, Union

from ..classgroup import class_group
from ..errors import FormalHeckeError, ParseError
from ..heckeops import OperatorDescriptor, OperatorKind
from ..ideals import FractionalIdeal, Ideal
from ..linmod import PseudoLattice
from ..mat2 import Mat2
from ..modpts import ModularPoint, ModularPoint0, ModularPoint1, standard_point0, standard_point1
from ..qfield import FieldDesc, FieldElement, format_element

logger = logging.getLogger(__name__)

IdealLike = Union[Ideal, FractionalIdeal]

_RATIONAL = r"\d+(?:/\d+)?"
_TERM = re.compile(rf"([+-]?)(?:(?:({_RATIONAL})\*)?w|({_RATIONAL}))")
_HNF = re.compile(r"\[(-?\d+),(-?\d+),(-?\d+)\](?:/(\d+))?")
_NAMED = re.compile(r"(\w+)\((.*)\)")
_OPENERS = {"(": ")", "[": "]", "{": "}"}


def _compact(text: str) -> str:
    return re.sub(r"\s+", "", text)


def split_top(text: str, sep: str = ",") -> List[str]:
    """Split on separators outside brackets"""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in _OPENERS:
            depth += 1
        elif ch in _OPENERS.values():
            depth -= 1
            if depth < 0:
                raise ParseError(f"Unbalanced brackets in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth:
        raise ParseError(f"Unbalanced brackets in {text!r}")
    parts.append(text[start:])
    return parts


def _unwrap(text: str, opener: str) -> str:
    closer = _OPENERS[opener]
    if not (text.startswith(opener) and text.endswith(closer)):
        raise ParseError(f"Expected {opener}...{closer}, got {text!r}")
    return text[1:-1]


# elements

def parse_element(text: str, field: FieldDesc) -> FieldElement:
    """x+y*w with rationals p/q; whitespace is ignored"""
    s = _compact(text)
    if not s:
        raise ParseError("Empty element literal")
    x, y = Fraction(0), Fraction(0)
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (pos > 0 and not m.group(1)):
            raise ParseError(f"Malformed element literal {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(3) is not None:
            x += sign * Fraction(m.group(3))
        else:
            y += sign * Fraction(m.group(2) or 1)
        pos = m.end()
    return field.element(x, y)


# ideals

def parse_fractional_ideal(text: str, field: FieldDesc) -> IdealLike:
    """[a,b,c], [a,b,c]/d or (g1, g2, ...); integral results come back as Ideal"""
    s = _compact(text)
    m = _HNF.fullmatch(s)
    try:
        if m:
            num = Ideal(field, int(m.group(1)), int(m.group(2)), int(m.group(3)))
            den = int(m.group(4) or 1)
            if den == 0:
                raise ParseError(f"Zero denominator in {text!r}")
            frac = FractionalIdeal(num, den)
        elif s.startswith("(") and s.endswith(")"):
            gens = [parse_element(g, field) for g in split_top(s[1:-1])]
            frac = FractionalIdeal.from_gens(field, gens)
        else:
            raise ParseError(f"Malformed ideal literal {text!r}")
    except ParseError:
        raise
    except FormalHeckeError as e:
        raise ParseError(f"Invalid ideal literal {text!r}: {e.message}")
    return frac.numerator if frac.is_integral() else frac


def parse_ideal(text: str, field: FieldDesc) -> Ideal:
    """An integral ideal literal"""
    ideal = parse_fractional_ideal(text, field)
    if not isinstance(ideal, Ideal):
        raise ParseError(f"{text!r} is not an integral ideal")
    return ideal


# matrices and lattices

def parse_matrix(text: str, field: FieldDesc) -> Mat2:
    rows = split_top(_unwrap(_compact(text), "["))
    if len(rows) != 2:
        raise ParseError(f"Matrix literal needs two rows: {text!r}")
    entries = []
    for row in rows:
        cells = split_top(_unwrap(row, "["))
        if len(cells) != 2:
            raise ParseError(f"Matrix row needs two entries: {row!r}")
        entries += [parse_element(c, field) for c in cells]
    return Mat2(*entries)


def matrix_rows(M: Mat2) -> List[List[str]]:
    return [[format_element(M.a), format_element(M.b)], [format_element(M.c), format_element(M.d)]]


def parse_lattice(text: str, field: FieldDesc) -> PseudoLattice:
    """{b1, b2, U}"""
    parts = split_top(_unwrap(_compact(text), "{"))
    if len(parts) != 3:
        raise ParseError(f"Pseudo-lattice literal needs {{b1, b2, U}}: {text!r}")
    b1, b2 = (parse_fractional_ideal(p, field) for p in parts[:2])
    try:
        return PseudoLattice(b1, b2, parse_matrix(parts[2], field))
    except FormalHeckeError as e:
        raise ParseError(f"Invalid pseudo-lattice {text!r}: {e.message}")


# modular points

def parse_point(text: str, level: Ideal) -> ModularPoint:
    """std(i,j), std1(i,j) or (L, L') / (L, L', (x, y)) with pseudo-lattice literals"""
    field = level.field
    s = _compact(text)
    named = _NAMED.fullmatch(s)
    if named and named.group(1) in ("std", "std1"):
        try:
            i, j = (int(k) for k in split_top(named.group(2)))
        except ValueError:
            raise ParseError(f"Standard point needs two indices: {text!r}")
        cg = class_group(field, level)
        if not (1 <= i <= cg.h2 and 1 <= j <= cg.h2prime):
            raise ParseError(f"Standard point indices ({i},{j}) out of range ({cg.h2},{cg.h2prime})")
        build = standard_point0 if named.group(1) == "std" else standard_point1
        return build(i, j, level, cg)
    parts = split_top(_unwrap(s, "("))
    if len(parts) not in (2, 3):
        raise ParseError(f"Malformed point literal {text!r}")
    L, Lp = (parse_lattice(p, field) for p in parts[:2])
    try:
        if len(parts) == 2:
            return ModularPoint0(L, Lp, level)
        beta = tuple(parse_element(c, field) for c in split_top(_unwrap(parts[2], "(")))
        if len(beta) != 2:
            raise ParseError(f"Generator needs two coordinates: {parts[2]!r}")
        return ModularPoint1(L, Lp, level, beta)
    except ParseError:
        raise
    except FormalHeckeError as e:
        raise ParseError(f"Invalid point {text!r}: {e.message}")


# operator descriptors

_SIMPLE_KINDS = {k.value: k for k in OperatorKind if k is not OperatorKind.COMPOSITE}


def parse_operator(text: str, field: FieldDesc) -> OperatorDescriptor:
    """Ta(a), Taa(a), Wq(q), Ad(m,d), Diamond(x), Id, dual:..., Comp[op, ...]"""
    s = _compact(text)
    if s == "Id":
        return OperatorDescriptor.Ta(Ideal.unit(field))
    if s.startswith("dual:"):
        return OperatorDescriptor.dual(parse_operator(s[5:], field))
    if s.startswith("Comp[") and s.endswith("]"):
        parts = [parse_operator(p, field) for p in split_top(s[5:-1])]
        if not parts:
            raise ParseError("Empty composite operator")
        return OperatorDescriptor.compose(*parts)
    named = _NAMED.fullmatch(s)
    if not named or named.group(1) not in _SIMPLE_KINDS:
        raise ParseError(f"Unknown operator {text!r}")
    kind, args = _SIMPLE_KINDS[named.group(1)], split_top(named.group(2))
    if kind is OperatorKind.AD:
        if len(args) != 2:
            raise ParseError(f"Ad needs a target level and a divisor: {text!r}")
        return OperatorDescriptor.Ad(parse_ideal(args[0], field), parse_ideal(args[1], field))
    if len(args) != 1:
        raise ParseError(f"{kind.value} takes one argument: {text!r}")
    if kind is OperatorKind.DIAMOND:
        return OperatorDescriptor.Diamond(parse_element(args[0], field))
    if kind in (OperatorKind.TAA, OperatorKind.TAA_DUAL):
        return OperatorDescriptor(kind, ideal=parse_fractional_ideal(args[0], field))
    return OperatorDescriptor(kind, ideal=parse_ideal(args[0], field))
