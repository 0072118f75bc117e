#!/usr/bin/env python3
"""Tests for cyclotomic values, formal square roots and class group characters"""

import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.classgroup import class_group
from formal_hecke.cyclotomic import (
    AdjoinedValue,
    CycValue,
    UnramifiedCharacter,
    all_characters,
    quadratic_characters,
    simplify,
)
from formal_hecke.errors import FieldArithmeticError, PreconditionError


class TestCycValue:
    """Arithmetic in Q(zeta_m)"""

    def test_roots_of_unity(self):
        """zeta_4^2 = -1, zeta_6^6 = 1, zeta_3 + zeta_3^2 = -1"""
        assert CycValue.zeta(4) ** 2 == -1
        assert CycValue.zeta(6) ** 6 == 1
        assert CycValue.zeta(3) + CycValue.zeta(3, 2) == -1
        assert CycValue.zeta(2) == -1

    def test_mixed_conductors(self):
        """zeta_4 * zeta_3 = zeta_12^7"""
        assert CycValue.zeta(4) * CycValue.zeta(3) == CycValue.zeta(12, 7)
        assert CycValue.zeta(4).lift(8) == CycValue.zeta(8, 2)

    def test_inverse(self):
        """x * x^-1 = 1"""
        x = CycValue.zeta(5) + 1
        assert x * x.inverse() == 1
        assert (x / x) == 1
        assert CycValue.zeta(5) ** -1 == CycValue.zeta(5, 4)

    def test_division_by_zero(self):
        """Zero has no inverse"""
        with pytest.raises(FieldArithmeticError):
            CycValue.rational(0, 4).inverse()

    def test_rational_values(self):
        """Rational values round-trip through fractions"""
        x = CycValue.rational(Fraction(3, 4), 6)
        assert x.is_rational()
        assert x.to_fraction() == Fraction(3, 4)
        with pytest.raises(PreconditionError):
            CycValue.zeta(3).to_fraction()

    def test_lift_needs_divisibility(self):
        """Q(zeta_3) is not inside Q(zeta_4)"""
        with pytest.raises(PreconditionError):
            CycValue.zeta(3).lift(4)


class TestAdjoinedValue:
    """Formal square roots"""

    def test_square_of_root(self):
        """sqrt(2)^2 = 2"""
        r = AdjoinedValue.sqrt(CycValue.rational(2))
        assert r * r == 2
        assert simplify(r * r) == CycValue.rational(2)

    def test_roots_do_not_collapse(self):
        """sqrt(2) + sqrt(2) - 2 sqrt(2) = 0 but sqrt(2) stays formal"""
        r = AdjoinedValue.sqrt(CycValue.rational(2))
        assert (r + r - r * 2).is_zero()
        assert isinstance(simplify(r), AdjoinedValue)

    def test_independent_radicands(self):
        """sqrt(2) sqrt(3) squared is 6"""
        a = AdjoinedValue.sqrt(CycValue.rational(2))
        b = AdjoinedValue.sqrt(CycValue.rational(3))
        assert (a * b) ** 2 == 6

    def test_division_by_root(self):
        """Only root-free divisors are supported"""
        a = AdjoinedValue.sqrt(CycValue.rational(2))
        assert a / 2 * 2 == a
        with pytest.raises(PreconditionError):
            AdjoinedValue.of(1) / a


class TestUnramifiedCharacter:
    """Characters of the class group"""

    def test_character_values(self):
        """A generator of Cl(Q(sqrt(-14))) maps to a primitive fourth root"""
        cg = class_group(FieldFixtures.field(14))
        chi = UnramifiedCharacter(tuple(cg.cyclic_structure), (1,))
        assert chi.order() == 4
        values = {str(chi(c)) for c in cg.elements()}
        assert len(values) == 4
        for c in cg.elements():
            assert chi(c) ** 4 == 1

    def test_group_operations(self):
        """chi * chi^-1 is trivial"""
        chi = UnramifiedCharacter((4,), (1,))
        assert (chi * chi.inverse()).is_trivial()
        assert (chi ** 2).is_quadratic()
        assert not chi.is_quadratic()

    def test_enumeration(self):
        """All characters, trivial first, and the quadratic ones"""
        chars = all_characters((2, 2))
        assert len(chars) == 4
        assert chars[0].is_trivial()
        assert len(quadratic_characters((4,))) == 2
        assert len(quadratic_characters((2, 2))) == 4

    def test_conductor_must_carry_values(self):
        """A character of order 4 needs fourth roots of unity"""
        with pytest.raises(PreconditionError):
            UnramifiedCharacter((4,), (1,), conductor=6)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
