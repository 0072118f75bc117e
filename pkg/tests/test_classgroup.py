#!/usr/bin/env python3
"""Tests for class groups and the representative scheme"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.cache_manager import cache_manager
from formal_hecke.classgroup import class_group
from formal_hecke.ideals import ideals_up_to_norm


class TestClassNumbers:
    """Class numbers and group structure"""

    def setup_method(self):
        """Start each test with an empty memo cache"""
        cache_manager.clear()

    @pytest.mark.parametrize("d,h", [(1, 1), (5, 2), (23, 3), (31, 3)])
    def test_class_numbers(self, d, h):
        """Q(i) 1, Q(sqrt(-5)) 2, Q(sqrt(-23)) 3, Q(sqrt(-31)) 3"""
        assert class_group(FieldFixtures.field(d)).h == h

    def test_cyclic_of_order_four(self):
        """Cl(Q(sqrt(-14))) is cyclic of order 4"""
        cg = class_group(FieldFixtures.field(14))
        assert cg.h == 4
        assert cg.cyclic_structure == [4]

    def test_klein_four(self):
        """Cl(Q(sqrt(-21))) is Z/2 x Z/2"""
        cg = class_group(FieldFixtures.field(21))
        assert sorted(cg.cyclic_structure) == [2, 2]
        assert len(cg.two_torsion()) == 4

    def test_class_of_is_a_homomorphism(self):
        """[ab] = [a][b] over Q(sqrt(-23))"""
        K = FieldFixtures.field(23)
        cg = class_group(K)
        ideals = ideals_up_to_norm(K, 12)
        for a in ideals:
            for b in ideals[:6]:
                assert cg.class_of(a * b) == cg.class_of(a) * cg.class_of(b)

    def test_principal_ideals_are_trivial(self):
        """Principal ideals land in the identity class"""
        K = FieldFixtures.field(5)
        cg = class_group(K)
        assert cg.is_principal(FieldFixtures.principal(K, 1, 1))
        assert not cg.is_principal(FieldFixtures.prime_above(K, 2))
        assert cg.class_of(FieldFixtures.prime_above(K, 2)).order() == 2


class TestRepresentatives:
    """Representatives p_i of Cl/Cl^2 and q_j of Cl^2"""

    def test_sqrt_minus_five_counts(self):
        """h = 2 gives two coset representatives and one square representative"""
        cg = class_group(FieldFixtures.field(5))
        assert (cg.h2, cg.h2prime) == (2, 1)

    def test_sqrt_minus_twenty_three_counts(self):
        """Odd class number: every class is a square"""
        cg = class_group(FieldFixtures.field(23))
        assert (cg.h2, cg.h2prime) == (1, 3)

    def test_representatives_avoid_level(self):
        """Representatives are coprime to the level"""
        K = FieldFixtures.field(5)
        n = FieldFixtures.prime_above(K, 2) * FieldFixtures.prime_above(K, 3)
        cg = class_group(K, n)
        assert all(I.is_coprime_to(n) for I in cg.reps_p + cg.reps_q)

    def test_decompose_is_one_based(self):
        """Every class is [p_i][q_j]^2 with 1-based indices"""
        cg = class_group(FieldFixtures.field(14))
        for c in cg.elements():
            i, j = cg.decompose(c)
            assert 1 <= i <= cg.h2 and 1 <= j <= cg.h2prime
            assert cg.class_of(cg.reps_p[i - 1]) * cg.class_of(cg.reps_q[j - 1]) ** 2 == c

    def test_ideal_in_class_coprime_to(self):
        """The chosen ideal has the right class and avoids the level"""
        K = FieldFixtures.field(23)
        cg = class_group(K)
        n = FieldFixtures.principal(K, 2)
        for c in cg.elements():
            I = cg.ideal_in_class_coprime_to(c, n)
            assert cg.class_of(I) == c
            assert I.is_coprime_to(n)

    def test_summary(self):
        """Summary lists the structure and representatives"""
        summary = class_group(FieldFixtures.field(5)).summary()
        assert summary["h"] == 2
        assert len(summary["reps_p"]) == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
