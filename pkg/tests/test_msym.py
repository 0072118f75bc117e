#!/usr/bin/env python3
"""Tests for M-symbols and their lifts"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.errors import NotCoprimeError
from formal_hecke.ideals import Ideal, euler_phi, euler_psi, ideals_up_to_norm
from formal_hecke.msym import (
    enumerate_p1,
    in_gamma0,
    lift_to_gamma0,
    lift_to_sl2,
    normalize,
    symbols_equivalent,
)


class TestEnumeration:
    """P^1(O/n) has psi(n) points"""

    @pytest.mark.parametrize("x,y,count", [(1, 1, 3), (2, 0, 6), (3, 0, 10), (6, 0, 60)])
    def test_gaussian_counts(self, x, y, count):
        """Counts over Q(i) match psi"""
        n = FieldFixtures.principal(FieldFixtures.gaussian(), x, y)
        symbols = enumerate_p1(n)
        assert len(symbols) == count == euler_psi(n)

    def test_non_principal_level(self):
        """Level p_2 p_3 over Q(sqrt(-5)) has psi = 3 * 4"""
        K = FieldFixtures.field(5)
        n = FieldFixtures.prime_above(K, 2) * FieldFixtures.prime_above(K, 3)
        assert len(enumerate_p1(n)) == 12

    def test_symbols_are_pairwise_inequivalent(self):
        """No two enumerated symbols are equivalent"""
        n = FieldFixtures.gaussian_level_three()
        symbols = enumerate_p1(n)
        for k, s in enumerate(symbols):
            for t in symbols[k + 1:]:
                assert not symbols_equivalent(s.c, s.d, t.c, t.d, n)

    def test_normalize_is_canonical(self):
        """Unit multiples normalize to the same symbol"""
        K = FieldFixtures.gaussian()
        n = FieldFixtures.gaussian_level_three()
        s = normalize(K.element(1), K.element(1, 1), n)
        t = normalize(K.element(0, 1), K.element(-1, 1), n)
        assert s == t
        assert s in enumerate_p1(n)

    def test_normalize_rejects_common_factor(self):
        """(1+i : 2) is not a point at level <2>"""
        K = FieldFixtures.gaussian()
        with pytest.raises(NotCoprimeError):
            normalize(K.element(1, 1), K.element(2), FieldFixtures.principal(K, 2))


class TestLifts:
    """Sections P^1 -> SL(2, O)"""

    def test_lifts_have_determinant_one(self):
        """Every lift is integral with det 1 and the right bottom row"""
        n = FieldFixtures.gaussian_level_six()
        K = n.field
        for s in enumerate_p1(n):
            M = lift_to_sl2(s)
            assert M.is_integral()
            assert M.det() == K.one
            assert symbols_equivalent(M.c, M.d, s.c, s.d, n)

    def test_lifts_over_sqrt_minus_five(self):
        """Lifts exist for a non-principal level"""
        K = FieldFixtures.field(5)
        n = FieldFixtures.prime_above(K, 3)
        for s in enumerate_p1(n):
            M = lift_to_sl2(s)
            assert M.det() == K.one
            assert symbols_equivalent(M.c, M.d, s.c, s.d, n)

    def test_lift_to_gamma0(self):
        """Lifts into Gamma_0(m) for m coprime to n"""
        K = FieldFixtures.gaussian()
        n = FieldFixtures.gaussian_level_three()
        m = FieldFixtures.principal(K, 1, 1)
        for s in enumerate_p1(n):
            M = lift_to_gamma0(s, m)
            assert in_gamma0(M, m)
            assert symbols_equivalent(M.c, M.d, s.c, s.d, n)

    def test_lift_to_gamma0_needs_coprime_levels(self):
        """Overlapping levels are rejected"""
        K = FieldFixtures.gaussian()
        s = enumerate_p1(FieldFixtures.gaussian_level_six())[0]
        with pytest.raises(NotCoprimeError):
            lift_to_gamma0(s, FieldFixtures.principal(K, 1, 1))


def _invertible_residues(n):
    K = n.field
    return [x for x in n.residues() if Ideal.from_gens(K, [x, *n.basis()]).is_one()]


class TestEnumerationSweep:
    """psi and phi against direct counts over every small level"""

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5])
    def test_p1_sizes_up_to_norm_200(self, d):
        """|P^1(O/n)| = psi(n) and |(O/n)^*| = phi(n) for N(n) <= 200"""
        K = FieldFixtures.field(d)
        for n in ideals_up_to_norm(K, 200)[1:]:
            assert len(enumerate_p1(n)) == euler_psi(n), str(n)
            assert len(_invertible_residues(n)) == euler_phi(n), str(n)

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5])
    def test_primitive_pairs_up_to_norm_30(self, d):
        """Primitive pairs (c, d) mod n number phi(n) psi(n)"""
        K = FieldFixtures.field(d)
        for n in ideals_up_to_norm(K, 30)[1:]:
            residues = n.residues()
            pairs = sum(
                1
                for c in residues
                for e in residues
                if Ideal.from_gens(K, [c, e, *n.basis()]).is_one()
            )
            assert pairs == euler_phi(n) * euler_psi(n), str(n)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
