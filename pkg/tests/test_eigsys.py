#!/usr/bin/env python3
"""Tests for eigensystems, principal restriction and recovery"""

import os
import sys
from dataclasses import replace

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.classgroup import class_group
from formal_hecke.cyclotomic import CycValue
from formal_hecke.eigsys import (
    Eigensystem,
    check_eigensystem,
    dirichlet_coefficients,
    evaluate,
    inner_twists,
    recover,
    restrict_to_principal,
    stored_powers,
    support_subgroup,
    twist,
    twist_orbit,
    validate,
)
from formal_hecke.errors import InconsistentRestrictionError, PreconditionError
from formal_hecke.heckeops import OperatorDescriptor
from formal_hecke.ideals import Ideal
from formal_hecke.verify_runner import VerificationRunner


def _contains(systems, lam: Eigensystem) -> bool:
    return any(lam == mu for mu in systems)


class TestSynthesis:
    """Synthetic eigensystems satisfy the Hecke relations"""

    @pytest.mark.parametrize("d", [1, 5, 23])
    def test_synthesized_systems_validate(self, d):
        """Relations and local factors hold"""
        lam = FieldFixtures.synthesized(d, bound=30, seed=3)
        assert validate(lam)
        assert check_eigensystem(lam, VerificationRunner(workers=1))

    def test_deterministic(self):
        """The same seed gives the same system"""
        assert FieldFixtures.synthesized(5, seed=7) == FieldFixtures.synthesized(5, seed=7)

    def test_stored_powers(self):
        """Powers up to the bound, never fewer than two"""
        K = FieldFixtures.gaussian()
        assert stored_powers(FieldFixtures.principal(K, 1, 1), 30) == 4
        assert stored_powers(FieldFixtures.principal(K, 5, 2), 30) == 2

    def test_tampering_is_detected(self):
        """Changing alpha(p^2) breaks the recurrence"""
        lam = FieldFixtures.synthesized(1, bound=20)
        p = lam.primes()[0]
        values = list(lam.alpha[p])
        values[1] = values[1] + 1
        lam.alpha[p] = tuple(values)
        assert not validate(lam)

    def test_level_primes_use_the_ramified_recurrence(self):
        """alpha(p^2) = alpha(p)^2 for p dividing the level"""
        lam = FieldFixtures.synthesized(1, level_gens=3, bound=81)
        p = FieldFixtures.gaussian_level_three()
        assert lam.value(p, 2) == lam.value(p, 1) ** 2

    def test_inner_twist_needs_even_class_number(self):
        """Q(i) has no nontrivial quadratic character"""
        with pytest.raises(PreconditionError):
            FieldFixtures.synthesized(1, inner_twist=True)


class TestEvaluation:
    """Values on operators and Dirichlet coefficients"""

    def test_scaling_operators_give_the_character(self):
        """lam(T_{a,a}) = chi([a])"""
        lam = FieldFixtures.synthesized(5)
        K = lam.field
        p2 = FieldFixtures.prime_above(K, 2)
        assert evaluate(lam, OperatorDescriptor.Taa(p2)) == lam.chi_of(p2)

    def test_coefficients_are_multiplicative(self):
        """lam(T_ab) = lam(T_a) lam(T_b) for coprime a, b"""
        lam = FieldFixtures.synthesized(1, bound=30)
        K = lam.field
        a, b = FieldFixtures.principal(K, 1, 1), FieldFixtures.principal(K, 2, 1)
        coeffs = {I: v for I, v in dirichlet_coefficients(lam, 30)}
        assert coeffs[a * b] == coeffs[a] * coeffs[b]
        assert coeffs[Ideal.unit(K)] == 1

    def test_bound_is_enforced(self):
        """Coefficients beyond the stored bound are refused"""
        lam = FieldFixtures.synthesized(1, bound=20)
        with pytest.raises(PreconditionError):
            dirichlet_coefficients(lam, 40)


class TestTwisting:
    """Twists and inner twists"""

    def test_twist_by_trivial_character(self):
        """lam (x) 1 = lam"""
        lam = FieldFixtures.synthesized(5)
        trivial = inner_twists(lam)[0]
        assert trivial.is_trivial()
        assert twist(lam, trivial) == lam

    def test_generic_system_has_two_twists(self):
        """A generic system over Q(sqrt(-5)) has a twist orbit of size 2"""
        lam = FieldFixtures.synthesized(5, seed=1)
        assert len(inner_twists(lam)) == 1
        assert len(twist_orbit(lam)) == 2

    def test_self_twist(self):
        """Forcing an inner twist makes the orbit collapse"""
        lam = FieldFixtures.synthesized(5, seed=1, inner_twist=True)
        assert validate(lam)
        assert len(inner_twists(lam)) == 2
        assert len(twist_orbit(lam)) == 1

    def test_support_subgroup(self):
        """An inner twist confines the support to an index-2 subgroup"""
        generic = FieldFixtures.synthesized(5, seed=1)
        twisted = FieldFixtures.synthesized(5, seed=1, inner_twist=True)
        assert len(support_subgroup(generic)) == 2
        assert len(support_subgroup(twisted)) == 1


class TestRestrictionAndRecovery:
    """Recovering eigensystems from principal operators"""

    def test_class_number_one(self):
        """Over Q(i) the restriction determines lam"""
        lam = FieldFixtures.synthesized(1, level_gens=3, bound=30)
        found = recover(restrict_to_principal(lam))
        assert len(found) == 1
        assert found[0] == lam

    def test_round_trip_sqrt_minus_five(self):
        """lam and its quadratic twist share a restriction"""
        lam = FieldFixtures.synthesized(5, bound=30, seed=2)
        found = recover(restrict_to_principal(lam))
        assert len(found) == 2
        assert _contains(found, lam)
        for mu in twist_orbit(lam):
            assert _contains(found, mu)

    def test_round_trip_self_twist(self):
        """A self-twisted system is recovered uniquely"""
        lam = FieldFixtures.synthesized(5, bound=30, seed=2, inner_twist=True)
        found = recover(restrict_to_principal(lam))
        assert len(found) == 1
        assert found[0] == lam

    def test_odd_class_number(self):
        """Over Q(sqrt(-23)) every twist has the same restriction"""
        lam = FieldFixtures.synthesized(23, bound=20, seed=4)
        found = recover(restrict_to_principal(lam))
        assert len(found) == 3
        for mu in twist_orbit(lam):
            assert _contains(found, mu)

    def test_formal_roots_without_witnesses(self):
        """Without witnesses the roots are taken from the squares alone"""
        lam = FieldFixtures.synthesized(5, bound=30, seed=2)
        r = restrict_to_principal(lam, with_witnesses=False)
        assert r.witnesses == []
        found = recover(r)
        assert len(found) == 2
        assert all(validate(mu) for mu in found)

    def test_restriction_entries_are_principal(self):
        """Every entry is a principal operator"""
        lam = FieldFixtures.synthesized(5, bound=30)
        cg = class_group(lam.field, lam.level)
        r = restrict_to_principal(lam)
        for entry in r.entries:
            total = cg.class_of(entry.a) ** 2
            for b in entry.factors:
                total = total * cg.class_of(b)
            assert total.is_trivial(), entry.label()

    def test_inconsistent_restriction(self):
        """A corrupted value is reported"""
        lam = FieldFixtures.synthesized(1, bound=20)
        r = restrict_to_principal(lam)
        k, entry = next((k, e) for k, e in enumerate(r.entries) if e.role == "square_class")
        r.entries[k] = replace(entry, value=entry.value + CycValue.rational(1))
        with pytest.raises(InconsistentRestrictionError):
            recover(r)


def _assert_recovers_orbit(lam: Eigensystem) -> None:
    found = recover(restrict_to_principal(lam))
    orbit = twist_orbit(lam)
    assert _contains(found, lam)
    assert len(found) == len(orbit)
    for mu in orbit:
        assert _contains(found, mu)


class TestRecoverySweep:
    """Round trips over class numbers 1 to 4 with prime bound 60"""

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("d", [1, 5, 23, 14, 21])
    def test_generic_systems(self, d, seed):
        """recover(restrict(lam)) is exactly the twist orbit of lam"""
        _assert_recovers_orbit(FieldFixtures.synthesized(d, bound=60, seed=seed))

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("d", [5, 14, 21])
    def test_self_twisted_systems(self, d, seed):
        """Forced inner twists shrink the orbit and recovery follows it"""
        lam = FieldFixtures.synthesized(d, bound=60, seed=seed, inner_twist=True)
        assert len(inner_twists(lam)) >= 2
        _assert_recovers_orbit(lam)
        if d == 5:
            assert len(twist_orbit(lam)) == 1
            assert len(inner_twists(lam)) == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
