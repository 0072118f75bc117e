#!/usr/bin/env python3
"""Tests for the relation suites"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.errors import PreconditionError
from formal_hecke.heckeops import t_a
from formal_hecke.relations import (
    SUITES,
    RelationContext,
    hecke_relation_checks,
    run_suites,
    sample_points0,
    sample_points1,
    suite_names,
)
from formal_hecke.verify_runner import VerificationRunner, all_passed


def _failures(results):
    return [(r.name, r.detail) for r in results if not r.passed]


class TestSuiteSelection:
    """Suite names and selectors"""

    def test_all(self):
        """'all' selects every suite in order"""
        assert suite_names("all") == list(SUITES)
        assert suite_names() == [
            "hecke",
            "atkin_lehner",
            "level_change",
            "duals",
            "grading",
            "diamond",
            "matrices",
        ]

    def test_comma_separated(self):
        """Selectors are comma separated"""
        assert suite_names("hecke, duals") == ["hecke", "duals"]

    def test_unknown_suite(self):
        """Unknown names are a precondition failure"""
        with pytest.raises(PreconditionError):
            suite_names("hecke,bogus")


class TestContext:
    """Sample data for the suites"""

    def test_build_gaussian_level_six(self):
        """Two primes of norm 5 are coprime to <6>"""
        n = FieldFixtures.gaussian_level_six()
        ctx = RelationContext.build(n.field, n)
        assert len(ctx.coprime_primes) == 2
        assert all(p.norm == 5 for p in ctx.coprime_primes)
        assert sorted(p.norm for p in ctx.level_primes) == [2, 9]
        assert len(ctx.pairs()) == 1

    def test_sample_points_are_distinct(self):
        """Standard points plus two translates, no repeats"""
        n = FieldFixtures.gaussian_level_three()
        points = sample_points0(n)
        assert len(points) == len(set(points)) == 3
        assert len(sample_points1(n)) == 3

    def test_no_coprime_prime(self):
        """A tiny bound leaves nothing to test with"""
        n = FieldFixtures.gaussian_level_six()
        with pytest.raises(PreconditionError):
            RelationContext.build(n.field, n, prime_bound=4)

    def test_default_max_power(self):
        """Prime powers are checked up to the cube by default"""
        n = FieldFixtures.gaussian_level_six()
        ctx = RelationContext.build(n.field, n)
        assert ctx.max_power == 3
        names = [c.name for c in hecke_relation_checks(ctx)]
        assert sum(1 for name in names if name.startswith("hecke.prime_power_recurrence")) == 6
        assert sum(1 for name in names if name.startswith("hecke.level_prime_power")) == 4
        assert any(name.endswith("^3") for name in names)

    def test_shared_images(self):
        """ctx.ta computes each image once and agrees with t_a"""
        n = FieldFixtures.gaussian_level_three()
        ctx = RelationContext.build(n.field, n, max_power=1)
        v = ctx.v0()
        first = ctx.ta(ctx.p1, v)
        assert ctx.ta(ctx.p1, v) is first
        assert first == t_a(ctx.p1, v)


class TestSuitesGaussian:
    """Suites over Q(i)"""

    @pytest.mark.parametrize("suite", ["hecke", "atkin_lehner", "duals", "grading", "diamond"])
    def test_level_three(self, suite):
        """Each suite passes at level <3>"""
        n = FieldFixtures.gaussian_level_three()
        ctx = RelationContext.build(n.field, n, max_power=1)
        results = run_suites(ctx, suite, VerificationRunner(workers=1))
        assert results
        assert all_passed(results), _failures(results)

    @pytest.mark.slow
    def test_all_suites_level_six(self):
        """Every suite passes at level <6>"""
        n = FieldFixtures.gaussian_level_six()
        ctx = RelationContext.build(n.field, n)
        results = run_suites(ctx, "all", VerificationRunner(workers=2))
        assert all_passed(results), _failures(results)
        names = {r.name.split(":")[0] for r in results}
        assert "al.product" in names
        assert "matrices.wqm_group" in names

    @pytest.mark.slow
    def test_hecke_cubes_level_six(self):
        """Prime power relations hold up to the cube at level <6>"""
        n = FieldFixtures.gaussian_level_six()
        ctx = RelationContext.build(n.field, n, max_power=3)
        results = run_suites(ctx, "hecke", VerificationRunner(workers=1))
        assert len(results) == 21
        assert all_passed(results), _failures(results)
        assert {"hecke.prime_power_recurrence", "hecke.level_prime_power"} <= {r.name.split(":")[0] for r in results}


class TestSuitesNonPrincipal:
    """Suites over Q(sqrt(-5))"""

    def test_grading_level_p3(self):
        """Operators shift classes as predicted"""
        K = FieldFixtures.field(5)
        n = FieldFixtures.prime_above(K, 3)
        ctx = RelationContext.build(K, n, max_power=1)
        results = run_suites(ctx, "grading", VerificationRunner(workers=1))
        assert all_passed(results), _failures(results)

    @pytest.mark.slow
    def test_level_p2_p3(self):
        """Hecke, Atkin-Lehner and dual suites at level p2 p3"""
        K = FieldFixtures.field(5)
        n = FieldFixtures.prime_above(K, 2) * FieldFixtures.prime_above(K, 3)
        ctx = RelationContext.build(K, n)
        results = run_suites(ctx, "hecke,atkin_lehner,duals,matrices", VerificationRunner(workers=1))
        assert all_passed(results), _failures(results)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
