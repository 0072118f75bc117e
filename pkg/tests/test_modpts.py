#!/usr/bin/env python3
"""Tests for modular points, admissible bases and formal sums"""

import os
import random
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.classgroup import class_group
from formal_hecke.cyclotomic import quadratic_characters
from formal_hecke.errors import NotCoprimeError, PreconditionError
from formal_hecke.ideals import Ideal, ideals_of_norm
from formal_hecke.mat2 import Mat2
from formal_hecke.modpts import (
    FormalSum,
    admissible_basis0,
    admissible_basis1,
    diamond,
    graded_component,
    in_gamma0p,
    in_gamma1p,
    point_indices,
    standard_point0,
    standard_point1,
    standard_points0,
    twist_formal_sum,
    validate,
    validate0,
)


def _sqrt_minus_five_level():
    K = FieldFixtures.field(5)
    return FieldFixtures.prime_above(K, 3)


class TestStandardPoints:
    """Standard points P_ij"""

    @pytest.mark.parametrize("d", [1, 5, 23])
    def test_one_standard_point_per_class(self, d):
        """There are h standard points, one in each class"""
        K = FieldFixtures.field(d)
        n = FieldFixtures.prime_above(K, 3)
        cg = class_group(K, n)
        points = standard_points0(n, cg)
        assert len(points) == cg.h
        assert len({P.point_class(cg) for P in points}) == cg.h

    def test_standard_points_are_valid(self):
        """Lp/L is cyclic of order n"""
        n = _sqrt_minus_five_level()
        for P in standard_points0(n):
            assert validate0(P)

    def test_indices_round_trip(self):
        """The class of P_ij decomposes as (i, j)"""
        K = FieldFixtures.field(14)
        n = FieldFixtures.principal(K, 3)
        cg = class_group(K, n)
        for i in range(1, cg.h2 + 1):
            for j in range(1, cg.h2prime + 1):
                assert point_indices(standard_point0(i, j, n, cg), cg) == (i, j)

    def test_gamma1_standard_points(self):
        """Standard Gamma_1 points carry a generator of Lp/L"""
        n = FieldFixtures.gaussian_level_three()
        cg = class_group(n.field, n)
        P = standard_point1(1, 1, n, cg)
        assert validate(P)
        assert P.gamma0() == standard_point0(1, 1, n, cg)

    def test_invalid_pair(self):
        """Equal lattices are not a point of level <3>"""
        n = FieldFixtures.gaussian_level_three()
        P = standard_point0(1, 1, n)
        assert not validate0(type(P)(P.L, P.L, n))
        assert not validate0(type(P)(P.Lp, P.L, n))


class TestAdmissibleBases:
    """P = P_ij * U"""

    def test_gamma0_basis(self):
        """A translated standard point is recovered from its admissible basis"""
        n = FieldFixtures.gaussian_level_three()
        K = n.field
        P = standard_point0(1, 1, n).times(Mat2.of(K, 1, 0, 1, 1))
        U = admissible_basis0(P)
        assert standard_point0(1, 1, n).times(U) == P

    def test_gamma0_basis_non_principal(self):
        """Admissible bases for every standard point over Q(sqrt(-5))"""
        n = _sqrt_minus_five_level()
        cg = class_group(n.field, n)
        for P in standard_points0(n, cg):
            i, j = point_indices(P, cg)
            U = admissible_basis0(P, cg)
            assert standard_point0(i, j, n, cg).times(U) == P

    def test_gamma1_basis(self):
        """The Gamma_1 basis also matches the generator"""
        n = FieldFixtures.gaussian_level_three()
        K = n.field
        P = diamond(K.element(2), standard_point1(1, 1, n))
        U = admissible_basis1(P)
        assert standard_point1(1, 1, n).times(U) == P


def _round_trip_level(d: int) -> Ideal:
    K = FieldFixtures.field(d)
    if d == 1:
        return FieldFixtures.principal(K, 6)
    if d == 14:
        return FieldFixtures.principal(K, 3)
    return FieldFixtures.prime_above(K, 3 if d == 5 else 2)


def _random_gamma(rng: random.Random, n: Ideal, gamma1: bool) -> Mat2:
    """A product of three elementary matrices of Gamma_1(n), or of Gamma_0(n)"""
    K = n.field
    one, zero = K.one, K.zero
    g1, g2 = n.basis()
    kinds = ["upper", "lower"] if gamma1 else ["upper", "lower", "unit"]
    M = Mat2.identity(K)
    for _ in range(3):
        kind = rng.choice(kinds)
        if kind == "upper":
            M = M * Mat2(one, K.element(rng.randint(-2, 2), rng.randint(-2, 2)), zero, one)
        elif kind == "lower":
            c = g1 * K.element(rng.randint(-1, 1)) + g2 * K.element(rng.randint(-1, 1))
            M = M * Mat2(one, zero, c, one)
        else:
            u = rng.choice(K.units())
            M = M * Mat2.diag(u, u.inverse())
    return M


class TestAdmissibleRoundTrips:
    """Random points of every class recovered from their admissible bases"""

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5, 23, 14])
    def test_gamma0_points(self, d):
        """P_ij * g gives back P_ij, and U g^-1 stabilizes P_ij"""
        n = _round_trip_level(d)
        cg = class_group(n.field, n)
        rng = random.Random(d)
        for _ in range(50):
            i, j = rng.randint(1, cg.h2), rng.randint(1, cg.h2prime)
            g = _random_gamma(rng, n, gamma1=False)
            P = standard_point0(i, j, n, cg).times(g)
            assert point_indices(P, cg) == (i, j)
            U = admissible_basis0(P, cg)
            assert standard_point0(i, j, n, cg).times(U) == P
            assert in_gamma0p(U * g.inverse(), cg.reps_p[i - 1], n)

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5, 23, 14])
    def test_gamma1_points(self, d):
        """The Gamma_1 basis differs from g by a Gamma_1 stabilizer element"""
        n = _round_trip_level(d)
        cg = class_group(n.field, n)
        rng = random.Random(100 + d)
        for _ in range(50):
            i, j = rng.randint(1, cg.h2), rng.randint(1, cg.h2prime)
            g = _random_gamma(rng, n, gamma1=True)
            P = standard_point1(i, j, n, cg).times(g)
            U = admissible_basis1(P, cg)
            assert standard_point1(i, j, n, cg).times(U) == P
            assert in_gamma1p(U * g.inverse(), cg.reps_p[i - 1], n)

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5, 23, 14])
    def test_scaled_points(self, d):
        """Scaling by an ideal moves the class by its square and stays recoverable"""
        n = _round_trip_level(d)
        K = n.field
        cg = class_group(K, n)
        scalings = [a for N in range(1, 8) for a in ideals_of_norm(K, N)]
        rng = random.Random(200 + d)
        for _ in range(50):
            i, j = rng.randint(1, cg.h2), rng.randint(1, cg.h2prime)
            a = rng.choice(scalings)
            P = standard_point0(i, j, n, cg).times(_random_gamma(rng, n, gamma1=False)).scale(a)
            assert P.point_class(cg) == cg.class_of(a) ** 2 * standard_point0(i, j, n, cg).point_class(cg)
            i2, j2 = point_indices(P, cg)
            U = admissible_basis0(P, cg)
            assert standard_point0(i2, j2, n, cg).times(U) == P


class TestDiamond:
    """Diamond operators on Gamma_1 points"""

    def test_identity(self):
        """<1> fixes the point"""
        n = FieldFixtures.gaussian_level_three()
        P = standard_point1(1, 1, n)
        assert diamond(n.field.one, P) == P

    def test_multiplicative(self):
        """<a><b> = <ab>"""
        n = FieldFixtures.gaussian_level_three()
        K = n.field
        P = standard_point1(1, 1, n)
        a, b = K.element(1, 1), K.element(2)
        assert diamond(a, diamond(b, P)) == diamond(a * b, P)

    def test_congruent_scalars_agree(self):
        """<a> depends on a modulo n"""
        n = FieldFixtures.gaussian_level_three()
        K = n.field
        P = standard_point1(1, 1, n)
        assert diamond(K.element(2), P) == diamond(K.element(5), P)

    def test_rejects_non_unit(self):
        """3 is not a unit modulo <3>"""
        n = FieldFixtures.gaussian_level_three()
        with pytest.raises(NotCoprimeError):
            diamond(n.field.element(3), standard_point1(1, 1, n))

    def test_gamma1_points_scale_by_elements_only(self):
        """Ideal scaling is a Gamma_0 operation"""
        n = FieldFixtures.gaussian_level_three()
        with pytest.raises(PreconditionError):
            standard_point1(1, 1, n).scale(n)


class TestTwistedCongruenceGroups:
    """Gamma_0^p(n) and Gamma_1^p(n) membership"""

    def test_gamma0(self):
        """Lower-left entry in n"""
        n = FieldFixtures.gaussian_level_three()
        K, unit = n.field, Ideal.unit(n.field)
        assert in_gamma0p(Mat2.identity(K), unit, n)
        assert in_gamma0p(Mat2.of(K, 1, 0, 3, 1), unit, n)
        assert not in_gamma0p(Mat2.of(K, 1, 0, 1, 1), unit, n)

    def test_gamma1(self):
        """Lower-right entry 1 modulo n"""
        n = FieldFixtures.gaussian_level_three()
        K, unit = n.field, Ideal.unit(n.field)
        minus = Mat2.of(K, -1, 0, 0, -1)
        assert in_gamma0p(minus, unit, n)
        assert not in_gamma1p(minus, unit, n)
        assert in_gamma1p(Mat2.of(K, 1, 0, 3, 1), unit, n)

    def test_twisted_upper_entry(self):
        """The upper-right entry may lie in p^-1"""
        K = FieldFixtures.gaussian()
        n = FieldFixtures.gaussian_level_three()
        p = FieldFixtures.principal(K, 1, 1)
        half_shift = Mat2.of(K, 1, K.element(1, 1).inverse(), 0, 1)
        assert in_gamma0p(half_shift, p, n)
        assert not in_gamma0p(half_shift, Ideal.unit(K), n)


class TestGradedSums:
    """Class grading and twisting of formal sums"""

    def test_components_add_up(self):
        """v is the sum of its graded components"""
        n = _sqrt_minus_five_level()
        cg = class_group(n.field, n)
        v = FieldFixtures.standard_sum(n)
        parts = [graded_component(v, c, cg) for c in cg.elements()]
        assert all(len(part) == 1 for part in parts)
        total = FormalSum.zero(n)
        for part in parts:
            total = total + part
        assert total == v

    def test_quadratic_twist(self):
        """Twisting by the genus character negates the non-principal component"""
        n = _sqrt_minus_five_level()
        cg = class_group(n.field, n)
        psi = next(chi for chi in quadratic_characters(tuple(cg.cyclic_structure)) if not chi.is_trivial())
        v = FieldFixtures.standard_sum(n)
        twisted = twist_formal_sum(v, psi, cg)
        for P in v.points():
            sign = 1 if P.point_class(cg).is_trivial() else -1
            assert twisted.coefficient(P) == sign * v.coefficient(P)
        assert twist_formal_sum(twisted, psi, cg) == v


class TestFormalSum:
    """Linear combinations of points"""

    def test_merge_and_cancel(self):
        """Like terms merge and zero coefficients disappear"""
        n = FieldFixtures.gaussian_level_three()
        P = standard_point0(1, 1, n)
        Q = P.times(Mat2.of(n.field, 1, 0, 1, 1))
        v = FormalSum(n, [(P, 1), (Q, 2), (P, -1)])
        assert len(v) == 1
        assert v.coefficient(Q) == 2
        assert v.coefficient(P) == 0
        assert (v - v).is_zero()

    def test_scalar_multiple(self):
        """Coefficients scale exactly"""
        n = FieldFixtures.gaussian_level_three()
        v = FormalSum.point(standard_point0(1, 1, n), 3)
        assert (v * Fraction(1, 3)).coefficient(standard_point0(1, 1, n)) == 1
        assert 2 * v == v + v

    def test_level_mismatch(self):
        """Points of another level are rejected"""
        K = FieldFixtures.gaussian()
        P = standard_point0(1, 1, FieldFixtures.gaussian_level_three())
        with pytest.raises(PreconditionError):
            FormalSum(FieldFixtures.principal(K, 1, 1), [(P, 1)])

    def test_standard_sum_fixture(self):
        """The fixture puts coefficient k on the k-th standard point"""
        n = _sqrt_minus_five_level()
        v = FieldFixtures.standard_sum(n)
        assert sorted(c for _, c in v) == [1, 2]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
