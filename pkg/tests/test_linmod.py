#!/usr/bin/env python3
"""Tests for pseudo-lattices, index ideals and sublattice enumeration"""

import itertools
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from fixtures.field_fixtures import FieldFixtures
from formal_hecke.classgroup import class_group
from formal_hecke.errors import NotContainedError, RankError
from formal_hecke.ideals import Ideal, eta, ideals_of_norm, ideals_up_to_norm
from formal_hecke.linmod import (
    PseudoLattice,
    ab_matrix,
    canonical_form,
    elementary_divisors,
    in_Delta,
    index_ideal,
    is_ab_matrix,
    module_intersect,
    module_sum,
    sublattices_of_index,
    superlattices_of_index,
)
from formal_hecke.mat2 import Mat2


class TestPseudoLattice:
    """Canonical forms and module operations"""

    def setup_method(self):
        """Q(sqrt(-5)) with its two ramified primes"""
        self.K = FieldFixtures.field(5)
        self.p2 = FieldFixtures.prime_above(self.K, 2)
        self.p3 = FieldFixtures.prime_above(self.K, 3)

    def test_canonical_form_is_the_same_module(self):
        """Re-basing preserves the lattice"""
        L = PseudoLattice.split(self.p2, self.p3)
        M = L.times(Mat2.of(self.K, 1, 0, 1, 1))
        assert M.canonical() == M
        assert M != L

    def test_singular_basis_rejected(self):
        """A singular basis matrix is a rank error"""
        with pytest.raises(RankError):
            PseudoLattice.free(self.K).times(Mat2.of(self.K, 1, 1, 1, 1))

    def test_sum_and_intersection(self):
        """(p2 + O) + (O + p2) = O + O and the intersection is p2(O + O)"""
        A = PseudoLattice.split(self.p2, Ideal.unit(self.K))
        B = PseudoLattice.split(Ideal.unit(self.K), self.p2)
        free = PseudoLattice.free(self.K)
        assert A + B == free
        assert A.intersect(B) == free.scale(self.p2)
        assert module_sum(A, B) == free
        assert module_intersect(A, B) == canonical_form(free.scale(self.p2))

    def test_steinitz_class(self):
        """The Steinitz class is the product of the coefficient classes"""
        cg = class_group(self.K)
        assert PseudoLattice.split(self.p2, self.p3).steinitz_class(cg).is_trivial()
        assert not PseudoLattice.split(self.p2, Ideal.unit(self.K)).steinitz_class(cg).is_trivial()

    def test_reduce_vector(self):
        """Vectors of the lattice reduce to zero"""
        L = PseudoLattice.free(self.K).scale(self.p3)
        v = (self.K.element(3), self.K.element(6))
        assert L.reduce_vector(v) == (self.K.zero, self.K.zero)


class TestIndexIdeals:
    """Index ideals and elementary divisors"""

    def test_index_of_scaled_lattice(self):
        """[L : pL] = p^2"""
        K = FieldFixtures.gaussian()
        p = FieldFixtures.principal(K, 1, 1)
        L = PseudoLattice.free(K)
        assert index_ideal(L, L.scale(p)) == p * p
        assert elementary_divisors(L, L.scale(p)) == (p, p)

    def test_cyclic_quotient(self):
        """O + 3O has quotient O/<3>"""
        K = FieldFixtures.gaussian()
        three = FieldFixtures.gaussian_level_three()
        L = PseudoLattice.free(K)
        M = PseudoLattice.split(Ideal.unit(K), three)
        assert elementary_divisors(L, M) == (Ideal.unit(K), three)

    def test_not_contained(self):
        """Index needs containment"""
        K = FieldFixtures.gaussian()
        L = PseudoLattice.free(K)
        with pytest.raises(NotContainedError):
            index_ideal(L.scale(FieldFixtures.principal(K, 2)), L)


class TestSublattices:
    """Sublattice and superlattice enumeration"""

    @pytest.mark.parametrize("d,p,power", [(1, 2, 1), (1, 3, 1), (1, 5, 1), (5, 2, 1), (5, 3, 1), (5, 2, 2)])
    def test_counts_match_eta(self, d, p, power):
        """Number of sublattices of index b equals eta(b)"""
        K = FieldFixtures.field(d)
        P = FieldFixtures.prime_above(K, p)
        b = Ideal.unit(K)
        for _ in range(power):
            b = b * P
        found = sublattices_of_index(PseudoLattice.free(K), b)
        assert len(found) == eta(b)

    def test_every_sublattice_has_the_right_index(self):
        """All sublattices of index p_2 p_3 over Q(sqrt(-5))"""
        K = FieldFixtures.field(5)
        b = FieldFixtures.prime_above(K, 2) * FieldFixtures.prime_above(K, 3)
        L = PseudoLattice.split(FieldFixtures.prime_above(K, 2), Ideal.unit(K))
        found = sublattices_of_index(L, b)
        assert len(found) == eta(b) == 12
        assert len(set(found)) == 12
        for M in found:
            assert L.contains(M)
            assert index_ideal(L, M) == b

    def test_superlattices(self):
        """Superlattices of index <2> contain L with the right index"""
        K = FieldFixtures.gaussian()
        b = FieldFixtures.principal(K, 2)
        L = PseudoLattice.free(K)
        found = superlattices_of_index(L, b)
        assert len(found) == 7
        for M in found:
            assert M.contains(L)
            assert index_ideal(M, L) == b


class TestAbMatrices:
    """(a,b)-matrices and the stabilizer Delta(a, b)"""

    def test_ab_matrix(self):
        """p_2 p_3 is principal so an (a,b)-matrix exists"""
        K = FieldFixtures.field(5)
        a, b = FieldFixtures.prime_above(K, 2), FieldFixtures.prime_above(K, 3)
        M = ab_matrix(a, b)
        assert is_ab_matrix(M, a, b)
        assert not is_ab_matrix(Mat2.identity(K), a, b)

    def test_delta_contains_identity(self):
        """The identity stabilizes every a + b"""
        K = FieldFixtures.field(5)
        a, b = FieldFixtures.prime_above(K, 2), FieldFixtures.prime_above(K, 3)
        assert in_Delta(Mat2.identity(K), a, b)
        assert not in_Delta(Mat2.diag(K.element(2), K.one), a, b)


def _divisor_chains(m, length):
    if length == 1:
        yield (m,)
        return
    for d in range(1, m + 1):
        if m % d == 0:
            for rest in _divisor_chains(m // d, length - 1):
                yield (d,) + rest


def _upper_hnfs(m):
    """Row-style HNF bases of every index-m sublattice of Z^4"""
    for diag in _divisor_chains(m, 4):
        slots = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        for entries in itertools.product(*(range(diag[j]) for _, j in slots)):
            rows = [[0] * 4 for _ in range(4)]
            for i in range(4):
                rows[i][i] = diag[i]
            for (i, j), value in zip(slots, entries):
                rows[i][j] = value
            yield rows


def _in_row_span(rows, v):
    v = list(v)
    for i in range(4):
        q, r = divmod(v[i], rows[i][i])
        if r:
            return False
        v = [x - q * y for x, y in zip(v, rows[i])]
    return True


def _times_omega(K, v):
    out = []
    for x, y in (v[:2], v[2:]):
        z = K.element(x, y) * K.omega
        out.extend(int(t) for t in z.coords())
    return out


def _omega_stable_count(K, N):
    """Z-sublattices of O + O = Z^4 of index N^2 closed under omega"""
    return sum(
        1
        for rows in _upper_hnfs(N * N)
        if all(_in_row_span(rows, _times_omega(K, r)) for r in rows)
    )


class TestSublatticeSweep:
    """eta(b) and a direct Z^4 count over small norms"""

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5])
    def test_counts_up_to_norm_50(self, d):
        """Every b with N(b) <= 50 has eta(b) distinct sublattices"""
        K = FieldFixtures.field(d)
        L = PseudoLattice.free(K)
        for b in ideals_up_to_norm(K, 50):
            found = sublattices_of_index(L, b)
            assert len(found) == eta(b), str(b)
            assert len({M.key for M in found}) == len(found), str(b)

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [1, 5])
    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    def test_against_omega_stable_z_lattices(self, d, N):
        """O-sublattices of index norm N are the omega-stable Z-sublattices of index N^2"""
        K = FieldFixtures.field(d)
        L = PseudoLattice.free(K)
        expected = _omega_stable_count(K, N)
        found = sum(len(sublattices_of_index(L, b)) for b in ideals_of_norm(K, N))
        assert found == expected


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
