#!/usr/bin/env python3
"""Test fixtures for fields, levels and eigensystems"""

import os
import sys
from typing import List

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", ".."))

from formal_hecke.classgroup import class_group
from formal_hecke.eigsys import Eigensystem, synthesize
from formal_hecke.ideals import Ideal, primes_above
from formal_hecke.modpts import FormalSum, ModularPoint0, standard_points0
from formal_hecke.qfield import FieldDesc, FieldElement


class FieldFixtures:
    """Fixtures for imaginary quadratic fields and levels"""

    @staticmethod
    def gaussian() -> FieldDesc:
        """Q(i), class number 1"""
        return FieldDesc(1)

    @staticmethod
    def field(d: int) -> FieldDesc:
        """Q(sqrt(-d))

        Args:
            d: Squarefree positive integer

        Returns:
            The field descriptor
        """
        return FieldDesc(d)

    @staticmethod
    def element(field: FieldDesc, x: int, y: int = 0) -> FieldElement:
        return field.element(x, y)

    @staticmethod
    def principal(field: FieldDesc, x: int, y: int = 0) -> Ideal:
        """The principal ideal <x + y*w>

        Args:
            field: Ambient field
            x: Rational coordinate
            y: Coordinate of w

        Returns:
            Integral ideal in HNF
        """
        return Ideal.principal(field.element(x, y))

    @staticmethod
    def prime_above(field: FieldDesc, p: int, index: int = 0) -> Ideal:
        return primes_above(field, p)[index]

    @staticmethod
    def gaussian_level_six() -> Ideal:
        return Ideal.principal(6, FieldDesc(1))

    @staticmethod
    def gaussian_level_three() -> Ideal:
        return Ideal.principal(3, FieldDesc(1))

    @staticmethod
    def level_one(field: FieldDesc) -> Ideal:
        return Ideal.unit(field)

    @staticmethod
    def standard_sum(n: Ideal) -> FormalSum:
        """Sum of the standard Gamma_0 points with distinct coefficients

        Args:
            n: Level

        Returns:
            FormalSum with coefficient k on the k-th standard point
        """
        points: List[ModularPoint0] = standard_points0(n, class_group(n.field, n))
        return FormalSum(n, [(P, k + 1) for k, P in enumerate(points)])

    @staticmethod
    def synthesized(d: int, level_gens: int = 1, bound: int = 30, seed: int = 0, inner_twist: bool = False) -> Eigensystem:
        """A synthetic eigensystem over Q(sqrt(-d)) at level <level_gens>

        Args:
            d: Field parameter
            level_gens: Rational generator of the level
            bound: Prime norm bound
            seed: Random seed
            inner_twist: Force a quadratic self-twist

        Returns:
            Eigensystem satisfying the Hecke relations
        """
        field = FieldDesc(d)
        n = Ideal.principal(level_gens, field)
        return synthesize(seed, class_group(field, n), n, bound, force_inner_twist=inner_twist)
