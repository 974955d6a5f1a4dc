"""Seeded random inputs shared by the CLI, the scripts and the tests."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

from .cocycle import ExtendedLoopVector, FourierLoop, LoopAlgebra, PathElement


def random_even_form(rng: np.random.Generator, rank: int) -> tuple[tuple[int, ...], ...]:
    """Even positive-definite integral form: diagonal in {2,4,6,8}, off-diagonal in [-3, 3]."""
    while True:
        B = np.zeros((rank, rank), dtype=int)
        for i in range(rank):
            B[i, i] = int(rng.choice([2, 4, 6, 8]))
            for j in range(i):
                B[i, j] = B[j, i] = int(rng.integers(-3, 4))
        if sympy.Matrix(B.tolist()).is_positive_definite:
            return tuple(tuple(int(x) for x in row) for row in B)


def random_rational(rng: np.random.Generator, num: int = 20, den: int = 12) -> Fraction:
    return Fraction(int(rng.integers(-num, num + 1)), int(rng.integers(1, den + 1)))


def random_lattice_vector(rng: np.random.Generator, rank: int, bound: int = 5) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.integers(-bound, bound + 1, size=rank))


def random_path(algebra: LoopAlgebra, rng: np.random.Generator, factors: int = 2, scale: float = 1.0) -> PathElement:
    gens = tuple(scale * rng.normal(size=algebra.dim) for _ in range(factors))
    return PathElement(algebra, gens)


def random_triple(algebra: LoopAlgebra, M: int, rng: np.random.Generator):
    """(gamma_1, gamma_2, v) for the action-law check."""
    g1 = random_path(algebra, rng)
    g2 = random_path(algebra, rng)
    v = ExtendedLoopVector(complex(0, rng.normal()), FourierLoop.random(M, algebra.dim, rng))
    return g1, g2, v
