"""Small exact-arithmetic helpers shared by the modules."""

from __future__ import annotations

from fractions import Fraction

import sympy


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def frac_str(x) -> str:
    """Rational as a ``"p/q"`` string (``"p/1"`` for integers)."""
    f = to_fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


def frac_matrix_inverse(m) -> tuple[tuple[Fraction, ...], ...]:
    inv = sympy.Matrix([[sympy.Rational(str(to_fraction(x))) for x in row] for row in m]).inv()
    return tuple(tuple(to_fraction(inv[i, j]) for j in range(inv.cols)) for i in range(inv.rows))


def frac_solve(m, b) -> list[Fraction]:
    M = sympy.Matrix([[sympy.Rational(str(to_fraction(x))) for x in row] for row in m])
    v = sympy.Matrix([sympy.Rational(str(to_fraction(x))) for x in b])
    sol = M.LUsolve(v)
    return [to_fraction(sol[i]) for i in range(sol.rows)]


def frac_det(m) -> Fraction:
    M = sympy.Matrix([[sympy.Rational(str(to_fraction(x))) for x in row] for row in m])
    return to_fraction(M.det())


def quad_form(B, x, y) -> Fraction:
    n = len(x)
    return sum((to_fraction(B[i][j]) * x[i] * y[j] for i in range(n) for j in range(n)), Fraction(0))
