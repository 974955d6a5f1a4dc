"""Super-potentials: operator form on an irrep, torus sheets, Verlinde data.

Torus sheets live on the cocharacter lattice with a level form ``B``; a
sheet labelled by a character ``lam`` carries

    W(mu) = -<lam | mu> + B(mu, mu) / 2,

with a single Morse critical point at the B-dual of ``lam``.  Everything
on the torus side is exact rational arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
import scipy.sparse as sp
import sympy
from sympy.matrices.normalforms import smith_normal_decomp

from .exact import frac_det, frac_solve, frac_str, quad_form, to_fraction
from .lie import CartanVector, RootSystem, _check_same, weyl_group_matrices
from .reps import IrrepMatrices, cartan_action


class FormError(ValueError):
    pass


# operator form on a representation


def lie_potential_operator(rep: IrrepMatrices, mu: CartanVector) -> np.ndarray:
    """W(mu) = -i T(mu) + ||mu||^2 / 2 on V; hermitian."""
    _check_same(rep.rs, mu.rs)
    T = cartan_action(rep, mu)
    return -1j * T + 0.5 * float(mu.norm2()) * np.eye(rep.dim)


def lie_potential_extended(df, mu: CartanVector) -> sp.csr_matrix:
    """The same operator on V (x) S, with mu acting diagonally."""
    _check_same(df.rs, mu.rs)
    return (
        -1j * df.calibration.t_sign * df.total_action(mu)
        + 0.5 * float(mu.norm2()) * sp.identity(df.dim, format="csr")
    ).tocsr()


def curvature_residual(df, mu: CartanVector) -> float:
    """max |D_mu^2 + 2 W(mu) + ||lam + rho||^2|."""
    from .dirac import _max_abs, dirac_at

    D = dirac_at(df, mu)
    lhs = D @ D + 2 * lie_potential_extended(df, mu)
    return _max_abs(lhs + float(df.scalar) * sp.identity(df.dim, format="csr"))


# torus sheets


def _as_form(B) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(to_fraction(x) for x in row) for row in B)
    r = len(rows)
    if any(len(row) != r for row in rows):
        raise FormError("form must be square")
    return rows


def check_even_form(B) -> tuple[tuple[Fraction, ...], ...]:
    """Validate a symmetric, positive-definite, integral form with even diagonal."""
    B = _as_form(B)
    r = len(B)
    for i in range(r):
        for j in range(r):
            if B[i][j] != B[j][i]:
                raise FormError("form is not symmetric")
            if B[i][j].denominator != 1:
                raise FormError("form is not integral")
        if B[i][i] % 2 != 0:
            raise FormError("form is not even")
    if not sympy.Matrix([[int(x) for x in row] for row in B]).is_positive_definite:
        raise FormError("form is not positive definite")
    return B


@dataclass(frozen=True)
class PotentialSheet:
    lam: tuple[int, ...]
    form: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "form", check_even_form(self.form))
        lam = tuple(int(x) for x in self.lam)
        if len(lam) != self.rank:
            raise FormError(f"sheet label {lam} does not match rank {self.rank}")
        object.__setattr__(self, "lam", lam)

    @property
    def rank(self) -> int:
        return len(self.form)

    @property
    def critical_point(self) -> tuple[Fraction, ...]:
        """lam# = B^{-1} lam, by exact linear solve."""
        return tuple(frac_solve(self.form, self.lam))

    @property
    def critical_value(self) -> Fraction:
        c = self.critical_point
        return -quad_form(self.form, c, c) / 2

    def gradient(self, mu) -> tuple:
        mu = _vec(mu, self.rank)
        return tuple(
            -self.lam[i] + sum(self.form[i][j] * mu[j] for j in range(self.rank))
            for i in range(self.rank)
        )

    def hessian(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.form


def _vec(mu, r: int) -> list:
    mu = list(mu)
    if len(mu) != r:
        raise FormError(f"vector of length {len(mu)} on a rank-{r} sheet")
    return [x if isinstance(x, (float, np.floating)) else to_fraction(x) for x in mu]


def torus_sheet_potential(sheet: PotentialSheet, mu):
    """-<lam|mu> + B(mu, mu)/2; exact on rational input."""
    mu = _vec(mu, sheet.rank)
    if any(isinstance(x, (float, np.floating)) for x in mu):
        B = np.array(sheet.form, dtype=float)
        m = np.array(mu, dtype=float)
        return float(-np.dot(sheet.lam, m) + 0.5 * m @ B @ m)
    pairing = sum((lam_i * x for lam_i, x in zip(sheet.lam, mu)), Fraction(0))
    return -pairing + quad_form(sheet.form, mu, mu) / 2


def translation_descent_check(sheet: PotentialSheet, p, mu) -> Fraction:
    """W_{lam + Bp}(mu + p) - W_lam(mu), exactly.

    For an even form this is the integer -<lam|p> - B(p, p)/2, whatever mu is.
    """
    p = list(p)
    if len(p) != sheet.rank or any(to_fraction(x).denominator != 1 for x in p):
        raise FormError(f"{p} is not a lattice vector")
    p = [int(to_fraction(x)) for x in p]
    mu = [to_fraction(x) for x in _vec(mu, sheet.rank)]
    shifted_lam = tuple(
        sheet.lam[i] + int(sum(sheet.form[i][j] * p[j] for j in range(sheet.rank)))
        for i in range(sheet.rank)
    )
    moved = PotentialSheet(shifted_lam, sheet.form)
    return torus_sheet_potential(moved, [m + q for m, q in zip(mu, p)]) - torus_sheet_potential(sheet, mu)


# Verlinde points


@dataclass
class VerlindeData:
    form: tuple[tuple[Fraction, ...], ...]
    points: list[tuple[Fraction, ...]]
    count: int
    determinant: int
    regular: list[bool] = field(default_factory=list)
    representatives: list[tuple[Fraction, ...]] = field(default_factory=list)
    labels: list[tuple[int, ...]] = field(default_factory=list)
    orbit_sizes: list[int] = field(default_factory=list)
    critical_values: list[Fraction] = field(default_factory=list)
    phases: list[complex] = field(default_factory=list)
    normalized_phases: list[complex] = field(default_factory=list)
    rescale: int = 1
    tag: str | None = None
    level: int | None = None

    def to_json(self) -> dict:
        def pt(v):
            return [frac_str(x) for x in v]

        return {
            "tag": self.tag,
            "level": self.level,
            "form": [[frac_str(x) for x in row] for row in self.form],
            "count": self.count,
            "determinant": self.determinant,
            "points": [pt(v) for v in self.points],
            "regular": list(self.regular),
            "representatives": [pt(v) for v in self.representatives],
            "representative_count": len(self.representatives),
            "labels": [list(w) for w in self.labels],
            "orbit_sizes": list(self.orbit_sizes),
            "critical_values": [frac_str(w) for w in self.critical_values],
            "critical_values_rescaled": [int(w * self.rescale) for w in self.critical_values],
            "rescale": self.rescale,
            "phases": [{"re": z.real, "im": z.imag} for z in self.phases],
            "normalized_phases": [{"re": z.real, "im": z.imag} for z in self.normalized_phases],
        }


def _reduce_mod1(v) -> tuple[Fraction, ...]:
    return tuple(x - math.floor(x) for x in v)


def verlinde_kernel_points(rank: int, B) -> VerlindeData:
    """Kernel of the isogeny t/Pi -> t*/Lambda given by B, i.e. B^{-1}Z^r / Z^r.

    With the Smith decomposition D = S B T the kernel is T D^{-1} Z^r mod Z^r.
    """
    B = _as_form(B)
    if len(B) != rank:
        raise FormError(f"form of size {len(B)} for rank {rank}")
    if any(x.denominator != 1 for row in B for x in row):
        raise FormError("form is not integral")
    M = sympy.Matrix([[int(x) for x in row] for row in B])
    if not M.is_symmetric() or not M.is_positive_definite:
        raise FormError("form is not symmetric positive definite")
    D, S, T = smith_normal_decomp(M, domain=sympy.ZZ)
    d = [int(D[i, i]) for i in range(rank)]
    Tm = [[int(T[i, j]) for j in range(rank)] for i in range(rank)]
    pts = set()
    for k in product(*(range(di) for di in d)):
        y = [Fraction(k[i], d[i]) for i in range(rank)]
        x = [sum(Tm[i][j] * y[j] for j in range(rank)) for i in range(rank)]
        pts.add(_reduce_mod1(x))
    det = int(frac_det(B))
    points = sorted(pts)
    return VerlindeData(B, points, len(points), det)


def _is_regular(rs: RootSystem, x) -> bool:
    for a in rs.positive_roots_weight:
        if sum(ai * xi for ai, xi in zip(a, x)).denominator == 1:
            return False
    return True


def _in_open_alcove(rs: RootSystem, x) -> bool:
    C = rs.cartan_matrix
    for i in range(rs.rank):
        if sum(C[i][j] * x[j] for j in range(rs.rank)) <= 0:
            return False
    theta = rs.root_weight(rs.highest_root)
    return sum(t * xi for t, xi in zip(theta, x)) < 1


def verlinde_classes_simple(rs: RootSystem, level: int) -> VerlindeData:
    """Verlinde points of a simply connected simple group at level ``level``.

    Kernel of the isogeny for B = (level + h^v) * basic form on the coroot
    lattice; regular points are grouped into Weyl orbits and each orbit is
    represented by its lift in the open fundamental alcove.  Singular
    kernel points are kept in ``points`` but flagged non-regular.
    """
    if rs.is_torus:
        raise FormError("use verlinde_kernel_points for a torus")
    if int(level) != level or level < 1:
        raise FormError(f"level must be a positive integer, got {level}")
    shift = level + rs.dual_coxeter
    B = tuple(tuple(shift * x for x in row) for row in rs.coroot_gram)
    vd = verlinde_kernel_points(rs.rank, B)
    vd.tag, vd.level = rs.tag, int(level)
    vd.regular = [_is_regular(rs, x) for x in vd.points]

    weyl = weyl_group_matrices(rs)
    seen: set[tuple[Fraction, ...]] = set()
    shifts = list(product((-1, 0, 1), repeat=rs.rank))
    for x, reg in zip(vd.points, vd.regular):
        if not reg or x in seen:
            continue
        orbit = set()
        rep = None
        for w in weyl:
            y = [sum(int(w[i, j]) * x[j] for j in range(rs.rank)) for i in range(rs.rank)]
            orbit.add(_reduce_mod1(y))
            for p in shifts:
                z = tuple(yi + pi for yi, pi in zip(y, p))
                if rep is None and _in_open_alcove(rs, z):
                    rep = z
        seen |= orbit
        if rep is None:
            raise FormError(f"no alcove representative for {x}")
        vd.representatives.append(rep)
        vd.orbit_sizes.append(len(orbit))
    order = sorted(range(len(vd.representatives)), key=lambda i: quad_form(B, vd.representatives[i], vd.representatives[i]))
    vd.representatives = [vd.representatives[i] for i in order]
    vd.orbit_sizes = [vd.orbit_sizes[i] for i in order]
    # B-dual of the representative is (lam + rho) for the level-k weight lam
    for x in vd.representatives:
        lr = [sum(B[i][j] * x[j] for j in range(rs.rank)) for i in range(rs.rank)]
        if any(v.denominator != 1 for v in lr):
            raise FormError("representative is not a kernel point")
        vd.labels.append(tuple(int(v) - r for v, r in zip(lr, rs.rho)))
    ribbon_phases(vd)
    return vd


def ribbon_phases(vd: VerlindeData, sheets=None) -> list[complex]:
    """exp(2 pi i W) at the critical point through each representative.

    W = -B(mu, mu)/2 is the critical value of the sheet whose critical point
    is the kernel point mu.  Raw phases, vacuum-normalized phases (the
    first representative, of smallest norm, is the vacuum) and the integer
    that clears all denominators are stored on ``vd``.
    """
    reps = vd.representatives or vd.points
    if sheets is not None:
        values = [PotentialSheet(s.lam, vd.form).critical_value for s in sheets]
    else:
        values = [-quad_form(vd.form, x, x) / 2 for x in reps]
    vd.critical_values = values
    vd.phases = [cmath.exp(2j * math.pi * float(w)) for w in values]
    if values:
        vd.normalized_phases = [cmath.exp(2j * math.pi * float(w - values[0])) for w in values]
        vd.rescale = math.lcm(*(w.denominator for w in values))
    return vd.phases
