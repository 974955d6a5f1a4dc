"""Kostant's cubic Dirac operator and the Dirac family over the Cartan.

The Clifford sign, the cubic coefficient and the sign of the mu-action in
the square identity are not assumed: :func:`calibrate` picks the unique
combination from a finite candidate set for which the identity

    D_mu^2 = -||lam + rho||^2 - ||mu||^2 + 2i T(mu)

holds, where T(mu) is the diagonal action of mu on V (x) S.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache, cached_property

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from .clifford import SpinorModule, clifford_vector, spinor_module
from .lie import (
    CartanVector,
    RootSystem,
    WeightVector,
    _check_same,
    build_root_system,
    weight_to_cartan,
    weyl_group_matrices,
)
from .reps import IrrepMatrices, cartan_action, cartan_coordinates, irrep_matrices

KERNEL_TOL = 1e-8
SQUARE_TOL = 1e-9

KAPPA_CANDIDATES = (1, -1)
CUBIC_CANDIDATES = (Fraction(1, 6), Fraction(-1, 6), Fraction(1, 12), Fraction(-1, 12))
TSIGN_CANDIDATES = (1, -1)


class CalibrationError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Calibration:
    kappa: int
    cubic: Fraction
    t_sign: int

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "cubic": f"{self.cubic.numerator}/{self.cubic.denominator}",
            "t_sign": self.t_sign,
        }


@dataclass(frozen=True, eq=False)
class DiracFamily:
    rep: IrrepMatrices
    spinors: SpinorModule
    calibration: Calibration
    D0: sp.csr_matrix = field(repr=False)

    @property
    def rs(self) -> RootSystem:
        return self.rep.rs

    @property
    def dim(self) -> int:
        return self.D0.shape[0]

    @cached_property
    def grading(self) -> sp.csr_matrix | None:
        G = self.spinors.chirality
        if G is None:
            return None
        return sp.kron(sp.identity(self.rep.dim, format="csr"), sp.csr_matrix(G), format="csr")

    @property
    def scalar(self) -> Fraction:
        """||lam + rho||^2, exact."""
        return self.rep.lam_rho_norm2

    def total_action(self, mu: CartanVector) -> sp.csr_matrix:
        """Diagonal mu-action on V (x) S."""
        coords = cartan_coordinates(self.rs, mu)
        TV = cartan_action(self.rep, mu)
        if self.rs.is_torus:
            TS = np.zeros((self.spinors.dim,) * 2, dtype=complex)
        else:
            TS = np.einsum("a,aij->ij", coords, self.spinors.spin_action)
        return (
            sp.kron(sp.csr_matrix(TV), sp.identity(self.spinors.dim), format="csr")
            + sp.kron(sp.identity(self.rep.dim), sp.csr_matrix(TS), format="csr")
        ).tocsr()

    def clifford_term(self, mu: CartanVector) -> sp.csr_matrix:
        """Id (x) psi(mu)."""
        return sp.kron(
            sp.identity(self.rep.dim, format="csr"),
            sp.csr_matrix(clifford_vector(self.spinors, mu)),
            format="csr",
        )


def _cubic_clifford(sm: SpinorModule) -> np.ndarray:
    """sum_abc f_abc psi_a psi_b psi_c = -4 kappa sum_a psi_a sigma(xi_a)."""
    return -4 * sm.kappa * (sm.psi @ sm.spin_action).sum(axis=0)


def _assemble(rep: IrrepMatrices, sm: SpinorModule, cal: Calibration) -> DiracFamily:
    _check_same(rep.rs, sm.rs)
    if sm.kappa != cal.kappa:
        raise CalibrationError(f"spinor module has kappa={sm.kappa}, calibration {cal.kappa}")
    D0 = sp.csr_matrix((rep.dim * sm.dim,) * 2, dtype=complex)
    for a in range(rep.T.shape[0]):
        Ta = rep.T[a]
        if not np.any(Ta):
            continue
        D0 = D0 + sp.kron(sp.csr_matrix(Ta), sp.csr_matrix(sm.psi[a]), format="csr")
    if not rep.rs.is_torus:
        cubic = float(cal.cubic) * _cubic_clifford(sm)
        D0 = D0 + sp.kron(sp.identity(rep.dim), sp.csr_matrix(cubic), format="csr")
    D0 = D0.tocsr()
    D0.eliminate_zeros()
    return DiracFamily(rep, sm, cal, D0)


def cubic_dirac(
    rep: IrrepMatrices,
    sm: SpinorModule | None = None,
    calibration: Calibration | None = None,
) -> DiracFamily:
    """D_0 = sum_a T(xi_a) (x) psi(xi^a) + c3 Id (x) sum f_abc psi^a psi^b psi^c."""
    if calibration is None:
        calibration = calibrate(rep.rs) if not rep.rs.is_torus else calibrate(build_root_system("A1"))
    if sm is None:
        sm = spinor_module(rep.rs, calibration.kappa)
    return _assemble(rep, sm, calibration)


def dirac_at(df: DiracFamily, mu: CartanVector) -> sp.csr_matrix:
    """D_mu = D_0 + i Id (x) psi(mu)."""
    _check_same(df.rs, mu.rs)
    return (df.D0 + 1j * df.clifford_term(mu)).tocsr()


def _max_abs(m) -> float:
    if sp.issparse(m):
        m = m.tocoo()
        return float(np.abs(m.data).max()) if m.nnz else 0.0
    return float(np.abs(m).max()) if m.size else 0.0


def square_identity_target(df: DiracFamily, mu: CartanVector) -> sp.csr_matrix:
    scalar = -float(df.scalar) - float(mu.norm2())
    return (
        scalar * sp.identity(df.dim, format="csr", dtype=complex)
        + 2j * df.calibration.t_sign * df.total_action(mu)
    ).tocsr()


def verify_square_identity(df: DiracFamily, mu: CartanVector) -> float:
    """max |D_mu^2 - (-||lam+rho||^2 - ||mu||^2 + 2i T(mu))|."""
    D = dirac_at(df, mu)
    return _max_abs(D @ D - square_identity_target(df, mu))


def d0_scalar_residual(df: DiracFamily) -> float:
    """Distance of D_0^2 from -||lam+rho||^2 Id."""
    D2 = df.D0 @ df.D0
    return _max_abs(D2 + float(df.scalar) * sp.identity(df.dim, format="csr"))


def random_cartan(rs: RootSystem, rng: np.random.Generator, max_norm: float = 10.0) -> CartanVector:
    """Uniform direction, norm uniform in [0, max_norm]."""
    P = np.linalg.cholesky(rs.coroot_gram_np).T  # orthonormal coords = P @ x
    v = rng.normal(size=rs.rank)
    v *= rng.uniform(0, max_norm) / np.linalg.norm(v)
    return CartanVector(rs, np.linalg.solve(P, v))


def _calibration_checks(rs: RootSystem, cal: Calibration, rng_seed: int = 1) -> float:
    rng = np.random.default_rng(rng_seed)
    sm = spinor_module(rs, cal.kappa)
    worst = 0.0
    fundamental = tuple(int(i == 0) for i in range(rs.rank))
    for lam in ((0,) * rs.rank, fundamental):
        rep = irrep_matrices(rs, WeightVector(rs, lam))
        df = _assemble(rep, sm, cal)
        worst = max(worst, d0_scalar_residual(df))
        for _ in range(5):
            worst = max(worst, verify_square_identity(df, random_cartan(rs, rng, 3.0)))
    return worst


@cache
def _calibrate_tag(tag: str) -> tuple[Calibration, tuple[tuple[Calibration, float], ...]]:
    rs = build_root_system(tag)
    table = []
    for kappa, cubic, tsign in itertools.product(KAPPA_CANDIDATES, CUBIC_CANDIDATES, TSIGN_CANDIDATES):
        cal = Calibration(kappa, cubic, tsign)
        table.append((cal, _calibration_checks(rs, cal)))
    passing = [cal for cal, res in table if res <= SQUARE_TOL]
    if len(passing) != 1:
        raise CalibrationError(
            f"no consistent convention for {tag}: {len(passing)} of {len(table)} candidates pass"
        )
    return passing[0], tuple(table)


def calibrate(rs: RootSystem) -> Calibration:
    """Unique (kappa, cubic coefficient, T-sign) making the square identity hold."""
    if rs.is_torus:
        raise PreconditionError("calibration needs a simple root system")
    return _calibrate_tag(rs.tag)[0]


def calibration_table(rs: RootSystem) -> list[tuple[Calibration, float]]:
    """Worst residual of every candidate convention."""
    if rs.is_torus:
        raise PreconditionError("calibration needs a simple root system")
    return list(_calibrate_tag(rs.tag)[1])


def singular_values(D) -> np.ndarray:
    """Singular values of D_mu, ascending.

    D_mu is anti-hermitian in the calibrated convention, so they are the
    moduli of the eigenvalues of the hermitian matrix i D_mu.
    """
    A = D.toarray() if sp.issparse(D) else np.asarray(D)
    H = 1j * A
    if np.abs(H - H.conj().T).max() <= 1e-10 * max(1.0, np.abs(H).max()):
        return np.sort(np.abs(np.linalg.eigvalsh(0.5 * (H + H.conj().T))))
    return np.sort(np.linalg.svd(A, compute_uv=False))


def sigma_min(df: DiracFamily, mu: CartanVector) -> float:
    return float(singular_values(dirac_at(df, mu))[0])


def predicted_kernel_points(df: DiracFamily) -> list[CartanVector]:
    """Weyl orbit of -t_sign (lam + rho)#.

    On a weight nu of V (x) S with ||nu|| = ||lam + rho|| the square is
    -||nu + t_sign mu||^2, so the kernel sits at mu = -t_sign nu#.  The
    opposite sign gives the same orbit only for self-dual V.
    """
    rs = df.rs
    lr = WeightVector(rs, tuple(a + b for a, b in zip(df.rep.highest_weight.coords, rs.rho)))
    base = weight_to_cartan(rs, lr)
    x = -df.calibration.t_sign * np.array([float(c) for c in base.coords])
    if rs.is_torus:
        pts = [x]
    else:
        pts = [w @ x for w in weyl_group_matrices(rs)]
    uniq: list[np.ndarray] = []
    for p in pts:
        if not any(np.allclose(p, q, atol=1e-12) for q in uniq):
            uniq.append(p)
    return [CartanVector(rs, p) for p in uniq]


@dataclass
class KernelScan:
    ray: np.ndarray
    grid: np.ndarray
    sigma: np.ndarray
    refined_s: float
    refined_sigma: float
    refinement_step: float
    predicted_s: list[float]
    kernel_dim: int
    kernel_dim_square: int

    def to_json(self) -> dict:
        return {
            "ray": [float(x) for x in self.ray],
            "points": [{"s": float(s), "sigma_min": float(v)} for s, v in zip(self.grid, self.sigma)],
            "refined": {"s": self.refined_s, "sigma_min": self.refined_sigma, "step": self.refinement_step},
            "predicted_s": self.predicted_s,
            "kernel_dim": self.kernel_dim,
            "kernel_dim_square": self.kernel_dim_square,
        }


def _scan_values(df, ray, grid, workers):
    def one(s):
        return sigma_min(df, ray * float(s))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return np.array(list(ex.map(one, grid)))
    return np.array([one(s) for s in grid])


def kernel_dimension(df: DiracFamily, mu: CartanVector, tol: float = KERNEL_TOL) -> tuple[int, int]:
    """Kernel dimension from singular values, and from the zero eigenvalues
    of -D_mu^2 computed by a separate hermitian eigensolve."""
    D = dirac_at(df, mu)
    n_sv = int(np.sum(singular_values(D) < tol))
    M = -(D @ D).toarray()
    ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    n_sq = int(np.sum(np.abs(ev) < tol))
    return n_sv, n_sq


def kernel_locus_scan(
    df: DiracFamily,
    ray: CartanVector,
    grid,
    rounds: int = 3,
    polish: bool = True,
    workers: int | None = None,
) -> KernelScan:
    """Smallest singular value of D_{s ray} over ``grid``, refined near the minimum.

    Each refinement round replaces the bracket around the current minimizer
    by a grid 10x finer; a golden-section search then polishes the minimizer.
    """
    _check_same(df.rs, ray.rs)
    if not np.any(ray.real):
        raise PreconditionError("zero ray")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(grid <= 0):
        raise PreconditionError("grid must be at least two positive values")
    sig = _scan_values(df, ray, grid, workers)
    k = int(np.argmin(sig))
    best_s, best_sig = float(grid[k]), float(sig[k])
    step = float(np.max(np.diff(np.sort(grid))))
    for _ in range(rounds):
        fine = np.linspace(best_s - step, best_s + step, 21)
        fine = fine[fine > 0]
        vals = _scan_values(df, ray, fine, workers)
        j = int(np.argmin(vals))
        if vals[j] <= best_sig:
            best_s, best_sig = float(fine[j]), float(vals[j])
        step /= 10
    if polish:
        lo, hi = max(best_s - step, 1e-300), best_s + step
        f = lambda s: sigma_min(df, ray * float(s))  # noqa: E731
        if f(lo) > best_sig and f(hi) > best_sig:
            res = minimize_scalar(f, bracket=(lo, best_s, hi), method="golden", tol=1e-15)
            if res.fun <= best_sig:
                best_s, best_sig = float(res.x), float(res.fun)

    norm = np.sqrt(float(ray.norm2()))
    predicted = []
    u = ray.real / norm
    for p in predicted_kernel_points(df):
        # on the ray iff p is a positive multiple of u
        s = float(np.sqrt(float(p.norm2())))
        if s > 0 and np.allclose(p.real / s * norm, ray.real, atol=1e-9) and np.dot(p.real, u) > 0:
            predicted.append(s / norm)
    kd = kernel_dimension(df, ray * best_s) if best_sig < KERNEL_TOL else (0, 0)
    return KernelScan(ray.real, grid, sig, best_s, best_sig, step, sorted(predicted), kd[0], kd[1])


@dataclass(frozen=True)
class VanishingCertificate:
    value: float
    exact_value: Fraction
    scalar_residual: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "exact_value": f"{self.exact_value.numerator}/{self.exact_value.denominator}",
            "scalar_residual": self.scalar_residual,
            "pass": self.passed,
        }


def vanishing_certificate(
    rep: IrrepMatrices, df: DiracFamily, mu_central: CartanVector, tol: float = SQUARE_TOL
) -> VanishingCertificate:
    """Check that D_mu^2 is the negative scalar -||lam + mu + rho||^2.

    A negative scalar square makes D_mu invertible, which contracts the
    localized category at a singular point to zero.
    """
    rs = rep.rs
    if rs.is_torus:
        raise PreconditionError("no nonabelian centralizer for a torus")
    if df.rep is not rep:
        raise PreconditionError("Dirac family built on a different representation")
    if np.any(np.abs(mu_central.real) > 0):
        # the center of a simple Lie algebra is zero
        raise PreconditionError("mu is not central: D_mu^2 is not a scalar")
    D = dirac_at(df, mu_central)
    exact = -(rep.lam_rho_norm2)
    residual = _max_abs(D @ D - float(exact) * sp.identity(df.dim, format="csr"))
    return VanishingCertificate(float(exact), exact, residual, residual <= tol and exact < 0)
