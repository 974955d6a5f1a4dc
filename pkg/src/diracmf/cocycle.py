"""Fourier-truncated model of the path-group action on the extended loop algebra.

A path gamma(t) = exp(t mu_1) ... exp(t mu_m), t in [0, 2 pi], acts on
x + alpha in iR + (loops in g) by

    gamma.(x + alpha) = x - (i / 2pi) int <gamma^{-1} dgamma | alpha> dt  +  Ad_gamma(alpha).

Lie algebra elements are real coordinate vectors in an orthonormal basis,
so the invariant form is the dot product.  Loops are Fourier polynomials
with modes -M..M; integrals use the closed trapezoid rule on Q + 1 nodes,
which is exact for trigonometric polynomials of degree below Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.linalg import expm

from .lie import CartanVector, RootSystem, _check_same, basic_form
from .reps import cartan_coordinates

REALITY_TOL = 1e-12
DEFAULT_RESIDUAL_BOUND = 1e-8


class QuadratureError(ValueError):
    pass


class LogarithmError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LoopAlgebra:
    """Finite-dimensional g with orthonormal basis and structure constants."""

    name: str
    f: np.ndarray  # (n, n, n), [x_a, x_b] = sum_c f_abc x_c

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    def ad(self, mu: np.ndarray) -> np.ndarray:
        """Matrix of ad_mu on coordinates: (ad_mu)_{cb} = sum_a mu_a f_abc."""
        return np.einsum("a,abc->cb", mu, self.f)


def loop_algebra(rs: RootSystem) -> LoopAlgebra:
    """The full (compact) Lie algebra of ``rs``."""
    return LoopAlgebra(rs.tag, np.asarray(rs.structure_constants, dtype=float))


def cartan_loop_algebra(rs: RootSystem) -> LoopAlgebra:
    """The abelian Cartan subalgebra, in orthonormal coordinates."""
    return LoopAlgebra(f"{rs.tag}-cartan", np.zeros((rs.rank,) * 3))


def abelian_loop_algebra(n: int = 1) -> LoopAlgebra:
    return LoopAlgebra(f"u1^{n}", np.zeros((n,) * 3))


@dataclass(frozen=True, eq=False)
class FourierLoop:
    """alpha(t) = sum_{n=-M}^{M} c_n e^{int}, with c_{-n} = conj(c_n)."""

    coeffs: np.ndarray  # (2M + 1, dim) complex, row k <-> mode k - M

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] % 2 != 1:
            raise ValueError("coefficients must have shape (2M + 1, dim)")
        object.__setattr__(self, "coeffs", c)

    @property
    def M(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def mode(self, n: int) -> np.ndarray:
        return self.coeffs[n + self.M]

    @property
    def reality_residual(self) -> float:
        c = self.coeffs
        return float(np.abs(c - c[::-1].conj()).max())

    @property
    def is_real(self) -> bool:
        return self.reality_residual <= REALITY_TOL

    def __call__(self, t) -> np.ndarray:
        """Values at times ``t``; shape (len(t), dim), real part."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = np.arange(-self.M, self.M + 1)
        return (np.exp(1j * np.outer(t, n)) @ self.coeffs).real

    def __sub__(self, other: "FourierLoop") -> "FourierLoop":
        return FourierLoop(self.coeffs - other.coeffs)

    @classmethod
    def zero(cls, M: int, dim: int) -> "FourierLoop":
        return cls(np.zeros((2 * M + 1, dim), dtype=complex))

    @classmethod
    def random(cls, M: int, dim: int, rng: np.random.Generator, decay: float = 1.0) -> "FourierLoop":
        c = np.zeros((2 * M + 1, dim), dtype=complex)
        c[M] = rng.normal(size=dim)
        for n in range(1, M + 1):
            z = (rng.normal(size=dim) + 1j * rng.normal(size=dim)) * math.exp(-decay * n)
            c[M + n] = z
            c[M - n] = z.conj()
        return cls(c)


@dataclass(frozen=True, eq=False)
class ExtendedLoopVector:
    x: complex
    alpha: FourierLoop


@dataclass(frozen=True, eq=False)
class PathElement:
    """gamma(t) = exp(t mu_1) exp(t mu_2) ... exp(t mu_m); gamma(0) = 1."""

    algebra: LoopAlgebra
    generators: tuple[np.ndarray, ...] = ()

    @classmethod
    def one_parameter(cls, algebra: LoopAlgebra, mu) -> "PathElement":
        mu = np.asarray(mu, dtype=float)
        if mu.shape != (algebra.dim,):
            raise ValueError(f"generator of shape {mu.shape} for a {algebra.dim}-dimensional algebra")
        return cls(algebra, (mu,))

    def __mul__(self, other: "PathElement") -> "PathElement":
        if other.algebra is not self.algebra:
            raise ValueError("paths in different algebras")
        return PathElement(self.algebra, self.generators + other.generators)

    def adjoint(self, t: float) -> np.ndarray:
        """Ad_{gamma(t)} as a matrix on coordinates."""
        A = np.eye(self.algebra.dim)
        for mu in self.generators:
            A = A @ expm(t * self.algebra.ad(mu))
        return A

    def log_derivative(self, t: float) -> np.ndarray:
        """gamma(t)^{-1} gamma'(t) = sum_k Ad_{(g_{k+1} ... g_m)^{-1}} mu_k."""
        out = np.zeros(self.algebra.dim)
        tail = np.eye(self.algebra.dim)  # Ad of (g_{k+1} ... g_m)^{-1}
        for mu in reversed(self.generators):
            out += tail @ mu
            tail = tail @ expm(-t * self.algebra.ad(mu))
        return out

    def identity_residual(self) -> float:
        return float(np.abs(self.adjoint(0.0) - np.eye(self.algebra.dim)).max())


def _nodes(Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed trapezoid nodes on [0, 2pi] and weights."""
    t = np.linspace(0.0, 2 * math.pi, Q + 1)
    w = np.full(Q + 1, 2 * math.pi / Q)
    w[0] = w[-1] = math.pi / Q
    return t, w


def _project(values: np.ndarray, t: np.ndarray, w: np.ndarray, M: int) -> np.ndarray:
    """Fourier coefficients (1/2pi) int f e^{-int} dt for |n| <= M."""
    n = np.arange(-M, M + 1)
    basis = np.exp(-1j * np.outer(n, t)) * w / (2 * math.pi)
    return basis @ values


@dataclass
class ActionResult:
    value: ExtendedLoopVector
    truncation_residual: float
    warning: bool


def central_term(gamma: PathElement, alpha: FourierLoop, Q: int) -> complex:
    """-(i / 2pi) int <gamma^{-1} dgamma | alpha> dt."""
    t, w = _nodes(Q)
    a = alpha(t)
    g = np.array([gamma.log_derivative(s) for s in t])
    return complex(-1j / (2 * math.pi) * np.sum(w * np.einsum("ja,ja->j", g, a)))


def loop_action(
    gamma: PathElement,
    v: ExtendedLoopVector,
    Q: int | None = None,
    residual_bound: float = DEFAULT_RESIDUAL_BOUND,
) -> ActionResult:
    """Apply the path ``gamma`` to ``v``, truncating the loop back to M modes.

    The truncation residual is the RMS over the nodes of the part of
    Ad_gamma(alpha) not captured by modes -M..M; a residual above
    ``residual_bound`` sets ``warning``.
    """
    alpha = v.alpha
    M = alpha.M
    if alpha.dim != gamma.algebra.dim:
        raise ValueError("loop and path live in different algebras")
    if Q is None:
        Q = 4 * M + 8
    if Q < 4 * M + 8:
        raise QuadratureError(f"quadrature order {Q} below 4M + 8 = {4 * M + 8}")
    t, w = _nodes(Q)
    a = alpha(t)
    adj = np.array([gamma.adjoint(s) for s in t])
    logd = np.array([gamma.log_derivative(s) for s in t])
    x = v.x - 1j / (2 * math.pi) * np.sum(w * np.einsum("ja,ja->j", logd, a))
    moved = np.einsum("jab,jb->ja", adj, a)
    coeffs = _project(moved, t, w, M)
    # restore exact reality lost to rounding
    coeffs = 0.5 * (coeffs + coeffs[::-1].conj())
    new = FourierLoop(coeffs)
    resid = float(np.sqrt(np.mean(np.sum((moved - new(t)) ** 2, axis=1))))
    return ActionResult(ExtendedLoopVector(complex(x), new), resid, resid > residual_bound)


def action_law_residual(
    g1: PathElement, g2: PathElement, v: ExtendedLoopVector, Q: int | None = None
) -> float:
    """max difference between g1.(g2.v) and (g1 g2).v."""
    a = loop_action(g1, loop_action(g2, v, Q).value, Q).value
    b = loop_action(g1 * g2, v, Q).value
    return max(abs(a.x - b.x), float(np.abs(a.alpha.coeffs - b.alpha.coeffs).max()))


def cocycle_additivity_residual(g1: PathElement, g2: PathElement, alpha: FourierLoop, Q: int | None = None) -> float:
    """c(g1 g2, alpha) - c(g2, alpha) - c(g1, Ad_{g2} alpha), untruncated.

    Evaluated pointwise on the nodes, so only quadrature error remains.
    """
    if Q is None:
        Q = 4 * alpha.M + 8
    t, w = _nodes(Q)
    a = alpha(t)

    def c(gamma, values):
        logd = np.array([gamma.log_derivative(s) for s in t])
        return -1j / (2 * math.pi) * np.sum(w * np.einsum("ja,ja->j", logd, values))

    moved = np.einsum("jab,jb->ja", np.array([g2.adjoint(s) for s in t]), a)
    return float(abs(c(g1 * g2, a) - c(g2, a) - c(g1, moved)))


def extension_cocycle(alpha: FourierLoop, beta: FourierLoop) -> complex:
    """omega(alpha, beta) = (i / 2pi) int <alpha, beta'> dt, from coefficients.

    The integral collapses to -sum_n n <a_{-n}, b_n>; imaginary for real loops.
    """
    if alpha.M != beta.M or alpha.dim != beta.dim:
        raise ValueError("loops have different truncations")
    M = alpha.M
    n = np.arange(-M, M + 1)
    return complex(-np.sum(n * np.einsum("ka,ka->k", alpha.coeffs[::-1], beta.coeffs)))


# local super-potential


@dataclass
class LocalPotential:
    mu: CartanVector
    central_value: complex  # 2 pi i W, numerically
    lie_part: np.ndarray  # 2 pi mu, coroot coordinates
    potential_exact: Fraction | None  # W = ||mu||^2 / 2 when mu is rational
    truncation_M: int
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .exact import frac_str

        exact = self.mu.coords.dtype == object
        return {
            "mu": [frac_str(x) for x in self.mu.coords] if exact else [float(x) for x in self.mu.coords],
            "central_value": {"re": self.central_value.real, "im": self.central_value.imag},
            "potential_exact": frac_str(self.potential_exact) if self.potential_exact is not None else None,
            "lie_part": [float(x) for x in self.lie_part],
            "truncation_M": self.truncation_M,
            "residuals": dict(sorted(self.residuals.items())),
        }


def _check_logarithm(rs: RootSystem, mu: CartanVector, level_scale) -> None:
    """Reject mu unless 2 pi mu is the unique shortest logarithm and the
    centralizer of exp(2 pi mu) centralizes mu."""
    exact = mu.coords.dtype == object
    n0 = level_scale * mu.norm2()
    ties, shorter = [], []
    box = range(-2, 3)
    for p in product(box, repeat=rs.rank):
        if not any(p):
            continue
        shifted = CartanVector(rs, mu.coords + np.array(p, dtype=object if exact else float))
        n1 = level_scale * shifted.norm2()
        if (n1 == n0) if exact else abs(n1 - n0) <= 1e-12 * max(1.0, abs(n0)):
            ties.append(tuple(shifted.coords))
        elif n1 < n0:
            shorter.append(tuple(shifted.coords))
    if shorter:
        raise LogarithmError(f"2 pi mu is not a shortest logarithm; shorter: {shorter[:4]}")
    if ties:
        raise LogarithmError(f"shortest logarithm is not unique; tied candidates: {[tuple(mu.coords)] + ties}")
    if rs.is_torus:
        return
    # implied by uniqueness (<a, mu> = n != 0 makes mu - n a^v an equally short
    # logarithm) but kept as a guard for logarithms outside the search box
    for a in rs.positive_roots_weight:
        val = sum(ai * xi for ai, xi in zip(a, mu.coords))
        integral = (Fraction(val).denominator == 1) if exact else abs(val - round(val)) <= 1e-12
        if integral and val != 0:
            raise LogarithmError(
                "the centralizer of exp(2 pi mu) does not centralize mu; "
                "the continuity extension is not implemented"
            )


def _real_loop_basis(M: int, dim: int) -> list[FourierLoop]:
    """Constant, cos(nt) and sin(nt) loops along each basis direction."""
    out = []
    for a in range(dim):
        for n in range(M + 1):
            kinds = ("cos",) if n == 0 else ("cos", "sin")
            for kind in kinds:
                c = np.zeros((2 * M + 1, dim), dtype=complex)
                if n == 0:
                    c[M, a] = 1
                elif kind == "cos":
                    c[M + n, a] = c[M - n, a] = 0.5
                else:
                    c[M + n, a] = -0.5j
                    c[M - n, a] = 0.5j
                out.append(FourierLoop(c))
    return out


def local_superpotential(
    rs: RootSystem,
    mu: CartanVector,
    M: int = 8,
    Q: int | None = None,
    level_scale=1,
) -> LocalPotential:
    """Local super-potential at g = exp(2 pi mu) from the truncated cocycle model.

    The path h = exp(t mu) centralizes the paths in the torus, which
    trivializes the central extension there with W = 0.  On loops, the
    action of h instead trivializes it by the character
    chi(alpha) = -(i/2pi) int <mu|alpha> dt.  Extending chi by the same
    formula to paths and evaluating on log h = t mu measures the
    discrepancy between the two trivializations:

        2 pi i W(g) = -chi(t mu) (+) 2 pi mu = pi i ||mu||^2 (+) 2 pi mu.

    ``level_scale`` multiplies the basic form (the level of the gerbe).
    """
    _check_same(rs, mu.rs)
    _check_logarithm(rs, mu, level_scale)
    Q = 4 * M + 8 if Q is None else Q
    # scaled orthonormal coordinates: the dot product is the level form
    u = math.sqrt(float(level_scale)) * cartan_coordinates(rs, mu)[: rs.rank]
    h = PathElement.one_parameter(cartan_loop_algebra(rs), u)

    # character on the truncated loop algebra, read off from the action of h
    basis = _real_loop_basis(M, rs.rank)
    chi_loop = np.array([loop_action(h, ExtendedLoopVector(0j, b), Q).value.x for b in basis])

    t, w = _nodes(Q)

    def chi(values: np.ndarray) -> complex:
        """The same formula on any path in the Cartan, sampled at the nodes."""
        return complex(-1j / (2 * math.pi) * np.sum(w * (values @ u)))

    chi_ext = np.array([chi(b(t)) for b in basis])
    central = -chi(np.outer(t, u))  # log h = t mu

    exact = None
    if mu.coords.dtype == object:
        exact = Fraction(level_scale) * basic_form(rs, mu, mu) / 2
    norm2 = float(level_scale) * float(mu.norm2())
    residuals = {
        "extension_vs_action": float(np.abs(chi_loop - chi_ext).max()),
        "central_vs_formula": abs(central - 1j * math.pi * norm2),
    }
    return LocalPotential(mu, central, 2 * math.pi * mu.real, exact, M, residuals)
