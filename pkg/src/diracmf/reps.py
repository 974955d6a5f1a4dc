"""Explicit irreducible representations in an orthonormal compact basis.

Irreps are built from the highest-weight vector by the Chevalley lowering
operators.  Each weight space is orthonormalized with the contravariant
(Shapovalov) form, so the raising operators are the transposes of the
lowering ones and the compact real form acts by anti-hermitian matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache, cached_property

import numpy as np

from . import cache as irrep_cache
from .lie import (
    CartanVector,
    RootSystem,
    WeightVector,
    _check_same,
    basic_form,
    weight_norm2,
    weyl_dimension,
)

DEFAULT_DIM_CAP = 200


class RepresentationError(ValueError):
    pass


def weight_multiplicities(rs: RootSystem, lam: WeightVector) -> dict[tuple[int, ...], int]:
    """Weight multiplicities of V(lam) by Freudenthal's recursion (exact)."""
    if not lam.is_dominant:
        raise RepresentationError(f"weight {lam.coords} is not dominant")
    if rs.is_torus:
        return {lam.coords: 1}
    r = rs.rank
    lam_t = lam.coords
    rho = rs.rho
    top = weight_norm2(rs, [a + b for a, b in zip(lam_t, rho)])
    pos = rs.positive_roots_weight
    simple = [rs.root_weight(tuple(int(k == i) for k in range(r))) for i in range(r)]

    def form(a, b) -> Fraction:
        return basic_form(rs, WeightVector(rs, a), WeightVector(rs, b))

    heights = [sum(a) for a in rs.positive_roots]
    mult: dict[tuple[int, ...], int] = {lam_t: 1}
    frontier = [lam_t]
    d = 0
    while frontier:
        d += 1
        candidates = sorted(
            {tuple(x - y for x, y in zip(mu, a)) for mu in frontier for a in simple},
            reverse=True,
        )
        new = []
        for mu in candidates:
            num = Fraction(0)
            for a, h in zip(pos, heights):
                k = 1
                while d - k * h >= 0:
                    nu = tuple(x + k * y for x, y in zip(mu, a))
                    if nu in mult:
                        num += mult[nu] * form(nu, a)
                    k += 1
            num *= 2
            if num == 0:
                continue
            den = top - weight_norm2(rs, [x + y for x, y in zip(mu, rho)])
            if den == 0:
                raise RepresentationError("degenerate Freudenthal denominator")
            value = num / den
            assert value.denominator == 1 and value > 0
            mult[mu] = int(value)
            new.append(mu)
        frontier = new
    return mult


@dataclass(frozen=True)
class _Chevalley:
    """Raw Chevalley-generator matrices of one irrep."""

    weights: np.ndarray  # (N, r) integer
    raising: np.ndarray  # (r, N, N) real, e_i; f_i = e_i^T


def _build_chevalley(rs: RootSystem, lam: tuple[int, ...], tol: float = 1e-10) -> _Chevalley:
    r = rs.rank
    C = rs.cartan_matrix
    simple = [tuple(C[i]) for i in range(r)]
    # per weight: basis size; lowering blocks F[(i, mu)] : V_{mu + a_i} -> V_mu
    size: dict[tuple[int, ...], int] = {lam: 1}
    lower: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}
    layers = [[lam]]

    def add(mu, a):
        return tuple(x + y for x, y in zip(mu, a))

    def sub(mu, a):
        return tuple(x - y for x, y in zip(mu, a))

    def raise_block(i, mu):
        """e_i : V_mu -> V_{mu + a_i} (transpose of the lowering block)."""
        return lower[(i, mu)].T

    while layers[-1]:
        candidates = sorted({sub(nu, simple[i]) for nu in layers[-1] for i in range(r)}, reverse=True)
        layer = []
        for mu in candidates:
            if mu in size:
                continue
            # spanning set f_i b_k for b_k in the ONB of V_{mu + a_i}
            labels = [(i, k) for i in range(r) if add(mu, simple[i]) in size for k in range(size[add(mu, simple[i])])]
            K = len(labels)
            gram = np.zeros((K, K))
            for p, (i, k) in enumerate(labels):
                ui = add(mu, simple[i])
                for q, (j, l) in enumerate(labels):
                    uj = add(mu, simple[j])
                    # <b_k, e_i f_j b_l> = <b_k, f_j e_i b_l> + delta_ij <b_k, h_i b_l>
                    val = 0.0
                    top = add(uj, simple[i])
                    if top in size:
                        val = (lower[(j, ui)] @ raise_block(i, uj))[k, l]
                    if i == j and k == l:
                        val += ui[i]
                    gram[p, q] = val
            gram = 0.5 * (gram + gram.T)
            s, U = np.linalg.eigh(gram)
            keep = s > tol * max(1.0, s.max(initial=0.0))
            s, U = s[keep], U[:, keep]
            m = int(keep.sum())
            if m == 0:
                continue
            # deterministic sign: largest-magnitude component of each vector positive
            for c in range(m):
                idx = np.argmax(np.abs(U[:, c]) > 1e-8)
                if U[idx, c] < 0:
                    U[:, c] = -U[:, c]
            size[mu] = m
            # <v_m, f_i b_k> = sqrt(s_m) U[(i,k), m]
            coeff = (U * np.sqrt(s)).T  # (m, K)
            for i in range(r):
                up = add(mu, simple[i])
                if up in size:
                    cols = [p for p, (ii, _) in enumerate(labels) if ii == i]
                    lower[(i, mu)] = coeff[:, cols]
            layer.append(mu)
        layers.append(layer)

    order = [mu for layer in layers for mu in layer]
    offset = {}
    n = 0
    for mu in order:
        offset[mu] = n
        n += size[mu]
    weights = np.zeros((n, r), dtype=int)
    for mu in order:
        weights[offset[mu] : offset[mu] + size[mu]] = mu
    E = np.zeros((r, n, n))
    for (i, mu), block in lower.items():
        up = add(mu, simple[i])
        a, b = offset[mu], offset[up]
        E[i, b : b + size[up], a : a + size[mu]] = block.T
    return _Chevalley(weights, E)


def _root_words(rs: RootSystem) -> list[tuple[int, ...]]:
    """For each positive root, the simple indices i_1..i_k with
    E = [e_{i_k}, [..., [e_{i_2}, e_{i_1}]]]."""
    roots = list(rs.positive_roots)
    known = set(roots)
    words: dict[tuple[int, ...], tuple[int, ...]] = {}
    for a in roots:
        if sum(a) == 1:
            words[a] = (a.index(1),)
            continue
        for i in range(rs.rank):
            b = tuple(x - int(k == i) for k, x in enumerate(a))
            if b in known:
                words[a] = words[b] + (i,)
                break
    return [words[a] for a in roots]


def _raw_compact(rs: RootSystem, ch: _Chevalley) -> np.ndarray:
    """Compact spanning set: i h_j, then E_a - E_a^+, i(E_a + E_a^+) per root."""
    r = rs.rank
    E = ch.raising
    out = [1j * np.diag(ch.weights[:, j]).astype(complex) for j in range(r)]
    for word in _root_words(rs):
        X = E[word[0]]
        for i in word[1:]:
            X = E[i] @ X - X @ E[i]
        out.append(X - X.T)
        out.append(1j * (X + X.T))
    return np.array(out, dtype=complex)


@dataclass(frozen=True)
class CompactBasis:
    """Orthonormal compact basis, as coefficients over the raw spanning set."""

    rs: RootSystem
    coeffs: np.ndarray  # (dim, dim) real: xi_a = sum_s coeffs[a, s] raw_s
    cartan_coords: np.ndarray  # (dim, r): mu^a = cartan_coords @ x
    structure_constants: np.ndarray  # (dim, dim, dim)


@cache
def _compact_basis_cached(tag: str) -> CompactBasis:
    from .lie import build_root_system

    rs = build_root_system(tag)
    theta = rs.root_weight(rs.highest_root)
    ch = _build_chevalley(rs, theta)
    raw = _raw_compact(rs, ch)
    n = len(raw)
    if n != rs.dim or ch.weights.shape[0] != rs.dim:
        raise RepresentationError("adjoint construction has the wrong dimension")
    # basic form = -tr_ad(XY) / (2 h^v) on the compact form
    gram = -np.einsum("aij,bji->ab", raw, raw).real / (2 * rs.dual_coxeter)
    L = np.linalg.cholesky(gram)
    coeffs = np.linalg.inv(L)
    xi = np.einsum("as,sij->aij", coeffs, raw)
    comm = np.einsum("aij,bjk->abik", xi, xi)
    comm = comm - comm.transpose(1, 0, 2, 3)
    f = -np.einsum("abij,cji->abc", comm, xi).real / (2 * rs.dual_coxeter)
    cartan_coords = (coeffs @ gram)[:, : rs.rank]
    return CompactBasis(rs, coeffs, cartan_coords, f)


def compact_basis(rs: RootSystem) -> CompactBasis:
    if rs.is_torus:
        raise RepresentationError("compact basis of a torus is its coroot frame")
    return _compact_basis_cached(rs.tag)


def _torus_frame(rs: RootSystem) -> np.ndarray:
    """Coroot coordinates of an orthonormal basis of a torus Lie algebra.

    Returns the (r, r) matrix P with mu^a = P @ x for mu = sum x_j a_j^v.
    """
    return np.linalg.cholesky(rs.coroot_gram_np).T


def cartan_coordinates(rs: RootSystem, mu: CartanVector) -> np.ndarray:
    """Components mu^a of a Cartan point in the orthonormal basis."""
    _check_same(rs, mu.rs)
    if rs.is_torus:
        return _torus_frame(rs) @ mu.real
    return compact_basis(rs).cartan_coords @ mu.real


@dataclass(frozen=True, eq=False)
class IrrepMatrices:
    rs: RootSystem
    highest_weight: WeightVector
    weights: np.ndarray  # (N, r) integer labels per basis vector
    raising: np.ndarray  # (r, N, N) Chevalley e_i in the orthonormal basis
    _T: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    @property
    def T(self) -> np.ndarray:
        """(dim g, N, N) anti-hermitian matrices T(xi_a)."""
        return self._T

    @cached_property
    def casimir_value(self) -> Fraction:
        lam = self.highest_weight
        two_rho = WeightVector(self.rs, tuple(2 * c for c in self.rs.rho))
        return basic_form(self.rs, lam, lam + two_rho)

    @cached_property
    def lam_rho_norm2(self) -> Fraction:
        """||lam + rho||^2 in exact arithmetic."""
        lam = self.highest_weight
        return weight_norm2(self.rs, [a + b for a, b in zip(lam.coords, self.rs.rho)])


def _torus_irrep(rs: RootSystem, lam: WeightVector) -> IrrepMatrices:
    P = _torus_frame(rs)
    # the weight pairs with the basis vector xi_a = sum_j (P^{-1})_{ja} a_j^v
    pair = np.asarray(lam.coords, dtype=float) @ np.linalg.inv(P)
    T = (1j * pair).reshape(rs.rank, 1, 1).astype(complex)
    return IrrepMatrices(rs, lam, np.array([lam.coords]), np.zeros((rs.rank, 1, 1)), T)


def irrep_matrices(
    rs: RootSystem,
    lam: WeightVector,
    dim_cap: int = DEFAULT_DIM_CAP,
    use_cache: bool = True,
) -> IrrepMatrices:
    """Matrices of an orthonormal compact basis acting on V(lam).

    A torus "irrep" is the one-dimensional character ``lam`` (any sign).
    """
    _check_same(rs, lam.rs)
    if rs.is_torus:
        return _torus_irrep(rs, lam)
    if not lam.is_dominant:
        raise RepresentationError(f"weight {lam.coords} is not dominant")
    expected = weyl_dimension(rs, lam.coords)
    if expected > dim_cap:
        raise RepresentationError(f"dimension {expected} exceeds cap {dim_cap}")
    ch = irrep_cache.load(rs.tag, lam.coords) if use_cache else None
    if ch is None:
        ch = _build_chevalley(rs, lam.coords)
        if use_cache:
            irrep_cache.store(rs.tag, lam.coords, ch.weights, ch.raising)
    else:
        ch = _Chevalley(*ch)
    if ch.weights.shape[0] != expected:
        raise RepresentationError(
            f"constructed dimension {ch.weights.shape[0]} != Weyl dimension {expected}"
        )
    cb = compact_basis(rs)
    raw = _raw_compact(rs, ch)
    T = np.einsum("as,sij->aij", cb.coeffs, raw)
    return IrrepMatrices(rs, lam, ch.weights, ch.raising, T)


def cartan_action(rep: IrrepMatrices, mu: CartanVector) -> np.ndarray:
    """T(mu) = sum_a mu^a T(xi_a); eigenvalue i<nu, mu> on weight nu."""
    _check_same(rep.rs, mu.rs)
    return lie_action(rep, cartan_coordinates(rep.rs, mu))


def lie_action(rep: IrrepMatrices, coords: np.ndarray) -> np.ndarray:
    """Action of the Lie algebra element with orthonormal components ``coords``."""
    return np.einsum("a,aij->ij", coords, rep.T[: len(coords)])
