"""Spinor modules for the Clifford algebra of (g, basic form)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .lie import CartanVector, RootSystem, _check_same
from .reps import cartan_coordinates

MAX_CLIFFORD_DIM = 15

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class CliffordError(ValueError):
    pass


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def hermitian_gammas(n: int) -> np.ndarray:
    """n hermitian matrices of size 2^(n//2) with {g_a, g_b} = 2 delta_ab.

    Jordan-Wigner ordering: pairs (Z..Z X 1..1, Z..Z Y 1..1), and for odd n
    the final generator is Z..Z.
    """
    m = n // 2
    out = []
    for k in range(m):
        head = [_Z] * k
        tail = [_I2] * (m - k - 1)
        out.append(_kron_all(head + [_X] + tail))
        out.append(_kron_all(head + [_Y] + tail))
    if n % 2:
        out.append(_kron_all([_Z] * m))
    return np.array(out, dtype=complex).reshape(n, 2**m, 2**m)


@dataclass(frozen=True, eq=False)
class SpinorModule:
    rs: RootSystem
    kappa: int
    psi: np.ndarray  # (n, S, S)

    @property
    def n(self) -> int:
        return self.psi.shape[0]

    @property
    def dim(self) -> int:
        return self.psi.shape[1]

    @property
    def graded(self) -> bool:
        return self.n % 2 == 0

    @cached_property
    def chirality(self) -> np.ndarray | None:
        """Grading operator (n even), else ``None``: the odd module is ungraded."""
        if not self.graded:
            return None
        return _kron_all([_Z] * (self.n // 2))

    @cached_property
    def spin_action(self) -> np.ndarray:
        """sigma(xi_a) = -(kappa/4) sum_bc f_abc psi_b psi_c.

        Satisfies [sigma(x), psi(y)] = psi([x, y]).
        """
        f = self.rs.structure_constants
        pp = self.psi[:, None] @ self.psi[None, :]
        return -(self.kappa / 4) * np.tensordot(f, pp, axes=([1, 2], [0, 1]))

    def to_json(self) -> dict:
        return {
            "tag": self.rs.tag,
            "kappa": self.kappa,
            "dim": self.dim,
            "generators": [
                {"re": g.real.tolist(), "im": g.imag.tolist()} for g in self.psi
            ],
        }


def spinor_module(rs: RootSystem, kappa: int = 1) -> SpinorModule:
    """Irreducible Clifford module with psi_a psi_b + psi_b psi_a = 2 kappa delta_ab."""
    if kappa not in (1, -1):
        raise CliffordError(f"kappa must be +1 or -1, got {kappa}")
    n = rs.dim
    if n > MAX_CLIFFORD_DIM:
        raise CliffordError(f"dimension too large: dim g = {n} > {MAX_CLIFFORD_DIM}")
    g = hermitian_gammas(n)
    psi = g if kappa == 1 else 1j * g
    return SpinorModule(rs, kappa, psi)


def clifford_vector(sm: SpinorModule, mu: CartanVector) -> np.ndarray:
    """psi(mu) = sum_a mu^a psi_a, with psi(mu)^2 = kappa ||mu||^2."""
    _check_same(sm.rs, mu.rs)
    coords = cartan_coordinates(sm.rs, mu)
    return np.einsum("a,aij->ij", coords, sm.psi[: len(coords)])


def anticommutator_residual(sm: SpinorModule) -> float:
    psi = sm.psi
    ac = np.einsum("aij,bjk->abik", psi, psi)
    ac = ac + ac.transpose(1, 0, 2, 3)
    target = 2 * sm.kappa * np.einsum("ab,ik->abik", np.eye(sm.n), np.eye(sm.dim))
    return float(np.abs(ac - target).max())
