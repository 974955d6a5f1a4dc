"""Root systems, Weyl groups and the basic inner product.

Weights are stored as integer vectors in the fundamental-weight basis and
Cartan points as real vectors in the simple-coroot basis, so the natural
pairing between the two is the plain dot product.  The inner product is
normalized so that the highest root has squared length 2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from .exact import frac_matrix_inverse, frac_str

SIMPLE_TAGS = ("A1", "A2", "A3", "B2", "G2")
MAX_TORUS_RANK = 4


class UnsupportedGroupError(ValueError):
    pass


class RootSystemMismatch(ValueError):
    pass


# C[i][j] = 2(a_i, a_j)/(a_j, a_j), so a_i = sum_j C[i][j] w_j (row i).
_CARTAN = {
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "B2": [[2, -2], [-1, 2]],
    "G2": [[2, -1], [-3, 2]],
}

# (a_i, a_i) with the long roots normalized to 2
_ROOT_LENGTHS = {
    "A1": [2],
    "A2": [2, 2],
    "A3": [2, 2, 2],
    "B2": [2, 1],
    "G2": [Fraction(2, 3), 2],
}


@dataclass(frozen=True, eq=False)
class RootSystem:
    """Root data for a simple Lie algebra or a torus.

    For a torus there are no roots; ``gram`` is the user-supplied form on
    the weight lattice and the coroot basis is the dual basis.
    """

    tag: str
    rank: int
    cartan_matrix: tuple[tuple[int, ...], ...]
    gram: tuple[tuple[Fraction, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]  # simple-root coordinates
    root_lengths: tuple[Fraction, ...] = field(default=())

    @property
    def is_torus(self) -> bool:
        return self.tag.startswith("T")

    @cached_property
    def gram_np(self) -> np.ndarray:
        return np.array(self.gram, dtype=float)

    @cached_property
    def coroot_gram(self) -> tuple[tuple[Fraction, ...], ...]:
        """Inner products of the simple coroots (dual basis for a torus)."""
        if self.is_torus:
            return frac_matrix_inverse(self.gram)
        r = self.rank
        return tuple(
            tuple(
                Fraction(self.cartan_matrix[j][i] * 2) / self.root_lengths[j]
                for j in range(r)
            )
            for i in range(r)
        )

    @cached_property
    def coroot_gram_np(self) -> np.ndarray:
        return np.array(self.coroot_gram, dtype=float)

    @property
    def cartan_np(self) -> np.ndarray:
        return np.array(self.cartan_matrix, dtype=int)

    @property
    def dim(self) -> int:
        return self.rank + 2 * len(self.positive_roots)

    @property
    def rho(self) -> tuple[int, ...]:
        if self.is_torus:
            return (0,) * self.rank
        return (1,) * self.rank

    def root_weight(self, root: tuple[int, ...]) -> tuple[int, ...]:
        """Simple-root coordinates -> fundamental-weight coordinates."""
        C = self.cartan_matrix
        return tuple(
            sum(root[i] * C[i][j] for i in range(self.rank)) for j in range(self.rank)
        )

    @cached_property
    def positive_roots_weight(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.root_weight(a) for a in self.positive_roots)

    @cached_property
    def highest_root(self) -> tuple[int, ...]:
        return max(self.positive_roots, key=lambda a: (sum(a), a))

    @cached_property
    def dual_coxeter(self) -> int:
        if self.is_torus:
            return 0
        theta = self.highest_root
        # h^v = 1 + <rho, theta^v>; theta is long so theta^v = theta
        value = 1 + basic_form(self, WeightVector(self, self.rho), WeightVector(self, self.root_weight(theta)))
        assert value.denominator == 1
        return int(value)

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "cartan_matrix": [list(row) for row in self.cartan_matrix],
            "gram": [[frac_str(x) for x in row] for row in self.gram],
            "rho": list(self.rho),
            "dual_coxeter": self.dual_coxeter,
        }

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """f_abc in the orthonormal compact basis, [x_a, x_b] = sum_c f_abc x_c."""
        if self.is_torus:
            return np.zeros((self.rank,) * 3)
        from .reps import compact_basis

        return compact_basis(self).structure_constants

    def __repr__(self) -> str:
        return f"RootSystem({self.tag})"


@dataclass(frozen=True)
class WeightVector:
    rs: RootSystem
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) != self.rs.rank:
            raise ValueError(f"weight {self.coords} has wrong length for {self.rs.tag}")

    @property
    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def __add__(self, other: "WeightVector") -> "WeightVector":
        _check_same(self.rs, other.rs)
        return WeightVector(self.rs, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "WeightVector":
        return WeightVector(self.rs, tuple(-a for a in self.coords))


@dataclass(frozen=True)
class CartanVector:
    rs: RootSystem
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=object if _is_exact(self.coords) else float)
        if c.shape != (self.rs.rank,):
            raise ValueError(f"Cartan vector of shape {c.shape} for {self.rs.tag}")
        object.__setattr__(self, "coords", c)

    @property
    def real(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def norm2(self):
        return basic_form(self.rs, self, self)

    def __add__(self, other: "CartanVector") -> "CartanVector":
        _check_same(self.rs, other.rs)
        return CartanVector(self.rs, self.coords + other.coords)

    def __sub__(self, other: "CartanVector") -> "CartanVector":
        _check_same(self.rs, other.rs)
        return CartanVector(self.rs, self.coords - other.coords)

    def __mul__(self, t) -> "CartanVector":
        return CartanVector(self.rs, self.coords * t)

    __rmul__ = __mul__


def _is_exact(values) -> bool:
    try:
        return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)
    except TypeError:
        return False


def _check_same(a: RootSystem, b: RootSystem) -> None:
    if a is not b and a.tag != b.tag:
        raise RootSystemMismatch(f"vectors belong to {a.tag} and {b.tag}")


def _positive_roots(cartan: list[list[int]]) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates via root strings."""
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    roots = list(simple)
    known = set(roots)
    frontier = list(simple)
    while frontier:
        new = []
        for beta in frontier:
            for i in range(r):
                # <beta, a_i^v> = sum_k beta_k C[k][i]
                pairing = sum(beta[k] * cartan[k][i] for k in range(r))
                # p = how far the a_i-string extends below beta
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in known:
                        p += 1
                    else:
                        break
                q = p - pairing
                if q > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in known:
                        known.add(up)
                        roots.append(up)
                        new.append(up)
        frontier = new
    return sorted(roots, key=lambda a: (sum(a), a))


_TAG_RE = re.compile(r"^(?:T|torus)\(?(\d)\)?$", re.IGNORECASE)


def build_root_system(tag: str, gram=None) -> RootSystem:
    """Build the root system for ``tag`` (A1, A2, A3, B2, G2, or T<r>/torus(r)).

    For a torus ``gram`` is an optional positive-definite rational matrix
    on the weight lattice; the identity is used when omitted.
    """
    tag = str(tag).strip()
    m = _TAG_RE.match(tag)
    if m:
        r = int(m.group(1))
        if not 1 <= r <= MAX_TORUS_RANK:
            raise UnsupportedGroupError(f"unsupported group: {tag}")
        if gram is None:
            gram = [[int(i == j) for j in range(r)] for i in range(r)]
        g = tuple(tuple(Fraction(x) for x in row) for row in gram)
        if len(g) != r or any(len(row) != r for row in g):
            raise ValueError(f"gram must be {r}x{r}")
        ga = np.array(g, dtype=float)
        if not np.allclose(ga, ga.T) or np.linalg.eigvalsh(ga).min() <= 0:
            raise ValueError("torus gram must be symmetric positive definite")
        return RootSystem(f"T{r}", r, tuple((0,) * r for _ in range(r)), g, ())
    if tag.upper() not in _CARTAN:
        raise UnsupportedGroupError(f"unsupported group: {tag}")
    tag = tag.upper()
    C = _CARTAN[tag]
    lengths = tuple(Fraction(x) for x in _ROOT_LENGTHS[tag])
    r = len(C)
    # (a_i, a_j) = C[i][j] (a_j, a_j)/2; then G = C^{-1} S C^{-T}
    S = [[Fraction(C[i][j]) * lengths[j] / 2 for j in range(r)] for i in range(r)]
    Ci = frac_matrix_inverse(C)
    G = [
        [sum(Ci[i][k] * S[k][l] * Ci[j][l] for k in range(r) for l in range(r)) for j in range(r)]
        for i in range(r)
    ]
    return RootSystem(
        tag,
        r,
        tuple(tuple(row) for row in C),
        tuple(tuple(row) for row in G),
        tuple(_positive_roots(C)),
        lengths,
    )


def basic_form(rs: RootSystem, a, b):
    """Basic invariant form on weights or Cartan points.

    Exact (``Fraction``) for weight vectors and for Cartan vectors with
    rational coordinates; float otherwise.  Mixed weight/Cartan arguments
    are paired through the form-induced identification.
    """
    for v in (a, b):
        if v.rs is not rs and v.rs.tag != rs.tag:
            raise RootSystemMismatch(f"vector of {v.rs.tag} used with {rs.tag}")
    if isinstance(a, WeightVector) and isinstance(b, WeightVector):
        G = rs.gram
        return sum(
            (G[i][j] * a.coords[i] * b.coords[j] for i in range(rs.rank) for j in range(rs.rank)),
            Fraction(0),
        )
    if isinstance(a, CartanVector) and isinstance(b, CartanVector):
        if a.coords.dtype == object and b.coords.dtype == object:
            G = rs.coroot_gram
            return sum(
                (G[i][j] * a.coords[i] * b.coords[j] for i in range(rs.rank) for j in range(rs.rank)),
                Fraction(0),
            )
        return float(a.real @ rs.coroot_gram_np @ b.real)
    # weight paired with Cartan point is the natural pairing
    w, c = (a, b) if isinstance(a, WeightVector) else (b, a)
    if c.coords.dtype == object:
        return sum((Fraction(x) * y for x, y in zip(w.coords, c.coords)), Fraction(0))
    return float(np.dot(w.coords, c.real))


def weight_to_cartan(rs: RootSystem, w: WeightVector) -> CartanVector:
    """Metric dual of a weight, in exact coroot coordinates."""
    # (x, y) = <w, y> for all y  =>  coroot_gram @ x = w
    inv = frac_matrix_inverse(rs.coroot_gram)
    x = [sum(inv[i][j] * w.coords[j] for j in range(rs.rank)) for i in range(rs.rank)]
    return CartanVector(rs, np.array(x, dtype=object))


def weight_norm2(rs: RootSystem, coords) -> Fraction:
    w = WeightVector(rs, tuple(coords))
    return basic_form(rs, w, w)


def reflect_weight(rs: RootSystem, coords: tuple[int, ...], i: int) -> tuple[int, ...]:
    alpha = rs.root_weight(tuple(int(k == i) for k in range(rs.rank)))
    c = coords[i]
    return tuple(x - c * a for x, a in zip(coords, alpha))


def reflect_cartan(rs: RootSystem, mu: CartanVector, i: int) -> CartanVector:
    """Simple reflection s_i(mu) = mu - <a_i, mu> a_i^v."""
    C = rs.cartan_matrix
    pairing = sum(C[i][j] * mu.coords[j] for j in range(rs.rank))
    coords = mu.coords.copy()
    coords[i] = coords[i] - pairing
    return CartanVector(rs, coords)


@dataclass(frozen=True)
class WeylData:
    orbit: frozenset[tuple[int, ...]]
    dimension: int
    dominant: tuple[int, ...]


def weyl_orbit(rs: RootSystem, coords: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    orbit = {tuple(coords)}
    frontier = [tuple(coords)]
    while frontier:
        new = []
        for w in frontier:
            for i in range(rs.rank):
                v = reflect_weight(rs, w, i)
                if v not in orbit:
                    orbit.add(v)
                    new.append(v)
        frontier = new
    return frozenset(orbit)


def weyl_group_matrices(rs: RootSystem) -> list[np.ndarray]:
    """All Weyl group elements as integer matrices on coroot coordinates."""
    if rs.is_torus:
        raise ValueError("no Weyl group for a torus")
    r = rs.rank
    C = rs.cartan_np
    gens = []
    for i in range(r):
        s = np.eye(r, dtype=int)
        s[i, :] -= C[i, :]
        gens.append(s)
    seen = {np.eye(r, dtype=int).tobytes(): np.eye(r, dtype=int)}
    frontier = list(seen.values())
    while frontier:
        new = []
        for g in frontier:
            for s in gens:
                h = s @ g
                key = h.tobytes()
                if key not in seen:
                    seen[key] = h
                    new.append(h)
        frontier = new
    return sorted(seen.values(), key=lambda m: tuple(m.ravel()))


def weyl_dimension(rs: RootSystem, coords: tuple[int, ...]) -> int:
    lam_rho = WeightVector(rs, tuple(c + 1 for c in coords))
    rho = WeightVector(rs, rs.rho)
    num = Fraction(1)
    for a in rs.positive_roots_weight:
        aw = WeightVector(rs, a)
        num *= basic_form(rs, lam_rho, aw) / basic_form(rs, rho, aw)
    assert num.denominator == 1
    return int(num)


def weyl_data(rs: RootSystem, lam: WeightVector) -> WeylData:
    if rs.is_torus:
        raise ValueError("no Weyl group for a torus")
    orbit = weyl_orbit(rs, lam.coords)
    dominant = next(w for w in orbit if all(c >= 0 for c in w))
    return WeylData(orbit, weyl_dimension(rs, dominant), dominant)


def dominant_weights_up_to_dim(rs: RootSystem, max_dim: int) -> list[tuple[int, ...]]:
    """All dominant weights whose irrep dimension is at most ``max_dim``."""
    out = []
    # dimension grows in every coordinate, so a box walk with pruning suffices
    bound = 0
    while True:
        grew = False
        for lam in product(range(bound + 1), repeat=rs.rank):
            if max(lam, default=0) != bound:
                continue
            if weyl_dimension(rs, lam) <= max_dim:
                out.append(lam)
                grew = True
        if not grew:
            break
        bound += 1
    return sorted(out, key=lambda w: (weyl_dimension(rs, w), w))
