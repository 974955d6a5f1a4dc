import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracmf.dirac import cubic_dirac, random_cartan
from diracmf.exact import frac_det
from diracmf.lie import CartanVector, WeightVector, build_root_system, dominant_weights_up_to_dim
from diracmf.potential import (
    FormError,
    PotentialSheet,
    check_even_form,
    curvature_residual,
    lie_potential_operator,
    ribbon_phases,
    torus_sheet_potential,
    translation_descent_check,
    verlinde_classes_simple,
    verlinde_kernel_points,
)
from diracmf.reps import irrep_matrices
from diracmf.sampling import random_even_form
from oracles import (
    central_difference_gradient,
    gauss_sum_count,
    isogeny_kernel_count_bruteforce,
    lattice_shift_integral,
    sl2_alcove_count,
    sl2_conformal_weight,
)

F = Fraction


@st.composite
def even_forms(draw, max_rank=3):
    seed = draw(st.integers(0, 2**32 - 1))
    rank = draw(st.integers(1, max_rank))
    return random_even_form(np.random.default_rng(seed), rank)


rationals = st.fractions(-6, 6, max_denominator=9)


# operator form


@pytest.mark.parametrize("tag,lam", [("A1", (2,)), ("A2", (1, 0)), ("B2", (0, 1))])
def test_operator_hermitian_and_zero(tag, lam):
    rs = build_root_system(tag)
    rep = irrep_matrices(rs, WeightVector(rs, lam))
    assert not np.any(lie_potential_operator(rep, CartanVector(rs, [0.0] * rs.rank)))
    rng = np.random.default_rng(1)
    W = lie_potential_operator(rep, random_cartan(rs, rng, 5))
    assert np.abs(W - W.conj().T).max() <= 1e-12


def test_operator_commutes_with_cartan():
    rs = build_root_system("A2")
    rep = irrep_matrices(rs, WeightVector(rs, (1, 1)))
    W = lie_potential_operator(rep, CartanVector(rs, [0.4, 1.3]))
    from diracmf.reps import cartan_action

    T = cartan_action(rep, CartanVector(rs, [-0.7, 0.2]))
    assert np.abs(W @ T - T @ W).max() <= 1e-12


@pytest.mark.parametrize("tag", ["A1", "A2", "B2", "G2"])
def test_curvature_link(tag):
    rs = build_root_system(tag)
    rng = np.random.default_rng(2)
    for lam in dominant_weights_up_to_dim(rs, 16):
        df = cubic_dirac(irrep_matrices(rs, WeightVector(rs, lam)))
        for _ in range(4):
            assert curvature_residual(df, random_cartan(rs, rng, 10)) <= 1e-9


# torus sheets


def test_sheet_examples():
    s = PotentialSheet((0,), ((2,),))
    assert torus_sheet_potential(s, [F(0)]) == 0
    s = PotentialSheet((3, -1), ((2, 1), (1, 4)))
    c = s.critical_point
    assert s.gradient(c) == (0, 0)
    assert s.critical_value == torus_sheet_potential(s, c) == -F(1, 2) * sum(
        s.form[i][j] * c[i] * c[j] for i in range(2) for j in range(2)
    )
    assert s.hessian() == s.form


@pytest.mark.parametrize(
    "B,msg",
    [(((1,),), "even"), (((2, 1), (0, 2)), "symmetric"), (((2, 3), (3, 2)), "positive"), (((F(1, 2),),), "integral")],
)
def test_bad_forms(B, msg):
    with pytest.raises(FormError, match=msg):
        check_even_form(B)


def test_dimension_mismatch():
    s = PotentialSheet((1, 1), ((2, 0), (0, 2)))
    with pytest.raises(FormError):
        torus_sheet_potential(s, [F(1)])
    with pytest.raises(FormError):
        PotentialSheet((1,), ((2, 0), (0, 2)))


@settings(max_examples=60)
@given(even_forms(), st.data())
def test_critical_point_is_unique_zero_of_gradient(B, data):
    r = len(B)
    lam = data.draw(st.lists(st.integers(-6, 6), min_size=r, max_size=r))
    s = PotentialSheet(lam, B)
    c = s.critical_point
    # B c = lam exactly
    assert all(sum(B[i][j] * c[j] for j in range(r)) == lam[i] for i in range(r))
    assert all(g == 0 for g in s.gradient(c))
    # any other point has a nonzero gradient (B is invertible)
    mu = data.draw(st.lists(rationals, min_size=r, max_size=r))
    if tuple(mu) != c:
        assert any(g != 0 for g in s.gradient(mu))


@settings(max_examples=60)
@given(even_forms(), st.data())
def test_finite_difference_gradient(B, data):
    r = len(B)
    lam = data.draw(st.lists(st.integers(-6, 6), min_size=r, max_size=r))
    s = PotentialSheet(lam, B)
    x = np.array(data.draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=r, max_size=r)))
    fd = central_difference_gradient(lambda y: torus_sheet_potential(s, y), x, 1e-5)
    exact = np.array([float(g) for g in s.gradient(list(x))])
    assert np.abs(fd - exact).max() <= 1e-6


def test_descent_examples():
    s = PotentialSheet((0,), ((2,),))
    assert translation_descent_check(s, [0], [F(1, 3)]) == 0
    d = translation_descent_check(s, [1], [F(1, 2)])
    assert d.denominator == 1 and d == -1
    s = PotentialSheet((2, -1), ((2, 1), (1, 4)))
    rng = np.random.default_rng(0)
    vals = {translation_descent_check(s, (1, -2), [F(int(rng.integers(-9, 9)), 7), F(1, 3)]) for _ in range(10)}
    assert len(vals) == 1


def test_descent_rejects_non_lattice():
    s = PotentialSheet((0,), ((2,),))
    with pytest.raises(FormError, match="lattice"):
        translation_descent_check(s, [F(1, 2)], [F(0)])


@settings(max_examples=80)
@given(even_forms(), st.data())
def test_descent_is_integer(B, data):
    r = len(B)
    lam = data.draw(st.lists(st.integers(-6, 6), min_size=r, max_size=r))
    p = data.draw(st.lists(st.integers(-4, 4), min_size=r, max_size=r))
    mu = data.draw(st.lists(rationals, min_size=r, max_size=r))
    d = translation_descent_check(PotentialSheet(lam, B), p, mu)
    assert d.denominator == 1
    assert d == lattice_shift_integral(B, lam, p)


# Verlinde points


@pytest.mark.parametrize(
    "B,count",
    [(((2,),), 2), (((6,),), 6), (((2, 0), (0, 4)), 8), (((2, 1), (1, 2)), 3), (((4, 1, 0), (1, 2, 1), (0, 1, 4)), 24)],
)
def test_kernel_examples(B, count):
    vd = verlinde_kernel_points(len(B), B)
    assert vd.count == vd.determinant == count == isogeny_kernel_count_bruteforce(B)


def test_kernel_points_rank1():
    assert verlinde_kernel_points(1, ((2,),)).points == [(F(0),), (F(1, 2),)]
    assert verlinde_kernel_points(1, ((6,),)).points == [(F(k, 6),) for k in range(6)]


@settings(max_examples=40)
@given(even_forms())
def test_kernel_count_matches_bruteforce(B):
    vd = verlinde_kernel_points(len(B), B)
    assert vd.count == vd.determinant == gauss_sum_count(B) == isogeny_kernel_count_bruteforce(B)
    # every point really is in the kernel: B x integral
    r = len(B)
    for x in vd.points:
        assert all(sum(B[i][j] * x[j] for j in range(r)).denominator == 1 for i in range(r))
        assert all(0 <= c < 1 for c in x)


def test_kernel_errors():
    with pytest.raises(FormError):
        verlinde_kernel_points(1, ((F(1, 2),),))
    with pytest.raises(FormError):
        verlinde_kernel_points(2, ((2, 3), (3, 2)))
    with pytest.raises(FormError):
        verlinde_kernel_points(2, ((2,),))


def test_verlinde_a1_level1():
    vd = verlinde_classes_simple(build_root_system("A1"), 1)
    assert vd.count == 6
    assert sum(vd.regular) == 4
    assert vd.representatives == [(F(1, 6),), (F(1, 3),)]
    assert vd.critical_values == [F(-1, 12), F(-1, 3)]
    assert vd.labels == [(0,), (1,)]
    assert vd.rescale == 12
    ratio = vd.phases[1] / vd.phases[0]
    h = sl2_conformal_weight(F(1, 2), 1) - sl2_conformal_weight(F(0), 1)
    assert abs(ratio - cmath.exp(-2j * math.pi * float(h))) <= 1e-12
    assert abs(ratio - cmath.exp(-2j * math.pi / 4)) <= 1e-12
    assert vd.normalized_phases[0] == 1


@pytest.mark.parametrize("k", range(1, 11))
def test_verlinde_a1_count(k):
    vd = verlinde_classes_simple(build_root_system("A1"), k)
    assert vd.count == 2 * (k + 2)
    assert len(vd.representatives) == k + 1 == sl2_alcove_count(k)
    assert sorted(vd.labels) == [(j,) for j in range(k + 1)]


@pytest.mark.parametrize("k", range(1, 7))
def test_a1_phase_ratios_match_conformal_weights(k):
    vd = verlinde_classes_simple(build_root_system("A1"), k)
    for (lab,), z in zip(vd.labels, vd.normalized_phases):
        h = sl2_conformal_weight(F(lab, 2), k)
        assert abs(z - cmath.exp(-2j * math.pi * float(h))) <= 1e-12


@pytest.mark.parametrize("tag,k,expected", [("A1", 3, 4), ("A2", 1, 3), ("A2", 2, 6), ("B2", 1, 3), ("G2", 1, 2), ("A3", 1, 4)])
def test_verlinde_simple_counts(tag, k, expected):
    rs = build_root_system(tag)
    vd = verlinde_classes_simple(rs, k)
    assert len(vd.representatives) == expected
    # labels are exactly the level-k dominant weights: <lam, theta^v> <= k
    theta = rs.highest_root
    # theta^v in simple-coroot coordinates: theta_i * |a_i|^2 / 2
    cov = [theta[i] * rs.root_lengths[i] / 2 for i in range(rs.rank)]
    for lab in vd.labels:
        assert all(c >= 0 for c in lab) and sum(c * v for c, v in zip(lab, cov)) <= k
    assert vd.count == vd.determinant == frac_det(
        [[(k + rs.dual_coxeter) * x for x in row] for row in rs.coroot_gram]
    )


def test_verlinde_level_error():
    with pytest.raises(FormError):
        verlinde_classes_simple(build_root_system("A1"), 0)
    with pytest.raises(FormError):
        verlinde_classes_simple(build_root_system("T1"), 1)


def test_ribbon_phases_with_sheets():
    vd = verlinde_classes_simple(build_root_system("A1"), 1)
    sheets = [PotentialSheet(l, vd.form) for l in [(1,), (2,)]]
    # sheet lambda has its critical point at lambda/6
    phases = ribbon_phases(vd, sheets)
    assert vd.critical_values == [F(-1, 12), F(-1, 3)]
    assert all(abs(abs(z) - 1) <= 1e-15 for z in phases)


def test_verlinde_json():
    d = verlinde_classes_simple(build_root_system("A1"), 1).to_json()
    assert d["representatives"] == [["1/6"], ["1/3"]]
    assert d["count"] == 6 and d["representative_count"] == 2
    assert set(d["phases"][0]) == {"re", "im"}
    assert d["critical_values_rescaled"] == [-1, -4]
