"""Acceptance criteria 1-9, one verdict line each (see the terminal summary)."""

import cmath
import math
import time
from fractions import Fraction

import numpy as np
import sympy

from diracmf.cocycle import action_law_residual, cartan_loop_algebra, local_superpotential
from diracmf.dirac import (
    cubic_dirac,
    kernel_locus_scan,
    random_cartan,
    vanishing_certificate,
    verify_square_identity,
)
from diracmf.lie import CartanVector, WeightVector, build_root_system, dominant_weights_up_to_dim
from diracmf.potential import (
    PotentialSheet,
    curvature_residual,
    torus_sheet_potential,
    translation_descent_check,
    verlinde_classes_simple,
    verlinde_kernel_points,
)
from diracmf.reps import irrep_matrices
from diracmf.sampling import random_even_form, random_lattice_vector, random_rational, random_triple
from oracles import (
    central_difference_gradient,
    isogeny_kernel_count_bruteforce,
    lattice_shift_integral,
    sl2_alcove_count,
    sl2_conformal_weight,
)

SWEEP_GROUPS = ("A1", "A2", "B2")
SWEEP_MAX_DIM = 100
SWEEP_SAMPLES = 20
TOL = 1e-9


def _sweep(check):
    worst, cases = 0.0, 0
    rng = np.random.default_rng(2024)
    for tag in SWEEP_GROUPS:
        rs = build_root_system(tag)
        for lam in dominant_weights_up_to_dim(rs, SWEEP_MAX_DIM):
            df = cubic_dirac(irrep_matrices(rs, WeightVector(rs, lam)))
            for _ in range(SWEEP_SAMPLES):
                worst = max(worst, check(df, random_cartan(rs, rng, 10.0)))
            cases += 1
    return worst, cases


def _forms():
    rng = np.random.default_rng(77)
    return [random_even_form(rng, int(rng.integers(1, 4))) for _ in range(20)]


def test_criterion_1_square_identity(acceptance_line):
    t0 = time.perf_counter()
    worst, cases = _sweep(verify_square_identity)
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL and elapsed < 60
    acceptance_line(1, ok, f"square identity, {cases} irreps x {SWEEP_SAMPLES} mu, max residual {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_kernel_localization(acceptance_line):
    rs = build_root_system("A1")
    ray = CartanVector(rs, [1 / math.sqrt(2)])  # unit coroot direction
    grid = np.linspace(0.01, 6.0, 200)
    t0 = time.perf_counter()
    ok, worst_off, worst_sig, worst_dev = True, math.inf, 0.0, 0.0
    for n in range(6):
        df = cubic_dirac(irrep_matrices(rs, WeightVector(rs, (n,))))
        scan = kernel_locus_scan(df, ray, grid)
        target = (n + 1) / math.sqrt(2)  # ||lam + rho||
        dev = abs(scan.refined_s - target)
        off = scan.sigma[np.abs(grid - target) >= 0.2].min()
        worst_dev, worst_sig, worst_off = max(worst_dev, dev), max(worst_sig, scan.refined_sigma), min(worst_off, off)
        ok &= dev <= min(scan.refinement_step, 1e-3)  # one refined grid step
        ok &= scan.refined_sigma < 1e-8 and off >= 0.05
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    acceptance_line(
        2, ok,
        f"A1 lam=0..5: |s - ||lam+rho||| <= {worst_dev:.1e}, sigma_min <= {worst_sig:.1e}, off-orbit >= {worst_off:.3f}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_3_vanishing(acceptance_line):
    rs = build_root_system("A2")
    zero = CartanVector(rs, [Fraction(0), Fraction(0)])
    t0 = time.perf_counter()
    worst_res, worst_val, ok, count = 0.0, -math.inf, True, 0
    for lam in dominant_weights_up_to_dim(rs, 50):
        rep = irrep_matrices(rs, WeightVector(rs, lam))
        cert = vanishing_certificate(rep, cubic_dirac(rep), zero)
        worst_res, worst_val = max(worst_res, cert.scalar_residual), max(worst_val, cert.exact_value)
        ok &= cert.passed and cert.scalar_residual <= TOL and cert.exact_value <= -2
        count += 1
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    acceptance_line(3, ok, f"A2, {count} irreps: D0^2 scalar to {worst_res:.1e}, largest value {worst_val}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_torus_superpotential(acceptance_line):
    rng = np.random.default_rng(4)
    ok, worst_fd, sheets = True, 0.0, 0
    for B in _forms():
        r = len(B)
        Binv = sympy.Matrix(B).inv()
        for _ in range(10):
            lam = random_lattice_vector(rng, r, 6)
            s = PotentialSheet(lam, B)
            expected = Binv * sympy.Matrix(lam)
            ok &= tuple(s.critical_point) == tuple(Fraction(int(x.p), int(x.q)) for x in expected)
            ok &= all(g == 0 for g in s.gradient(s.critical_point))
            for x in (np.array([float(c) for c in s.critical_point]), rng.normal(size=r) * 3):
                fd = central_difference_gradient(lambda y: torus_sheet_potential(s, y), x, 1e-5)
                an = np.array([float(g) for g in s.gradient(list(x))])
                worst_fd = max(worst_fd, float(np.abs(fd - an).max()))
            sheets += 1
    ok &= worst_fd <= 1e-6
    acceptance_line(4, ok, f"{sheets} sheets on 20 forms: critical point = B^-1 lam exactly, fd gradient error {worst_fd:.1e}")
    assert ok


def test_criterion_5_isogeny_kernel(acceptance_line):
    ok, detail = True, []
    for B in _forms():
        vd = verlinde_kernel_points(len(B), B)
        det = int(sympy.Matrix(B).det())
        brute = isogeny_kernel_count_bruteforce(B)
        ok &= vd.count == det == brute
        detail.append(vd.count)
    acceptance_line(5, ok, f"20 forms: count = det = brute force (counts {detail})")
    assert ok


def test_criterion_6_verlinde(acceptance_line):
    rs = build_root_system("A1")
    counts = []
    ok = True
    for k in range(1, 11):
        vd = verlinde_classes_simple(rs, k)
        counts.append(len(vd.representatives))
        ok &= len(vd.representatives) == k + 1 == sl2_alcove_count(k)
    vd = verlinde_classes_simple(rs, 1)
    ratio = vd.phases[1] / vd.phases[0]
    dh = sl2_conformal_weight(Fraction(1, 2), 1) - sl2_conformal_weight(Fraction(0), 1)
    err = max(abs(ratio - cmath.exp(-2j * math.pi / 4)), abs(ratio - cmath.exp(-2j * math.pi * float(dh))))
    ok &= err <= 1e-12
    acceptance_line(6, ok, f"A1 k=1..10 representatives {counts}; k=1 phase ratio error {err:.1e}")
    assert ok


def test_criterion_7_translation_descent(acceptance_line):
    rng = np.random.default_rng(7)
    ok, n = True, 0
    while n < 200:
        r = int(rng.integers(1, 4))
        B = random_even_form(rng, r)
        s = PotentialSheet(random_lattice_vector(rng, r, 6), B)
        p = random_lattice_vector(rng, r, 4)
        mu = [random_rational(rng) for _ in range(r)]
        d = translation_descent_check(s, p, mu)
        ok &= isinstance(d, Fraction) and d.denominator == 1 and d == lattice_shift_integral(B, s.lam, p)
        n += 1
    acceptance_line(7, ok, f"{n} random (sheet, p, mu) triples give exact integers")
    assert ok


def test_criterion_8_cocycle(acceptance_line):
    rs = build_root_system("A1")
    alg = cartan_loop_algebra(rs)
    rng = np.random.default_rng(8)
    law = max(action_law_residual(*random_triple(alg, 8, rng)) for _ in range(50))
    vac = PotentialSheet((0,), rs.coroot_gram)
    central_err, exact_ok = 0.0, True
    for _ in range(10):
        x = Fraction(int(rng.integers(-4, 5)), int(rng.integers(9, 20)))
        lp = local_superpotential(rs, CartanVector(rs, [x]), M=8)
        central_err = max(central_err, abs(lp.central_value - 1j * math.pi * float(CartanVector(rs, [x]).norm2())))
        exact_ok &= lp.potential_exact == torus_sheet_potential(vac, [x])
    ok = law <= 1e-8 and central_err <= 1e-8 and exact_ok
    acceptance_line(8, ok, f"action law {law:.1e} over 50 triples at M=8; central value error {central_err:.1e}; vacuum sheet exact: {exact_ok}")
    assert ok


def test_criterion_9_curvature_link(acceptance_line):
    worst, cases = _sweep(curvature_residual)
    ok = worst <= TOL
    acceptance_line(9, ok, f"D^2 + 2 W_op = -||lam+rho||^2 over {cases} irreps x {SWEEP_SAMPLES} mu, max residual {worst:.2e}")
    assert ok
