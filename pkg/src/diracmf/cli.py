"""Command-line front end: run a check, print a summary, write a JSON report.

Exit codes: 0 every contract passed, 1 a contract failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import report as report_mod
from .clifford import CliffordError
from .cocycle import (
    LogarithmError,
    QuadratureError,
    action_law_residual,
    cartan_loop_algebra,
    local_superpotential,
    loop_algebra,
)
from .dirac import (
    KERNEL_TOL,
    SQUARE_TOL,
    CalibrationError,
    PreconditionError,
    calibrate,
    calibration_table,
    cubic_dirac,
    kernel_locus_scan,
    random_cartan,
    vanishing_certificate,
    verify_square_identity,
)
from .exact import frac_det, frac_str, parse_frac
from .lie import (
    CartanVector,
    RootSystemMismatch,
    UnsupportedGroupError,
    WeightVector,
    build_root_system,
    dominant_weights_up_to_dim,
)
from .potential import (
    FormError,
    PotentialSheet,
    curvature_residual,
    torus_sheet_potential,
    translation_descent_check,
    verlinde_classes_simple,
    verlinde_kernel_points,
)
from .reps import RepresentationError, irrep_matrices
from .sampling import random_lattice_vector, random_rational, random_triple

COMMANDS = ("verify-square", "scan-kernel", "vanishing", "verlinde", "torus-potential", "cocycle", "calibrate", "all")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# bad input surfaced by the library, reported as usage errors
INPUT_ERRORS = (
    UnsupportedGroupError,
    RootSystemMismatch,
    RepresentationError,
    FormError,
    LogarithmError,
    QuadratureError,
    PreconditionError,
    CliffordError,
)

FD_STEP = 1e-5
FD_TOL = 1e-6
COCYCLE_TOL = 1e-8
OFF_ORBIT_GAP = 0.2
OFF_ORBIT_FLOOR = 0.05
LOCALIZATION_TOL = 1e-3


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    group: str = "A1"
    weight: tuple[int, ...] | None = None
    level: int = 1
    start: float = 0.01
    stop: float = 6.0
    count: int = 200
    M: int = 8
    samples: int = 20
    seed: int = 0
    max_norm: float = 10.0
    max_dim: int = 50
    form: tuple[tuple[int, ...], ...] | None = None
    mu: tuple[Fraction, ...] | None = None
    ray: tuple[float, ...] | None = None
    workers: int | None = None
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    schema_version: str = report_mod.SCHEMA_VERSION

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.count < 2:
            raise UsageError("grid count must be at least 2")
        if not (self.start > 0 and self.stop > self.start):
            raise UsageError("grid needs 0 < start < stop")
        if self.samples < 0 or self.M < 1 or self.level < 1 or self.max_dim < 1:
            raise UsageError("samples >= 0, M >= 1, level >= 1 and max-dim >= 1 required")
        for k, v in self.tolerances.items():
            if not (v > 0 and math.isfinite(v)):
                raise UsageError(f"tolerance {k} must be positive, got {v}")

    def tol(self, name: str) -> float:
        defaults = {"square": SQUARE_TOL, "kernel": KERNEL_TOL, "cocycle": COCYCLE_TOL, "fd": FD_TOL}
        return self.tolerances.get(name, defaults[name])

    def to_json(self) -> dict:
        d = asdict(self)
        d["tolerances"] = {k: self.tol(k) for k in ("square", "kernel", "cocycle", "fd")}
        return d


# parsing


def _int_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _frac_tuple(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_frac(x) for x in text.replace(" ", "").split(",") if x != "")
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from exc


def _float_tuple(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _form(text: str) -> tuple[tuple[int, ...], ...]:
    rows = tuple(_int_tuple(r) for r in text.split(";") if r.strip())
    if not rows:
        raise argparse.ArgumentTypeError("empty form")
    return rows


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--group", help="A1, A2, A3, B2, G2 or T<r> (default A1)")
    common.add_argument("--weight", type=_int_tuple, help="highest weight / sheet label, e.g. 3 or 1,0")
    common.add_argument("--level", type=int)
    common.add_argument("--start", type=float, help="first grid point")
    common.add_argument("--stop", type=float, help="last grid point")
    common.add_argument("--count", type=int, help="number of grid points")
    common.add_argument("--M", type=int, dest="M", help="Fourier truncation")
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--max-norm", type=float)
    common.add_argument("--max-dim", type=int)
    common.add_argument("--form", type=_form, help="torus form, rows separated by ';', e.g. 2,1;1,4")
    common.add_argument("--mu", type=_frac_tuple, help="Cartan point in coroot coordinates, e.g. 1/6")
    common.add_argument("--ray", type=_float_tuple, help="scan direction in coroot coordinates")
    common.add_argument("--workers", type=int)
    common.add_argument("--tol-square", type=float)
    common.add_argument("--tol-kernel", type=float)
    common.add_argument("--tol-cocycle", type=float)
    common.add_argument("--tol-fd", type=float)
    common.add_argument("--output", help="report path (default reports/<command>.json)")
    common.add_argument("--schema-version")

    parser = _Parser(prog="diracmf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subs = {}
    helps = {
        "verify-square": "square identity and curvature link on random Cartan points",
        "scan-kernel": "smallest singular value of the Dirac family along a ray",
        "vanishing": "scalar negative square of D_0 for every irrep up to --max-dim",
        "verlinde": "Verlinde points at --level (or of --form for a torus)",
        "torus-potential": "critical point, gradient and descent checks on a torus sheet",
        "cocycle": "action law and local super-potential in the truncated loop model",
        "calibrate": "print the unique sign/coefficient convention",
        "all": "every check above at default settings",
    }
    for name in COMMANDS:
        subs[name] = sub.add_parser(name, parents=[common], help=helps[name])
    return parser, subs


_FLAG_KEYS = {
    "group", "weight", "level", "start", "stop", "count", "M", "samples", "seed", "max_norm",
    "max_dim", "form", "mu", "ray", "workers", "tol_square", "tol_kernel", "tol_cocycle",
    "tol_fd", "output", "schema_version",
}


def read_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment; keys use flag names."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        key = "M" if key.lower() == "m" else key
        if key not in _FLAG_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def parse_config(argv) -> RunConfig:
    parser, subs = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.error("a command is required")
    if ns.config:
        # file values become string defaults; argparse converts them and flags win
        subs[ns.command].set_defaults(**read_config_file(ns.config))
        ns = parser.parse_args(argv)
    tolerances = {k: getattr(ns, f"tol_{k}") for k in ("square", "kernel", "cocycle", "fd")}
    kwargs = {
        k: getattr(ns, k)
        for k in ("group", "weight", "level", "start", "stop", "count", "M", "samples", "seed",
                  "max_norm", "max_dim", "form", "mu", "ray", "workers", "output", "schema_version")
        if getattr(ns, k) is not None
    }
    return RunConfig(ns.command, tolerances={k: v for k, v in tolerances.items() if v is not None}, **kwargs)


# commands; each returns (results, residuals)


def _weight(rs, cfg: RunConfig) -> WeightVector:
    w = cfg.weight if cfg.weight is not None else (0,) * rs.rank
    if len(w) != rs.rank:
        raise UsageError(f"weight {w} has {len(w)} entries; {rs.tag} has rank {rs.rank}")
    return WeightVector(rs, w)


def _label(w) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"


def cmd_verify_square(cfg: RunConfig):
    rs = build_root_system(cfg.group)
    lam = _weight(rs, cfg)
    rep = irrep_matrices(rs, lam)
    df = cubic_dirac(rep)
    rng = np.random.default_rng(cfg.seed)
    points, sq, cv = [], [], []
    for _ in range(cfg.samples):
        mu = random_cartan(rs, rng, cfg.max_norm)
        a, b = verify_square_identity(df, mu), curvature_residual(df, mu)
        sq.append(a)
        cv.append(b)
        points.append({"mu": [float(x) for x in mu.real], "square_residual": a, "curvature_residual": b})
    max_sq, max_cv = max(sq, default=0.0), max(cv, default=0.0)
    ok = max_sq <= cfg.tol("square") and max_cv <= cfg.tol("square")
    result = {
        "check": "verify-square",
        "group": rs.tag,
        "weight": list(lam.coords),
        "dim": df.dim,
        "lam_rho_norm2": df.scalar,
        "max_residual": max_sq,
        "max_curvature_residual": max_cv,
        "samples": points,
        "pass": ok,
    }
    summary = f"{rs.tag} weight {_label(lam.coords)}: max square residual {max_sq:.2e}, curvature {max_cv:.2e}"
    return [result], {"square": max_sq, "curvature": max_cv}, [(ok, "verify-square", summary)]


def cmd_scan_kernel(cfg: RunConfig):
    rs = build_root_system(cfg.group)
    lam = _weight(rs, cfg)
    df = cubic_dirac(irrep_matrices(rs, lam))
    if cfg.ray is None:
        # unit vector along the first simple coroot
        ray = np.zeros(rs.rank)
        ray[0] = 1 / math.sqrt(float(rs.coroot_gram[0][0]))
    else:
        if len(cfg.ray) != rs.rank:
            raise UsageError(f"ray needs {rs.rank} coordinates")
        ray = np.array(cfg.ray, dtype=float)
    grid = np.linspace(cfg.start, cfg.stop, cfg.count)
    scan = kernel_locus_scan(df, CartanVector(rs, ray), grid, workers=cfg.workers)
    res = scan.to_json()
    ok = True
    if scan.predicted_s:
        nearest = min(scan.predicted_s, key=lambda s: abs(s - scan.refined_s))
        offset = abs(scan.refined_s - nearest)
        far = np.array([min(abs(s - p) for p in scan.predicted_s) for s in grid]) >= OFF_ORBIT_GAP
        off_min = float(scan.sigma[far].min()) if far.any() else float("inf")
        ok = offset <= LOCALIZATION_TOL and scan.refined_sigma < cfg.tol("kernel") and off_min >= OFF_ORBIT_FLOOR
        res.update(localization_offset=offset, off_orbit_min_sigma=off_min if far.any() else None)
        summary = (
            f"{rs.tag} weight {_label(lam.coords)}: minimum at s={scan.refined_s:.12f} "
            f"(predicted {nearest:.12f}), sigma {scan.refined_sigma:.1e}, off-orbit min {off_min:.3f}"
        )
    else:
        ok = scan.refined_sigma >= cfg.tol("kernel")
        summary = f"{rs.tag} weight {_label(lam.coords)}: no predicted kernel on ray, min sigma {scan.refined_sigma:.3e}"
    res.update(check="scan-kernel", group=rs.tag, weight=list(lam.coords), dim=df.dim, **{"pass": ok})
    return [res], {"refined_sigma": scan.refined_sigma}, [(ok, "scan-kernel", summary)]


def cmd_vanishing(cfg: RunConfig):
    rs = build_root_system(cfg.group)
    if rs.is_torus:
        raise PreconditionError("no nonabelian centralizer for a torus")
    weights = [cfg.weight] if cfg.weight is not None else dominant_weights_up_to_dim(rs, cfg.max_dim)
    zero = CartanVector(rs, [Fraction(0)] * rs.rank)
    results, lines, worst = [], [], 0.0
    for w in weights:
        rep = irrep_matrices(rs, WeightVector(rs, tuple(w)))
        cert = vanishing_certificate(rep, cubic_dirac(rep), zero, tol=cfg.tol("square"))
        worst = max(worst, cert.scalar_residual)
        results.append({"check": "vanishing", "group": rs.tag, "weight": list(w), "dim": rep.dim, **cert.to_json()})
        lines.append((cert.passed, "vanishing", f"{rs.tag} weight {_label(w)}: D0^2 = {frac_str(cert.exact_value)}, residual {cert.scalar_residual:.1e}"))
    return results, {"scalar": worst}, lines


def cmd_verlinde(cfg: RunConfig):
    rs = build_root_system(cfg.group)
    if rs.is_torus:
        if cfg.form is None:
            raise UsageError("a torus needs --form")
        vd = verlinde_kernel_points(rs.rank, cfg.form)
    else:
        vd = verlinde_classes_simple(rs, cfg.level)
    ok = vd.count == vd.determinant
    res = {"check": "verlinde", **vd.to_json(), "pass": ok}
    if rs.is_torus:
        summary = f"{rs.tag}: {vd.count} kernel points, det {vd.determinant}"
    else:
        summary = f"{rs.tag} level {cfg.level}: {vd.count} kernel points (det {vd.determinant}), {len(vd.representatives)} representatives"
    return [res], {"count_minus_det": abs(vd.count - vd.determinant)}, [(ok, "verlinde", summary)]


def cmd_torus_potential(cfg: RunConfig):
    form = cfg.form if cfg.form is not None else ((2, 1), (1, 4))
    r = len(form)
    lam = cfg.weight if cfg.weight is not None else (1,) * r
    sheet = PotentialSheet(lam, form)
    crit = sheet.critical_point
    grad_exact = sheet.gradient(crit)
    # central differences at the critical point and at a shifted point
    rng = np.random.default_rng(cfg.seed)
    fd_err = 0.0
    for base in (np.array([float(c) for c in crit]), np.array([float(c) for c in crit]) + rng.normal(size=r)):
        for i in range(r):
            e = np.zeros(r)
            e[i] = FD_STEP
            fd = (torus_sheet_potential(sheet, base + e) - torus_sheet_potential(sheet, base - e)) / (2 * FD_STEP)
            an = float(sheet.gradient([float(x) for x in base])[i])
            fd_err = max(fd_err, abs(fd - an))
    descents, integral = [], True
    for _ in range(cfg.samples):
        p = random_lattice_vector(rng, r)
        mu = [random_rational(rng) for _ in range(r)]
        d = translation_descent_check(sheet, p, mu)
        integral &= d.denominator == 1
        descents.append({"p": list(p), "mu": [frac_str(x) for x in mu], "shift": frac_str(d)})
    crit_ok = all(g == 0 for g in grad_exact)
    ok = crit_ok and fd_err <= cfg.tol("fd") and integral
    res = {
        "check": "torus-potential",
        "form": [list(row) for row in form],
        "sheet": list(sheet.lam),
        "critical_point": [frac_str(x) for x in crit],
        "critical_value": frac_str(sheet.critical_value),
        "determinant": int(frac_det(sheet.form)),
        "gradient_at_critical": [frac_str(x) for x in grad_exact],
        "fd_gradient_error": fd_err,
        "descent": descents,
        "pass": ok,
    }
    summary = (
        f"sheet {_label(sheet.lam)}: critical point {_label(frac_str(x) for x in crit)}, "
        f"fd error {fd_err:.1e}, {len(descents)} integral descents: {integral}"
    )
    return [res], {"fd_gradient": fd_err}, [(ok, "torus-potential", summary)]


def cmd_cocycle(cfg: RunConfig):
    rs = build_root_system(cfg.group)
    rng = np.random.default_rng(cfg.seed)
    lines, results = [], []
    law = {}
    for name, alg in (("cartan", cartan_loop_algebra(rs)), ("full", loop_algebra(rs))):
        worst = 0.0
        for _ in range(cfg.samples):
            g1, g2, v = random_triple(alg, cfg.M, rng)
            worst = max(worst, action_law_residual(g1, g2, v))
        law[name] = worst
    # the full nonabelian model is truncated, so only the Cartan model carries the contract
    ok_law = law["cartan"] <= cfg.tol("cocycle")
    results.append({"check": "action-law", "group": rs.tag, "M": cfg.M, "samples": cfg.samples,
                    "cartan_residual": law["cartan"], "nonabelian_residual": law["full"], "pass": ok_law})
    lines.append((ok_law, "cocycle", f"{rs.tag} action law at M={cfg.M}: Cartan {law['cartan']:.1e}, nonabelian (truncated) {law['full']:.1e}"))

    mu = cfg.mu if cfg.mu is not None else tuple(Fraction(1, 6) if i == 0 else Fraction(0) for i in range(rs.rank))
    if len(mu) != rs.rank:
        raise UsageError(f"mu needs {rs.rank} coordinates")
    lp = local_superpotential(rs, CartanVector(rs, list(mu)), M=cfg.M)
    sheet_value = None
    if lp.potential_exact is not None:
        vac = PotentialSheet((0,) * rs.rank, tuple(tuple(x for x in row) for row in rs.coroot_gram))
        sheet_value = torus_sheet_potential(vac, list(mu))
    exact_ok = sheet_value is None or sheet_value == lp.potential_exact
    worst = max(lp.residuals.values())
    ok_lp = worst <= cfg.tol("cocycle") and exact_ok
    results.append({"check": "local-superpotential", "group": rs.tag, **lp.to_json(),
                    "vacuum_sheet_value": frac_str(sheet_value) if sheet_value is not None else None, "pass": ok_lp})
    lines.append((ok_lp, "cocycle", f"{rs.tag} mu {_label(frac_str(x) for x in mu)}: 2 pi i W = {lp.central_value.imag:.12f}i, "
                                    f"W = {frac_str(lp.potential_exact) if lp.potential_exact is not None else '?'}, residual {worst:.1e}"))
    return results, {"action_law": law["cartan"], "local_superpotential": worst}, lines


def cmd_calibrate(cfg: RunConfig):
    rs = build_root_system(cfg.group)
    cal = calibrate(rs)
    table = [{**c.to_json(), "residual": r} for c, r in calibration_table(rs)]
    res = {"check": "calibrate", "root_system": rs.to_json(), "calibration": cal.to_json(), "candidates": table, "pass": True}
    summary = f"{rs.tag}: kappa={cal.kappa}, cubic={frac_str(cal.cubic)}, t_sign={cal.t_sign}"
    return [res], {}, [(True, "calibrate", summary)]


def cmd_all(cfg: RunConfig):
    results, residuals, lines = [], {}, []
    base = asdict(cfg)
    runs = [
        ("calibrate", {}),
        ("verify-square", {}),
        ("vanishing", {"weight": None}),
        ("scan-kernel", {"group": "A1", "weight": (3,), "ray": None}),
        ("verlinde", {}),
        ("torus-potential", {"weight": None, "form": None}),
        ("cocycle", {"group": "A1", "mu": None}),
    ]
    for name, over in runs:
        if name in ("calibrate", "vanishing") and build_root_system(cfg.group).is_torus:
            continue
        sub = RunConfig(**{**base, "command": name, **over})
        r, res, ln = COMMAND_FUNCS[name](sub)
        results += r
        residuals.update({f"{name}.{k}": v for k, v in res.items()})
        lines += ln
    return results, residuals, lines


COMMAND_FUNCS = {
    "verify-square": cmd_verify_square,
    "scan-kernel": cmd_scan_kernel,
    "vanishing": cmd_vanishing,
    "verlinde": cmd_verlinde,
    "torus-potential": cmd_torus_potential,
    "cocycle": cmd_cocycle,
    "calibrate": cmd_calibrate,
    "all": cmd_all,
}


def run_command(argv=None, stdout=None) -> int:
    """Run one command; returns the exit code."""
    out = stdout or sys.stdout
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"diracmf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        results, residuals, lines = COMMAND_FUNCS[cfg.command](cfg)
    except (UsageError, *INPUT_ERRORS) as exc:
        print(f"diracmf {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CalibrationError as exc:
        print(f"diracmf {cfg.command}: contract failure: {exc}", file=sys.stderr)
        return EXIT_FAIL

    passed = all(ok for ok, _, _ in lines)
    path = cfg.output or str(Path("reports") / f"{cfg.command}.json")
    try:
        report_mod.emit_report(results, path, config=cfg.to_json(), residuals=residuals, passed=passed)
    except OSError as exc:
        print(f"diracmf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for ok, name, text in lines:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {text}", file=out)
    print(f"report: {path}", file=out)
    if not passed:
        print("failing residuals: " + ", ".join(f"{k}={v:.3e}" for k, v in sorted(residuals.items())), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
