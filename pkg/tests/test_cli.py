import io
import json
import subprocess
import sys

import pytest

from diracmf.cli import RunConfig, UsageError, parse_config, run_command
from diracmf.report import dumps, strip_volatile


def run(args, tmp_path, name="r.json"):
    out = tmp_path / name
    buf = io.StringIO()
    code = run_command(list(args) + ["--output", str(out)], stdout=buf)
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report, buf.getvalue()


def test_verify_square_example(tmp_path):
    code, rep, text = run(["verify-square", "--group", "A1", "--weight", "3", "--samples", "20"], tmp_path)
    assert code == 0 and rep["pass"]
    (res,) = rep["results"]
    assert res["max_residual"] <= 1e-9 and len(res["samples"]) == 20
    assert rep["residuals"]["square"] == res["max_residual"]
    assert "[PASS] verify-square" in text


def test_verlinde_example(tmp_path):
    code, rep, _ = run(["verlinde", "--group", "A1", "--level", "1"], tmp_path)
    assert code == 0
    (res,) = rep["results"]
    assert res["representative_count"] == 2 and res["representatives"] == [["1/6"], ["1/3"]]


def test_verlinde_torus(tmp_path):
    code, rep, _ = run(["verlinde", "--group", "T2", "--form", "2,1;1,4"], tmp_path)
    assert code == 0 and rep["results"][0]["count"] == 7


def test_calibrate_example(tmp_path):
    code, rep, text = run(["calibrate", "--group", "A2"], tmp_path)
    assert code == 0
    assert rep["results"][0]["calibration"] == {"kappa": 1, "cubic": "-1/12", "t_sign": 1}
    assert "kappa=1, cubic=-1/12, t_sign=1" in text
    assert set(rep["results"][0]["root_system"]) == {"tag", "cartan_matrix", "gram", "rho", "dual_coxeter"}


@pytest.mark.parametrize(
    "args",
    [
        ["scan-kernel", "--group", "A1", "--weight", "2"],
        ["scan-kernel", "--group", "A2", "--weight", "1,0", "--ray=-5,-4", "--stop", "1.5", "--count", "60", "--workers", "2"],
        ["vanishing", "--group", "A2", "--max-dim", "10"],
        ["torus-potential", "--form", "2,1;1,4", "--weight", "1,2"],
        ["cocycle", "--group", "A1", "--samples", "10", "--mu", "1/6"],
        ["cocycle", "--group", "A2", "--samples", "3", "--M", "4", "--mu", "1/5,1/7"],
        ["all", "--samples", "5"],
    ],
)
def test_commands_pass(args, tmp_path):
    code, rep, _ = run(args, tmp_path)
    assert code == 0 and rep["pass"], rep


def test_scan_kernel_report(tmp_path):
    code, rep, _ = run(["scan-kernel", "--weight", "1", "--count", "50", "--stop", "4"], tmp_path)
    res = rep["results"][0]
    assert code == 0 and len(res["points"]) == 50
    assert abs(res["refined"]["s"] - 2 / 2**0.5) <= 1e-3
    assert res["kernel_dim"] == res["kernel_dim_square"] == 1


# exit code 2: usage errors


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["bogus"],
        ["verify-square", "--samples", "many"],
        ["verify-square", "--unknown-flag"],
        ["scan-kernel", "--count", "1"],
        ["scan-kernel", "--start", "3", "--stop", "1"],
        ["verify-square", "--tol-square", "0"],
        ["verify-square", "--tol-square", "-1"],
        ["verify-square", "--group", "E8"],
        ["verify-square", "--group", "A2", "--weight", "1"],
        ["verify-square", "--group", "A2", "--weight", "-1,0"],
        ["verify-square", "--group", "A2", "--weight", "9,9"],
        ["verlinde", "--level", "0"],
        ["verlinde", "--group", "T2"],
        ["torus-potential", "--form", "1,0;0,2"],
        ["torus-potential", "--form", "2,x"],
        ["cocycle", "--mu", "1/2"],
        ["cocycle", "--mu", "1/2,1/3"],
        ["vanishing", "--group", "T1"],
        ["calibrate", "--group", "T2"],
        ["verify-square", "--config", "/nonexistent/cfg"],
    ],
)
def test_usage_errors(args, tmp_path):
    code = run_command(args + ["--output", str(tmp_path / "r.json")] if args else args, stdout=io.StringIO())
    assert code == 2
    assert not (tmp_path / "r.json").exists()


def test_help_exits_zero(capsys):
    assert run_command(["--help"]) == 0
    assert run_command(["verify-square", "--help"]) == 0


# exit code 1: contract failures


@pytest.mark.parametrize(
    "args",
    [
        ["verify-square", "--weight", "2", "--tol-square", "1e-20"],
        ["vanishing", "--group", "A2", "--max-dim", "3", "--tol-square", "1e-30"],
        ["scan-kernel", "--weight", "1", "--tol-kernel", "1e-40"],
        ["cocycle", "--samples", "3", "--tol-cocycle", "1e-40"],
        ["torus-potential", "--tol-fd", "1e-30"],
    ],
)
def test_contract_failures(args, tmp_path, capsys):
    code, rep, text = run(args, tmp_path)
    assert code == 1
    assert rep["pass"] is False
    assert "[FAIL]" in text
    assert "failing residuals" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert run_command(["verlinde", "--output", str(blocker / "x.json")], stdout=io.StringIO()) == 2


# config file


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ngroup = A2\nweight = 1,0\nsamples = 4\nseed=9\ntol-square = 1e-8\n")
    c = parse_config(["verify-square", "--config", str(cfg)])
    assert (c.group, c.weight, c.samples, c.seed, c.tol("square")) == ("A2", (1, 0), 4, 9, 1e-8)
    c = parse_config(["verify-square", "--config", str(cfg), "--samples", "2", "--group", "B2", "--weight", "0,1"])
    assert (c.group, c.weight, c.samples, c.seed) == ("B2", (0, 1), 2, 9)


@pytest.mark.parametrize("text", ["nonsense line\n", "colour = red\n", "samples = lots\n"])
def test_bad_config(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    assert run_command(["verify-square", "--config", str(cfg), "--output", str(tmp_path / "r.json")], stdout=io.StringIO()) == 2


def test_runconfig_invariants():
    with pytest.raises(UsageError):
        RunConfig("verify-square", count=1)
    with pytest.raises(UsageError):
        RunConfig("verify-square", tolerances={"square": 0.0})
    with pytest.raises(UsageError):
        RunConfig("nope")
    assert RunConfig("verify-square").tol("square") == 1e-9


# reports


def test_rerun_is_byte_identical_modulo_timestamp(tmp_path):
    args = ["verify-square", "--group", "B2", "--weight", "1,0", "--samples", "5", "--seed", "4"]
    _, a, _ = run(args, tmp_path, "a.json")
    _, b, _ = run(args, tmp_path, "b.json")
    # output path differs by construction; everything else must match
    a["config"].pop("output"), b["config"].pop("output")
    assert dumps(strip_volatile(a)) == dumps(strip_volatile(b))


def test_report_round_trips(tmp_path):
    out = tmp_path / "r.json"
    run_command(["verlinde", "--group", "A2", "--level", "2", "--output", str(out)], stdout=io.StringIO())
    text = out.read_text()
    assert dumps(json.loads(text)) == text


def test_default_output_location(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_command(["verlinde"], stdout=io.StringIO()) == 0
    assert (tmp_path / "reports" / "verlinde.json").exists()


def test_console_entry_point(tmp_path):
    out = tmp_path / "r.json"
    p = subprocess.run(
        [sys.executable, "-m", "diracmf.cli", "calibrate", "--group", "A1", "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert p.returncode == 0 and "kappa=1" in p.stdout
    p = subprocess.run([sys.executable, "-m", "diracmf.cli", "nope"], capture_output=True, text=True)
    assert p.returncode == 2 and "usage" in p.stderr
