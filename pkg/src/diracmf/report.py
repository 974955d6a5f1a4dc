"""JSON reports: stable key order, rationals as "p/q", shortest round-trip floats."""

from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"
VOLATILE_KEYS = ("timestamp",)


def _default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if is_dataclass(obj):
        return asdict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload) -> str:
    return json.dumps(payload, default=_default, sort_keys=True, indent=2) + "\n"


def build_report(results, config=None, residuals=None, passed=None, timestamp=True) -> dict:
    results = list(results)
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": config or {},
        "results": results,
        "residuals": residuals or {},
        "pass": all(r.get("pass", True) for r in results if isinstance(r, dict)) if passed is None else bool(passed),
    }
    if timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return report


def emit_report(results, path=None, config=None, residuals=None, passed=None) -> str:
    """Serialize a report and write it to ``path`` when given; returns the text."""
    text = dumps(build_report(results, config, residuals, passed))
    if path is not None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def strip_volatile(report: dict) -> dict:
    return {k: v for k, v in report.items() if k not in VOLATILE_KEYS}
