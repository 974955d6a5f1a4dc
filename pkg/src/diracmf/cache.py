"""Optional on-disk cache of irrep generator matrices.

Enabled by setting ``DIRACMF_CACHE_DIR``.  Each entry is one file: a JSON
header line followed by little-endian float64/int64 array bytes, so a
cached load reproduces the freshly built arrays bit for bit.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

ENV_VAR = "DIRACMF_CACHE_DIR"
FORMAT = "diracmf-irrep-v1"


def cache_dir() -> Path | None:
    d = os.environ.get(ENV_VAR)
    return Path(d) if d else None


def _path(root: Path, tag: str, lam) -> Path:
    return root / f"{tag}_{'_'.join(str(int(c)) for c in lam)}.irrep"


def store(tag: str, lam, weights: np.ndarray, raising: np.ndarray) -> Path | None:
    root = cache_dir()
    if root is None:
        return None
    root.mkdir(parents=True, exist_ok=True)
    w = np.ascontiguousarray(weights, dtype="<i8")
    e = np.ascontiguousarray(raising, dtype="<f8")
    header = {
        "format": FORMAT,
        "tag": tag,
        "lambda": [int(c) for c in lam],
        "weights_shape": list(w.shape),
        "raising_shape": list(e.shape),
    }
    path = _path(root, tag, lam)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(w.tobytes())
        fh.write(e.tobytes())
    os.replace(tmp, path)
    return path


def load(tag: str, lam):
    """Return ``(weights, raising)`` or ``None`` when absent or unreadable."""
    root = cache_dir()
    if root is None:
        return None
    path = _path(root, tag, lam)
    if not path.exists():
        return None
    with open(path, "rb") as fh:
        header = json.loads(fh.readline())
        body = fh.read()
    if header.get("format") != FORMAT or header.get("tag") != tag or header.get("lambda") != [int(c) for c in lam]:
        return None
    ws, es = header["weights_shape"], header["raising_shape"]
    nw = int(np.prod(ws)) * 8
    if len(body) != nw + int(np.prod(es)) * 8:
        return None
    weights = np.frombuffer(body[:nw], dtype="<i8").reshape(ws).astype(int)
    raising = np.frombuffer(body[nw:], dtype="<f8").reshape(es).astype(float)
    return weights, raising
