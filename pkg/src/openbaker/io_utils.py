"""Flat-file output helpers: CSV, JSON sidecars and P5 graymaps.

All CSV content is deterministic for a fixed configuration; wall-clock
provenance and checksums live in the JSON sidecars only.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

__all__ = ["fmt", "write_csv", "write_sidecar", "write_pgm", "sha256_file"]


def fmt(x) -> str:
    """Decimal rendering with 17 significant digits (round-trip safe)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\r\n").writerows(rows)
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_sidecar(artifact_path, config: dict, extra: dict | None = None) -> Path:
    """JSON sidecar next to an artifact: config echo, version, checksum,
    timestamp."""
    from . import __version__

    artifact_path = Path(artifact_path)
    meta = {
        "artifact": artifact_path.name,
        "config": config,
        "version": __version__,
        "sha256": sha256_file(artifact_path),
        "written_at": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    out = artifact_path.with_suffix(artifact_path.suffix + ".json")
    out.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    return out


def write_pgm(path, values: np.ndarray, config: dict, bits: int = 16,
              extra: dict | None = None) -> Path:
    """Binary P5 graymap scaled to the full integer range, with the value
    range recorded in the sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    vals = np.asarray(values, dtype=float)
    lo, hi = float(vals.min()), float(vals.max())
    maxval = (1 << bits) - 1
    if hi > lo:
        scaled = np.round((vals - lo) / (hi - lo) * maxval)
    else:
        scaled = np.zeros_like(vals)
    scaled = scaled.astype(">u2" if bits == 16 else np.uint8)
    h, w = vals.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode())
        fh.write(scaled.tobytes())
    meta = {"value_min": lo, "value_max": hi, "bits": bits,
            "axis_mapping": "rows: first axis ascending, columns: second axis ascending"}
    if extra:
        meta.update(extra)
    write_sidecar(path, config, meta)
    return path
