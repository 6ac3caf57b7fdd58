"""Deterministic run outputs: CSV tables, snapshots, and a hash manifest.

Floats are rendered with the %.17g round-trip format and every table is
written in a fixed row/column order, so reruns with identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = [
    "fmt",
    "write_csv",
    "write_json",
    "record_rows",
    "RECORD_COLUMNS",
    "write_field_snapshot",
    "read_field_snapshot",
    "write_flux_snapshot",
    "write_manifest",
]


def fmt(x) -> str:
    """Round-trip text for one value (floats via %.17g)."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True,
                               default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


RECORD_COLUMNS = [
    "p", "beta", "c", "grad_residual", "lambda_proxy", "iterations",
    "status", "grad_lp", "pnorm_cap", "pnorm_ok", "moser_bound",
    "sup_u", "flux_sup", "tv", "superlevel",
]


def record_rows(records) -> list[list]:
    """Sweep records flattened into the fixed CSV column order."""
    rows = []
    for r in records:
        rows.append([
            r.p, r.beta, r.c, r.grad_residual, r.lambda_proxy,
            r.iterations, r.status, r.grad_lp, r.pnorm_cap, r.pnorm_ok,
            r.moser.bound, r.sup_u, r.flux_sup, r.tv, r.superlevel,
        ])
    return rows


def write_field_snapshot(path: str | Path, field) -> Path:
    """Nodal values of a P1 field, one per line after a count header."""
    path = Path(path)
    lines = [f"field {len(field.values)} {int(field.dirichlet)}"]
    lines.extend(fmt(v) for v in field.values)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_field_snapshot(path: str | Path, mesh):
    from .fields import FeField

    lines = Path(path).read_text().splitlines()
    tag, count, dirichlet = lines[0].split()
    if tag != "field":
        raise ValueError(f"not a field snapshot: {path}")
    values = np.array([float(s) for s in lines[1:1 + int(count)]])
    return FeField(mesh, values, dirichlet=bool(int(dirichlet)))


def write_flux_snapshot(path: str | Path, flux) -> Path:
    """Per-element flux vectors, one row per element."""
    path = Path(path)
    lines = [f"flux {flux.vectors.shape[0]} {flux.vectors.shape[1]}"]
    lines.extend(" ".join(fmt(c) for c in row) for row in flux.vectors)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_manifest(out_dir: str | Path, files: list[Path]) -> Path:
    """SHA-256 manifest of the run outputs (sorted by file name)."""
    out_dir = Path(out_dir)
    entries = {}
    for f in sorted(files, key=lambda p: p.name):
        digest = hashlib.sha256(Path(f).read_bytes()).hexdigest()
        entries[f.name] = digest
    return write_json(out_dir / "manifest.json", {"files": entries})
