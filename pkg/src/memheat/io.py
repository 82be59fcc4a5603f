"""CSV and manifest I/O.

All floats are written with 17 significant digits so identical runs produce
byte-identical files; tabular data is CSV with a `#`-comment header block.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .forward import FieldSolution, Geometry, RampControl, SampledControl
from .inverse import ReconstructionResult, ResponseRecord
from .laplace import TimeSignal

FMT = "%.17g"


def _fmt(v) -> str:
    return FMT % float(v)


def write_field_csv(path, field: FieldSolution, x_every: int = 1, t_every: int = 1):
    """Field export: columns x,t,theta (x-major), optionally strided."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# scheme = {field.scheme}\n")
        fh.write(f"# kernel = {field.kernel_form}\n")
        fh.write("x,t,theta\n")
        for ix in range(0, len(field.x_grid), x_every):
            x = field.x_grid[ix]
            row = field.values[ix]
            for it in range(0, len(field.t_grid), t_every):
                fh.write(f"{_fmt(x)},{_fmt(field.t_grid[it])},{_fmt(row[it])}\n")


def write_response_csv(path, record: ResponseRecord):
    """Response export: header block with kernel/control/geometry, columns t,r."""
    path = Path(path)
    geo = "inf" if record.geometry.is_infinite else _fmt(record.geometry.L)
    with path.open("w") as fh:
        fh.write(f"# provenance = {record.provenance}\n")
        fh.write(f"# control = {record.control.kind}\n")
        fh.write(f"# geometry_L = {geo}\n")
        fh.write(f"# dt = {_fmt(record.r.dt)}\n")
        fh.write("t,r\n")
        for t, v in zip(record.r.times, record.r.values):
            fh.write(f"{_fmt(t)},{_fmt(v)}\n")


def read_response_csv(path) -> ResponseRecord:
    """Read a record in the layout produced by write_response_csv."""
    path = Path(path)
    meta = {}
    rows = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line.lstrip("# ").partition("=")
                meta[key.strip()] = val.strip()
            elif line[0].isdigit() or line[0] in "+-.":
                a, b = line.split(",")
                rows.append((float(a), float(b)))
    if len(rows) < 2:
        raise ValueError(f"{path}: fewer than two samples")
    t = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ValueError(f"{path}: non-uniform time grid")
    geo_raw = meta.get("geometry_L", "inf")
    geometry = Geometry() if geo_raw == "inf" else Geometry(L=float(geo_raw))
    kind = meta.get("control", "ramp")
    if kind == "ramp":
        control = RampControl()
    else:
        raise ValueError(f"{path}: unsupported control kind {kind!r}")
    return ResponseRecord(geometry=geometry, control=control,
                          r=TimeSignal(dt=float(dt), values=v),
                          provenance=meta.get("provenance", "external"))


def write_reconstruction(path_csv, path_meta, result: ReconstructionResult,
                         extra_meta: dict | None = None):
    """Reconstruction export: CSV (t,k,err) plus a JSON metadata file."""
    path_csv = Path(path_csv)
    with path_csv.open("w") as fh:
        fh.write(f"# a_estimate = {_fmt(result.a_estimate)}\n")
        fh.write(f"# T_reliable = {_fmt(result.T_reliable)}\n")
        fh.write("t,k,err\n")
        for t, k, e in zip(result.k.times, result.k.values, result.k_err):
            fh.write(f"{_fmt(t)},{_fmt(k)},{_fmt(e)}\n")
    meta = {
        "a_estimate": result.a_estimate,
        "T_reliable": result.T_reliable,
        "grid_z": [[z.real, z.imag] for z in result.z_points],
        "grid_eps": [float(e) for e in result.eps_values],
        "K_values": [[v.real, v.imag] for v in result.K_values],
    }
    if extra_meta:
        meta.update(extra_meta)
    Path(path_meta).write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def write_manifest(path, config_path, tolerances: dict, extra: dict | None = None):
    """Record everything needed to re-run: config hash, defaults, versions."""
    from . import __version__

    digest = hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
    manifest = {
        "config_sha256": digest,
        "package_version": __version__,
        "tolerances": {k: (v if not isinstance(v, float) or math.isfinite(v) else str(v))
                       for k, v in tolerances.items()},
    }
    if extra:
        manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
