"""CSV persistence with JSON metadata sidecars.

Quadrature batches are single-column CSV (column ``x``); voltage records
are two-column CSV (``t``, ``v``).  Each file gets a ``.json`` sidecar next
to it carrying the generating parameters, so a data file is reproducible
from its sidecar alone.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from .sampler import QuadratureBatch, StateSpec, TimeTrace


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_report(report: dict, path) -> None:
    _write_json(report, path)


def write_quadrature_batch(batch: QuadratureBatch, path, state: StateSpec | None = None) -> None:
    path = Path(path)
    pd.DataFrame({"x": batch.samples}).to_csv(path, index=False)
    meta = {
        "kind": "quadrature_batch",
        "n": int(batch.count),
        "phase_mode": batch.phase_mode,
        "theta": batch.theta,
        "seed": batch.seed,
        "state": state.to_dict() if state is not None else None,
    }
    _write_json(meta, sidecar_path(path))


def read_quadrature_batch(path) -> tuple[QuadratureBatch, dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such batch file: {path}")
    x = pd.read_csv(path, float_precision="round_trip")["x"].to_numpy(dtype=float)
    side = sidecar_path(path)
    meta = read_json(side) if side.exists() else {}
    batch = QuadratureBatch(
        x,
        phase_mode=meta.get("phase_mode", "averaged"),
        seed=meta.get("seed"),
        theta=meta.get("theta"),
    )
    return batch, meta


def write_timetrace(trace: TimeTrace, path, extra: dict | None = None) -> None:
    path = Path(path)
    pd.DataFrame({"t": trace.times, "v": trace.samples}).to_csv(path, index=False)
    meta = {
        "kind": "timetrace",
        "fs": trace.fs,
        "impedance": trace.impedance,
        "t0": trace.t0,
        "n": int(trace.samples.size),
    }
    if extra:
        meta.update(extra)
    _write_json(meta, sidecar_path(path))


def read_timetrace(path) -> tuple[TimeTrace, dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such trace file: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    t = frame["t"].to_numpy(dtype=float)
    v = frame["v"].to_numpy(dtype=float)
    side = sidecar_path(path)
    meta = read_json(side) if side.exists() else {}
    fs = meta.get("fs")
    if fs is None:
        steps = np.diff(t)
        fs = 1.0 / float(np.mean(steps))
    trace = TimeTrace(
        fs=fs,
        impedance=meta.get("impedance", 50.0),
        samples=v,
        t0=meta.get("t0", float(t[0])),
    )
    return trace, meta


def write_quadrature_pair(x: TimeTrace, p: TimeTrace, path) -> None:
    """Three-column CSV (t, x, p) for quadrature plots."""
    pd.DataFrame({"t": x.times, "x": x.samples, "p": p.samples}).to_csv(
        Path(path), index=False
    )


def write_boundary_csv(curve: np.ndarray, path) -> None:
    pd.DataFrame({"n": curve[:, 0], "boundary": curve[:, 1]}).to_csv(
        Path(path), index=False
    )
