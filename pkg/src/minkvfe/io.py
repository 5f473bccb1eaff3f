"""
File formats
============

* curve CSV ``s,x0,x1,x2``
* frame CSV ``s,T0,T1,T2,E1_0,E1_1,E1_2,E2_0,E2_1,E2_2,k1,k2,theta``
* run manifest and residual reports as sorted, indented JSON

CSV numbers are written with 15 significant digits and JSON keeps full
double precision. A run directory saved from what was loaded is byte
identical, since ``ds`` comes from the manifest; a bare curve CSV rebuilds
its s column from the mean spacing.
"""

import json
import os
from pathlib import Path

import numpy as np

from .curve import DiscreteCurve, Topology
from .errors import RunDirectoryError
from .flow import FlowConfig, FlowHistory
from .frames import CausalCase, ParallelFrameField

FMT = "%.15g"
CURVE_HEADER = ["s", "x0", "x1", "x2"]
FRAME_HEADER = ["s", "T0", "T1", "T2", "E1_0", "E1_1", "E1_2",
                "E2_0", "E2_1", "E2_2", "k1", "k2", "theta"]
MANIFEST = "manifest.json"
OUTPUT_ROOT_ENV = "MINKVFE_OUTPUT_ROOT"


def _fmt(x):
    x = float(x)
    if np.isnan(x):
        return "nan"
    # 15 significant digits; avoid "-0"
    return FMT % (x + 0.0)


def write_csv(path, header, rows):
    rows = np.asarray(rows, dtype=np.float64)
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path, header):
    path = Path(path)
    if not path.is_file():
        raise RunDirectoryError(f"missing file {path}")
    text = path.read_text().splitlines()
    if not text or text[0].split(",") != header:
        raise RunDirectoryError(f"{path.name}: expected header {','.join(header)}")
    try:
        data = np.array([[float(v) for v in line.split(",")] for line in text[1:] if line],
                        dtype=np.float64)
    except ValueError as exc:
        raise RunDirectoryError(f"{path.name}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise RunDirectoryError(f"{path.name}: truncated or malformed rows")
    return data


def save_curve(path, c):
    write_csv(path, CURVE_HEADER, np.column_stack([c.s, c.samples]))


def load_curve(path, topology=Topology.OPEN, shift=None):
    """Curve from a curve CSV; ``ds`` is the mean spacing of the s column."""
    data = read_csv(path, CURVE_HEADER)
    if len(data) < 2:
        raise RunDirectoryError(f"{Path(path).name}: need at least two samples")
    s = data[:, 0]
    ds = float((s[-1] - s[0]) / (len(s) - 1))
    shift = np.zeros(3) if shift is None else np.asarray(shift, dtype=np.float64)
    return DiscreteCurve(data[:, 1:], ds, topology, shift=shift, s0=float(s[0]))


def save_frame(path, pf):
    write_csv(path, FRAME_HEADER,
              np.column_stack([pf.s, pf.T, pf.E1, pf.E2, pf.k1, pf.k2, pf.theta]))


def load_frame(path, case, ds=None, closed=False, holonomy=0.0):
    data = read_csv(path, FRAME_HEADER)
    s = data[:, 0]
    if ds is None:
        ds = float((s[-1] - s[0]) / (len(s) - 1))
    return ParallelFrameField(T=data[:, 1:4], E1=data[:, 4:7], E2=data[:, 7:10],
                              k1=data[:, 10], k2=data[:, 11], theta=data[:, 12],
                              case=case, ds=ds, closed=closed, s0=float(s[0]),
                              holonomy=holonomy)


def dump_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def load_json(path):
    path = Path(path)
    if not path.is_file():
        raise RunDirectoryError(f"missing file {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise RunDirectoryError(f"{path.name}: {exc}") from None


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, Path):
        return str(x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def resolve_output(path):
    """Relative output paths are placed under ``$MINKVFE_OUTPUT_ROOT`` when set."""
    path = Path(path)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


# ---------------------------------------------------------------------------
# run directories


def snapshot_names(j):
    return f"curve_{j:05d}.csv", f"frame_{j:05d}.csv"


def save_history(run_dir, h, config_echo=None):
    """Write snapshots and the manifest of a flow history."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    snaps = []
    for j, (t, c, pf) in enumerate(zip(h.times, h.curves, h.frames)):
        cn, fn = snapshot_names(j)
        save_curve(run_dir / cn, c)
        save_frame(run_dir / fn, pf)
        snaps.append({"index": j, "time": t, "curve": cn, "frame": fn,
                      "drift": h.drift[j], "speed_deviation": h.speed_deviation[j],
                      "holonomy": pf.holonomy, "seed_E1": h.seeds[j]})
    c0 = h.curves[0]
    manifest = {
        "format": 1,
        "config": config_echo or {},
        "flow": {"dt": h.config.dt, "steps": h.config.steps,
                 "record_every": h.config.record_every,
                 "unit_speed_tol": h.config.unit_speed_tol,
                 "resample_on_drift": h.config.resample_on_drift},
        "case": h.case.value,
        "causal_class": c0.causal_class.value,
        "topology": c0.topology.value,
        "shift": c0.shift,
        "n": c0.n,
        "ds": c0.ds,
        "gauge": {"c": h.config.gauge_c, "seed_index": h.seed_index},
        "max_drift": float(np.max(h.drift)),
        "events": h.events,
        "snapshots": snaps,
    }
    dump_json(run_dir / MANIFEST, manifest)
    return manifest


def load_history(run_dir):
    """Rebuild a FlowHistory from a run directory written by :func:`save_history`."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise RunDirectoryError(f"no run directory at {run_dir}")
    man = load_json(run_dir / MANIFEST)
    try:
        case = CausalCase(man["case"])
        topology = Topology(man["topology"])
        flow = man["flow"]
        snaps = man["snapshots"]
        ds = float(man["ds"])
        shift = man.get("shift")
    except (KeyError, ValueError, TypeError) as exc:
        raise RunDirectoryError(f"manifest incomplete: {exc}") from None
    if len(snaps) == 0:
        raise RunDirectoryError("manifest lists no snapshots")
    closed = topology is Topology.CLOSED
    curves, frames = [], []
    for snap in snaps:
        c = load_curve(run_dir / snap["curve"], topology, shift)
        c = DiscreteCurve(c.samples, ds, topology, c.shift, c.s0)
        pf = load_frame(run_dir / snap["frame"], case, ds, closed, snap.get("holonomy", 0.0))
        if c.n != man["n"] or pf.n != man["n"]:
            raise RunDirectoryError(f"snapshot {snap['index']} has the wrong sample count")
        curves.append(c)
        frames.append(pf)
    cfg = FlowConfig(dt=float(flow["dt"]), steps=int(flow["steps"]),
                     record_every=int(flow["record_every"]),
                     unit_speed_tol=float(flow["unit_speed_tol"]),
                     resample_on_drift=bool(flow["resample_on_drift"]))
    return FlowHistory(
        times=np.array([s["time"] for s in snaps], dtype=np.float64),
        curves=curves, frames=frames,
        k1=np.array([f.k1 for f in frames]), k2=np.array([f.k2 for f in frames]),
        case=case, config=cfg,
        drift=np.array([s["drift"] for s in snaps], dtype=np.float64),
        speed_deviation=np.array([s["speed_deviation"] for s in snaps], dtype=np.float64),
        seed_index=int(man["gauge"]["seed_index"]),
        seeds=np.array([s["seed_E1"] for s in snaps], dtype=np.float64),
        events=list(man.get("events", [])))


def save_residual_grid(path, R, ds, dt, s0=0.0):
    """Residual grid as CSV ``t,s,value`` (real part and imaginary part columns
    for complex grids)."""
    R = np.asarray(R)
    m, n = R.shape
    t = dt * (1 + np.arange(m))
    s = s0 + ds * (1 + np.arange(n))
    tt, ss = np.meshgrid(t, s, indexing="ij")
    if np.iscomplexobj(R):
        write_csv(path, ["t", "s", "re", "im"],
                  np.column_stack([tt.ravel(), ss.ravel(), R.real.ravel(), R.imag.ravel()]))
    else:
        write_csv(path, ["t", "s", "value"], np.column_stack([tt.ravel(), ss.ravel(), R.ravel()]))
