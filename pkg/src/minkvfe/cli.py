"""
Command-line driver
===================

Subcommands::

    minkvfe generate  --generator TimelikeHelix --n 128 --output-dir runs/seed
    minkvfe simulate  --generator Circle --n 128 --dt 1e-4 --steps 200 --output-dir runs/circle
    minkvfe verify    runs/circle
    minkvfe converge  --generator TimelikeHelix --n 128 --dt 4.8077e-4 --steps 1040 \\
                      --record-every 8 --jobs 3 --output-dir runs/conv

Flags mirror :class:`RunConfig`; ``--config file.json`` overrides them.
The environment variable ``MINKVFE_OUTPUT_ROOT`` only relocates relative
output directories. Exit codes: 0 pass, 1 acceptance failure,
2 configuration error, 3 numerical degeneracy.
"""

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import generators as gen
from . import io
from .curve import KAPPA_EPS, FRAME_TOL, DiscreteCurve, Topology, frenet_apparatus
from .errors import CaseMismatch, ConstraintViolation, FrenetUndefined, VFEError
from .flow import FlowConfig, run
from .frames import (CausalCase, FrameCoefficientMatrix, case_of, curvature_identity_defect,
                     frame_by_transport, frame_orthonormality_defect, frame_residual,
                     s_matrix)
from .lorentz import TOL_CAUSAL
from . import pde

log = logging.getLogger("minkvfe")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3


class Generator(Enum):
    LINE = "Line"
    CIRCLE = "Circle"
    TIMELIKE_HELIX = "TimelikeHelix"
    SPACELIKE_HELIX = "SpacelikeHelix"
    FROM_FILE = "FromFile"
    # non-rigid seeds used by the convergence studies
    WOBBLY_TIMELIKE_HELIX = "WobblyTimelikeHelix"
    WOBBLY_CIRCLE = "WobblyCircle"
    WOBBLY_SPACELIKE_HELIX = "WobblySpacelikeHelix"


@dataclass
class RunConfig:
    generator: Generator = Generator.TIMELIKE_HELIX
    case: CausalCase = None
    n: int = 128
    a: float = None
    b: float = None
    omega: float = 1.0
    radius: float = 1.0
    length: float = None
    timelike: bool = False
    amplitude: float = 0.1
    mode: int = 2
    file: str = None
    closed: bool = False
    dt: float = 1e-4
    steps: int = 100
    record_every: int = 1
    theta0: float = 0.0
    resample_on_drift: bool = False
    tol_causal: float = TOL_CAUSAL
    kappa_eps: float = KAPPA_EPS
    unit_speed_tol: float = 1e-3
    frame_tol: float = FRAME_TOL
    residual_tol: float = 1e-3
    identity_tol: float = 1e-8
    s_margin: int = None
    levels: int = 3
    horizon: str = "auto"
    order_target: float = 2.0
    order_tol: float = 0.2
    jobs: int = 1
    dump_residuals: bool = False
    output_dir: str = "minkvfe_run"

    def __post_init__(self):
        if isinstance(self.generator, str):
            self.generator = _enum_lookup(Generator, self.generator)
        if isinstance(self.case, str):
            self.case = _enum_lookup(CausalCase, self.case)
        if self.n < 8:
            raise ConstraintViolation("n must be at least 8")
        if not self.dt > 0 or self.steps < 0 or self.record_every < 1:
            raise ConstraintViolation("dt > 0, steps >= 0 and record_every >= 1 required")
        if self.levels < 1:
            raise ConstraintViolation("levels must be positive")
        if self.horizon not in ("auto", "fixed_time", "fixed_steps"):
            raise ConstraintViolation("horizon must be auto, fixed_time or fixed_steps")

    def echo(self):
        return {f.name: _plain(getattr(self, f.name)) for f in dataclasses.fields(self)}

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


def _plain(v):
    return v.value if isinstance(v, Enum) else v


def _enum_lookup(enum, name):
    for member in enum:
        if name in (member.value, member.name, member.name.lower()):
            return member
    raise ConstraintViolation(f"unknown {enum.__name__} {name!r}")


# ---------------------------------------------------------------------------
# operations


def generate(cfg):
    """Sample the configured seed curve; constraint violations are named."""
    g = cfg.generator
    if g is Generator.LINE:
        return gen.line(cfg.n, cfg.length or 1.0, timelike=cfg.timelike)
    if g is Generator.CIRCLE:
        return gen.circle(cfg.n, cfg.radius)
    if g is Generator.TIMELIKE_HELIX:
        return gen.timelike_helix(cfg.n, 1.0 if cfg.a is None else cfg.a, cfg.omega, cfg.b)
    if g is Generator.SPACELIKE_HELIX:
        return gen.spacelike_helix(cfg.n, 0.8 if cfg.b is None else cfg.b, cfg.omega, cfg.a,
                                   cfg.length or 2.0)
    if g is Generator.WOBBLY_TIMELIKE_HELIX:
        return gen.wobbly_timelike_helix(cfg.n, 0.8 if cfg.b is None else cfg.b, cfg.omega,
                                         cfg.amplitude, cfg.mode)
    if g is Generator.WOBBLY_CIRCLE:
        return gen.wobbly_circle(cfg.n, cfg.amplitude, cfg.mode, cfg.radius)
    if g is Generator.WOBBLY_SPACELIKE_HELIX:
        return gen.wobbly_spacelike_helix(cfg.n, cfg.omega, cfg.amplitude, cfg.mode,
                                          cfg.length or 2.0)
    if cfg.file is None:
        raise ConstraintViolation("FromFile needs --file")
    topo = Topology.CLOSED if cfg.closed else Topology.OPEN
    c = io.load_curve(cfg.file, topo)
    return DiscreteCurve(c.samples, c.ds, c.topology, c.shift, c.s0, cfg.tol_causal)


def resolve_case(c, cfg):
    """The configured case, checked against the curve's Frenet signs."""
    try:
        inferred = case_of(c, cfg.kappa_eps)
    except FrenetUndefined:
        if cfg.case is None:
            raise CaseMismatch("curvature vanishes everywhere; pass --case") from None
        return cfg.case
    if cfg.case is not None and cfg.case is not inferred:
        raise CaseMismatch(f"configured case {cfg.case.value} but the curve is "
                           f"{inferred.value}")
    return inferred


def flow_config(cfg):
    return FlowConfig(dt=cfg.dt, steps=cfg.steps, record_every=cfg.record_every,
                      unit_speed_tol=cfg.unit_speed_tol,
                      resample_on_drift=cfg.resample_on_drift)


def simulate(cfg, run_dir=None):
    """Run the flow and write the manifest plus snapshots; returns the history."""
    c0 = generate(cfg)
    case = resolve_case(c0, cfg)
    h = run(c0, flow_config(cfg), case=case, theta0=cfg.theta0)
    run_dir = io.resolve_output(cfg.output_dir if run_dir is None else run_dir)
    io.save_history(run_dir, h, cfg.echo())
    return h


def verify_history(h, cfg):
    """Residual report plus pass/fail checks for a recorded history."""
    rep = pde.pde_residual(h, cfg.s_margin)
    curv = pde.curvature_evolution_residual(h, cfg.s_margin)
    closed = h.closed
    ortho = max(frame_orthonormality_defect(pf) for pf in h.frames)
    skew = max(FrameCoefficientMatrix(s_matrix(pf.k1, pf.k2, h.case), h.case.signs)
               .semi_skew_defect() for pf in h.frames)
    ident = 0.0
    for c, pf in zip(h.curves, h.frames):
        fa = frenet_apparatus(c, cfg.kappa_eps)
        if np.any(fa.kappa_defined):
            kappa = np.where(fa.kappa_defined, fa.kappa, np.nan)
            ident = max(ident, curvature_identity_defect(pf, kappa))
        else:
            ident = max(ident, float(np.max(np.abs(pf.k1)) + np.max(np.abs(pf.k2))))
    frame_res = max(frame_residual(pf, 1 if closed else 2)[0] for pf in h.frames)
    ratios = _heat_ratio_summary(h, cfg) if h.case.hyperbolic else None
    checks = {
        "pde_residual_l2": _check(rep.l2_norm, cfg.residual_tol),
        "max_drift": _check(float(np.max(h.drift)), cfg.unit_speed_tol),
        "frame_orthonormality": _check(ortho, cfg.frame_tol),
        "coefficient_semi_skew": _check(skew, 0.0),
        "kappa_identity": _check(ident, cfg.identity_tol),
    }
    report = {
        "case": h.case.value,
        "pde": "nls" if h.case is CausalCase.TIMELIKE_CURVE else "heat",
        "residual": rep.as_dict(),
        "curvature_evolution": curv.as_dict(),
        "frame_s_residual": frame_res,
        "mask": {"s_margin": pde.default_margin(closed, h.k1.shape[1])
                 if cfg.s_margin is None else cfg.s_margin,
                 "valid_time_rows": int(np.sum(h.valid_time_rows()))},
        "checks": checks,
        "passed": all(v["passed"] for v in checks.values()),
    }
    if ratios is not None:
        report["heat_vs_exponential"] = ratios
    return report, rep


def _heat_ratio_summary(h, cfg):
    """Initial ``q / (kappa e^{int tau})`` and ``r / (kappa e^{-int tau})``."""
    fa = frenet_apparatus(h.curves[0], cfg.kappa_eps)
    if not np.all(fa.kappa_defined):
        return None
    a, b = pde.heat_hasimoto_ratios(h.frames[0], fa.kappa, fa.tau)
    n = len(a)
    sl = slice(0, n) if h.closed else slice(n // 8, n - n // 8)
    return {"q_ratio": float(np.mean(a[sl])), "r_ratio": float(np.mean(b[sl])),
            "q_ratio_spread": float(np.ptp(a[sl])), "r_ratio_spread": float(np.ptp(b[sl])),
            "product": float(np.mean((a * b)[sl]))}


def _check(value, tol):
    return {"value": float(value), "tolerance": float(tol),
            "passed": bool(np.isfinite(value) and value <= tol)}


def verify(run_dir, cfg=None):
    """Load a run directory, write ``report.json`` and return the report."""
    cfg = RunConfig() if cfg is None else cfg
    run_dir = Path(run_dir)
    h = io.load_history(run_dir)
    man = io.load_json(run_dir / io.MANIFEST)
    # tolerances recorded with the run apply unless overridden explicitly
    saved = man.get("config", {})
    explicit = getattr(cfg, "_explicit", set())
    for key in ("unit_speed_tol", "frame_tol", "residual_tol", "identity_tol", "kappa_eps",
                "s_margin"):
        if key in saved and key not in explicit:
            cfg = cfg.replace(**{key: saved[key]})
    report, rep = verify_history(h, cfg)
    io.dump_json(run_dir / "report.json", report)
    if cfg.dump_residuals:
        _dump_residual_grids(run_dir, h)
    return report


def _dump_residual_grids(run_dir, h):
    if h.case is CausalCase.TIMELIKE_CURVE:
        f = pde.to_nls_field(h)
        io.save_residual_grid(run_dir / "residual_nls.csv",
                              pde.nls_residual_grid(f.q, f.ds, f.dt), h.ds, h.dt,
                              h.frames[0].s0)
    else:
        p = pde.to_heat_pair(h)
        Rq, Rr = pde.heat_residual_grids(p.q, p.r, p.ds, p.dt)
        io.save_residual_grid(run_dir / "residual_q.csv", Rq, h.ds, h.dt, h.frames[0].s0)
        io.save_residual_grid(run_dir / "residual_r.csv", Rr, h.ds, h.dt, h.frames[0].s0)


def level_configs(cfg):
    """Refinement ladder: ds halves, dt quarters.

    ``fixed_time`` keeps the horizon (steps grow by 4); ``fixed_steps`` keeps
    the step count, so the horizon shrinks with ds^2. The record stride is
    fixed, so the recorded time step also scales with ds^2.
    ``auto`` picks ``fixed_steps`` for the ill-posed spacelike cases.
    """
    mode = cfg.horizon
    if mode == "auto":
        c0 = generate(cfg)
        mode = "fixed_steps" if resolve_case(c0, cfg).hyperbolic else "fixed_time"
    closed_like = cfg.generator in (Generator.CIRCLE, Generator.TIMELIKE_HELIX,
                                    Generator.WOBBLY_TIMELIKE_HELIX, Generator.WOBBLY_CIRCLE)
    out = []
    n = cfg.n
    for lev in range(cfg.levels):
        f = 4**lev
        if mode == "fixed_time":
            out.append(cfg.replace(n=n, dt=cfg.dt / f, steps=cfg.steps * f))
        else:
            out.append(cfg.replace(n=n, dt=cfg.dt / f))
        n = 2 * n if closed_like else 2 * (n - 1) + 1
    return mode, out


def _run_level(cfg):
    c0 = generate(cfg)
    case = resolve_case(c0, cfg)
    h = run(c0, flow_config(cfg), case=case, theta0=cfg.theta0)
    report, rep = verify_history(h, cfg)
    row = {"n": c0.n, "ds": c0.ds, "dt": cfg.dt, "steps": cfg.steps,
           "l2": rep.l2_norm, "linf": rep.linf_norm,
           "max_drift": float(np.max(h.drift))}
    for k, v in rep.relative.items():
        row[f"relative_{k}"] = v
    return row


def converge(cfg):
    """Run the refinement ladder and return ``(table, orders, passed)``."""
    if cfg.levels < 3:
        raise ConstraintViolation("a convergence study needs at least 3 levels")
    mode, cfgs = level_configs(cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            rows = list(ex.map(_run_level, cfgs))
    else:
        rows = [_run_level(c) for c in cfgs]
    hs = [r["ds"] for r in rows]
    metrics = [k for k in rows[0] if k == "l2" or k.startswith("relative_")]
    orders = {k: pde.convergence_order(hs, [r[k] for r in rows]) for k in metrics}
    # NLS uses the absolute norm; the heat pair uses scale-free norms
    gated = ["l2"] if "relative_nls" in rows[0] else [k for k in metrics if k != "l2"]
    passed = all(abs(orders[k] - cfg.order_target) <= cfg.order_tol for k in gated)
    return {"mode": mode, "levels": rows, "orders": orders, "gated": gated,
            "passed": passed}


def _write_table(path, rows):
    keys = list(rows[0])
    io.write_csv(path, keys, [[r[k] for k in keys] for r in rows])


# ---------------------------------------------------------------------------
# argument parsing


def _add_config_flags(p):
    p.add_argument("--config", help="JSON file whose keys override the flags")
    p.add_argument("--generator", choices=[g.value for g in Generator])
    p.add_argument("--case", choices=[c.value for c in CausalCase])
    for name, typ in [("n", int), ("a", float), ("b", float), ("omega", float),
                      ("radius", float), ("length", float), ("amplitude", float),
                      ("mode", int), ("dt", float), ("steps", int), ("record_every", int),
                      ("theta0", float), ("tol_causal", float), ("kappa_eps", float),
                      ("unit_speed_tol", float), ("frame_tol", float),
                      ("residual_tol", float), ("identity_tol", float), ("s_margin", int),
                      ("levels", int), ("order_target", float), ("order_tol", float),
                      ("jobs", int)]:
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)
    p.add_argument("--horizon", choices=["auto", "fixed_time", "fixed_steps"])
    p.add_argument("--file")
    p.add_argument("--output-dir", dest="output_dir")
    for flag in ("closed", "timelike", "resample_on_drift", "dump_residuals"):
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, action="store_true",
                       default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="minkvfe", description="Binormal flow of curves in Minkowski 3-space")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [("generate", "sample a seed curve"),
                           ("simulate", "run the flow and write snapshots"),
                           ("converge", "refinement study with an order table")]:
        _add_config_flags(sub.add_parser(name, help=helptext))
    pv = sub.add_parser("verify", help="residual report for a run directory")
    pv.add_argument("run_dir")
    _add_config_flags(pv)
    return parser


def config_from_args(args):
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    values = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise ConstraintViolation(f"config file {path} not found")
        try:
            extra = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConstraintViolation(f"config file: {exc}") from None
        unknown = set(extra) - fields
        if unknown:
            raise ConstraintViolation(f"unknown config keys {sorted(unknown)}")
        values.update(extra)
    cfg = RunConfig(**values)
    object.__setattr__(cfg, "_explicit", set(values))
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "generate":
            c = generate(cfg)
            out = io.resolve_output(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            io.save_curve(out / "curve.csv", c)
            info = {"config": cfg.echo(), "n": c.n, "ds": c.ds,
                    "topology": c.topology.value, "causal_class": c.causal_class.value}
            try:
                case = resolve_case(c, cfg)
                pf = frame_by_transport(c, case=case)
                io.save_frame(out / "frame.csv", pf)
                info["case"] = case.value
            except CaseMismatch as exc:
                info["case"] = None
                info["note"] = str(exc)
            io.dump_json(out / "curve.json", info)
            print(f"wrote {out / 'curve.csv'}")
            return EXIT_PASS
        if args.command == "simulate":
            h = simulate(cfg)
            print(f"{h.case.value}: {len(h.times)} snapshots, max drift "
                  f"{np.max(h.drift):.3e} -> {io.resolve_output(cfg.output_dir)}")
            return EXIT_PASS
        if args.command == "verify":
            report = verify(args.run_dir, cfg)
            for name, chk in report["checks"].items():
                status = "PASS" if chk["passed"] else "FAIL"
                print(f"{status} {name}: {chk['value']:.3e} (tol {chk['tolerance']:.1e})")
            return EXIT_PASS if report["passed"] else EXIT_FAIL
        if args.command == "converge":
            result = converge(cfg)
            out = io.resolve_output(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            _write_table(out / "orders.csv", result["levels"])
            io.dump_json(out / "converge.json", {"config": cfg.echo(), **result})
            for k, v in result["orders"].items():
                print(f"order {k}: {v:.3f}")
            print("PASS" if result["passed"] else "FAIL")
            return EXIT_PASS if result["passed"] else EXIT_FAIL
    except VFEError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
