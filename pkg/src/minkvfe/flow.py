"""
Binormal (vortex filament) flow
===============================

Evolves ``alpha_t = alpha_s x alpha_ss`` with the Lorentzian cross product,
using second-order stencils in s and classical RK4 in t, and records the
parallel frame and principal curvatures at every snapshot in the gauge
where the normal-plane rotation rate is exactly ``u = +-1/2 (k1^2 +- k2^2)``
(no additive ``c(t)``).

The gauge is kept by integrating the seed vector ``E1(s_m, t)`` together
with the curve: ``E1_t = beta T + u E2`` where ``beta`` keeps E1 orthogonal
to T and ``u`` comes from the t-matrix of the case.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import lorentz as lz
from .curve import (diff1, frenet_apparatus, position_d1, position_d2,
                    resample_arclength, speed)
from .errors import ArcLengthDrift, CausalDegeneracy
from .frames import (CausalCase, FrameCoefficientMatrix, case_of,
                     default_seed, default_seed_index, frame_by_transport,
                     rotate_normal_pair)

log = logging.getLogger(__name__)

STABILITY_FACTOR = 0.25


@dataclass
class FlowConfig:
    dt: float
    steps: int
    record_every: int = 1
    unit_speed_tol: float = 1e-3
    resample_on_drift: bool = False
    stability_safety: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.steps < 0 or self.record_every < 1:
            raise ValueError("steps >= 0 and record_every >= 1 required")

    @property
    def gauge_c(self):
        return 0.0


@dataclass
class FlowHistory:
    times: np.ndarray
    curves: list
    frames: list
    k1: np.ndarray
    k2: np.ndarray
    case: CausalCase
    config: FlowConfig
    #: max_i | ||alpha_s(t)|| - ||alpha_s(0)|| | per snapshot
    drift: np.ndarray
    #: max_i | ||alpha_s(t)|| - 1 | per snapshot
    speed_deviation: np.ndarray
    seed_index: int
    seeds: np.ndarray
    events: list = field(default_factory=list)

    @property
    def ds(self):
        return self.curves[0].ds

    @property
    def dt(self):
        return self.config.dt * self.config.record_every

    @property
    def closed(self):
        return self.curves[0].closed

    def valid_time_rows(self):
        """Boolean mask of snapshots whose time stencil has no resampling jump."""
        ok = np.ones(len(self.times), dtype=bool)
        for ev in self.events:
            j = ev["record"]
            ok[max(j - 1, 0):j + 1] = False
        return ok


# ---------------------------------------------------------------------------
# velocity and stepping


def vfe_velocity(c, samples=None):
    """``alpha_s x alpha_ss`` from central (or one-sided end) stencils."""
    return lz.cross(position_d1(c, samples), position_d2(c, samples))


def _rk4(f, y, dt):
    k1 = f(y)
    k2 = f(y + dt / 2 * k1)
    k3 = f(y + dt / 2 * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def stability_bound(ds, safety=1.0):
    return STABILITY_FACTOR * ds**2 * safety


def check_stability(c, cfg):
    bound = stability_bound(c.ds, cfg.stability_safety)
    if cfg.dt > bound:
        warnings.warn(f"dt={cfg.dt:.3g} exceeds the explicit-scheme heuristic "
                      f"{bound:.3g} (0.25 ds^2)", RuntimeWarning, stacklevel=3)


def _drift(c, samples, speed0, step_no):
    """``max_i | ||alpha_s(i)|| - speed0(i) |`` for the raw first differences.

    Measured against the initial discrete speed: central differences of an
    exactly unit-speed curve are already ``1 - O(ds^2)``.
    """
    if not np.all(np.isfinite(samples)):
        raise ArcLengthDrift(f"non-finite positions at step {step_no}")
    return float(np.max(np.abs(lz.norm(position_d1(c, samples)) - speed0)))


def step(c, cfg, speed0=None):
    """One RK4 step of the flow.

    Raises ArcLengthDrift when the discrete speed moves more than
    ``unit_speed_tol`` away from ``speed0`` (default: the speed of ``c``);
    with ``cfg.resample_on_drift`` the curve is resampled instead.
    """
    speed0 = speed(c) if speed0 is None else speed0
    new = _rk4(lambda p: vfe_velocity(c, p), c.samples, cfg.dt)
    dev = _drift(c, new, speed0, 1)
    if dev > cfg.unit_speed_tol:
        if not cfg.resample_on_drift:
            raise ArcLengthDrift(f"unit-speed deviation {dev:.3e} exceeds "
                                 f"{cfg.unit_speed_tol:.1e}")
        return resample_arclength(new, c.n, c.topology, c.shift, c.tol_causal)
    return c.with_samples(new)


# ---------------------------------------------------------------------------
# time evolution of the frame


def gauge_u(k1, k2, case):
    """Normal-plane rotation rate with ``c(t) = 0``."""
    if case is CausalCase.TIMELIKE_CURVE:
        return 0.5 * (k1**2 + k2**2)
    if case is CausalCase.SPACELIKE_TIMELIKE_NORMAL:
        return 0.5 * (k1**2 - k2**2)
    return -0.5 * (k1**2 - k2**2)


def t_matrix(k1, k2, k1_s, k2_s, case):
    """Stacked ``(n, 3, 3)`` t-derivative coefficient matrices."""
    k1, k2, k1_s, k2_s = (np.atleast_1d(np.asarray(x, dtype=np.float64))
                          for x in (k1, k2, k1_s, k2_s))
    u = gauge_u(k1, k2, case)
    A = np.zeros((len(k1), 3, 3))
    if case is CausalCase.TIMELIKE_CURVE:
        A[:, 0, 1], A[:, 0, 2] = -k2_s, k1_s
        A[:, 1, 0], A[:, 1, 2] = -k2_s, u
        A[:, 2, 0], A[:, 2, 1] = k1_s, -u
    elif case is CausalCase.SPACELIKE_TIMELIKE_NORMAL:
        A[:, 0, 1], A[:, 0, 2] = k2_s, k1_s
        A[:, 1, 0], A[:, 1, 2] = k2_s, u
        A[:, 2, 0], A[:, 2, 1] = -k1_s, u
    else:
        A[:, 0, 1], A[:, 0, 2] = k2_s, k1_s
        A[:, 1, 0], A[:, 1, 2] = -k2_s, u
        A[:, 2, 0], A[:, 2, 1] = k1_s, u
    return A


def frame_t_matrix(pf, k1_s, k2_s, case=None):
    """Coefficient matrices of ``(T, E1, E2)_t`` for a frame field."""
    case = pf.case if case is None else case
    return FrameCoefficientMatrix(t_matrix(pf.k1, pf.k2, k1_s, k2_s, case), case.signs)


def binormal_velocity_in_frame(pf):
    """``kappa B`` written in the parallel frame: ``(v1, v2)`` with ``v = v1 E1 + v2 E2``."""
    if pf.case is CausalCase.TIMELIKE_CURVE:
        return -pf.k2, pf.k1
    return pf.k2, pf.k1


class _SeedRHS:
    """Right-hand side of the augmented (positions, seed) system."""

    def __init__(self, c, case, m):
        self.c = c
        self.case = case
        self.m = m

    def __call__(self, y):
        c, m, case = self.c, self.m, self.case
        P = y[:-1]
        e = y[-1]
        D1 = position_d1(c, P)
        V = lz.cross(D1, position_d2(c, P))
        eps_T, eps_1, eps_2 = case.signs

        T = D1 / lz.norm(D1)[:, None]
        Ts = diff1(T, c.ds, c.closed)[m]
        w = D1[m]
        wn = np.sqrt(abs(lz.inner(w, w)))
        wt = diff1(V, c.ds, c.closed)[m]
        Tm = w / wn
        Tt = wt / wn - w * (eps_T * lz.inner(w, wt)) / wn**3

        E2 = lz.cross(Tm, e)
        k1 = eps_1 * lz.inner(Ts, e)
        k2 = eps_2 * lz.inner(Ts, E2)
        u = gauge_u(k1, k2, case)
        beta = -eps_T * lz.inner(e, Tt)
        de = beta * Tm + u * E2
        return np.vstack([V, de])


def _project_seed(T, e, case):
    eps_T, eps_1, _ = case.signs
    e = e - eps_T * lz.inner(e, T) * T
    q = lz.inner(e, e)
    if q * eps_1 <= 0:
        raise CausalDegeneracy("seed vector lost its causal character")
    return e / np.sqrt(abs(q))


def initial_seed(c0, case, theta0=0.0, seed_index=None):
    """Frenet normal at the seed sample rotated by ``theta0`` (or a default
    normal vector where the curvature vanishes)."""
    m = default_seed_index(c0) if seed_index is None else seed_index
    fa = frenet_apparatus(c0)
    if fa.kappa_defined[m]:
        e1, e2 = rotate_normal_pair(fa.N[m], fa.B[m], theta0, case)
        return e1
    e1 = default_seed(fa.T[m], case)
    e2 = lz.cross(fa.T[m], e1)
    return rotate_normal_pair(e1, e2, theta0, case)[0]


def run(c0, cfg, case=None, theta0=0.0, seed_E1=None, seed_index=None):
    """Integrate the flow from ``c0`` and record snapshots.

    Parameters
    ----------
    c0 : DiscreteCurve
    cfg : FlowConfig
    case : CausalCase, optional
        Inferred from the Frenet signs when omitted.
    theta0 : float
        Constant gauge angle applied to the initial seed.
    seed_E1 : array-like, optional
        Explicit initial seed (overrides ``theta0``).
    """
    if case is None:
        case = case_of(c0)
    m = default_seed_index(c0) if seed_index is None else int(seed_index)
    check_stability(c0, cfg)
    if case.hyperbolic:
        growth = 4 * cfg.dt * cfg.steps / c0.ds**2
        if growth > 30:
            log.warning("spacelike binormal flow is ill-posed: highest grid mode may "
                        "grow by exp(%.0f) over the horizon", growth)
    if seed_E1 is None:
        seed_E1 = initial_seed(c0, case, theta0, m)
    T0 = lz.normalize(position_d1(c0)[m])
    seed = _project_seed(T0, np.asarray(seed_E1, dtype=np.float64), case)

    speed0 = speed(c0)
    times, curves, frames, drifts, devs, seeds, events = [], [], [], [], [], [], []
    y = np.vstack([c0.samples, seed])
    c = c0

    def record(t, c, seed):
        pf = frame_by_transport(c, seed, case, seed_index=m)
        times.append(t)
        curves.append(c)
        frames.append(pf)
        sp = speed(c)
        drifts.append(float(np.max(np.abs(sp - speed0))))
        devs.append(float(np.max(np.abs(sp - 1.0))))
        seeds.append(seed.copy())

    record(0.0, c0, seed)
    for k in range(1, cfg.steps + 1):
        y = _rk4(_SeedRHS(c, case, m), y, cfg.dt)
        dev = _drift(c, y[:-1], speed0, k)
        if dev > cfg.unit_speed_tol:
            if not cfg.resample_on_drift:
                raise ArcLengthDrift(
                    f"unit-speed drift {dev:.3e} exceeds {cfg.unit_speed_tol:.1e} "
                    f"at step {k} (t={k * cfg.dt:.4g})")
            c = resample_arclength(y[:-1], c.n, c.topology, c.shift, c.tol_causal)
            events.append({"step": k, "time": k * cfg.dt, "deviation": dev,
                           "record": len(times)})
            log.info("resampled at step %d (deviation %.3e)", k, dev)
        else:
            c = c.with_samples(y[:-1])
        T = lz.normalize(position_d1(c)[m])
        e = _project_seed(T, y[-1], case)
        y = np.vstack([c.samples, e])
        if k % cfg.record_every == 0:
            record(k * cfg.dt, c, e)

    return FlowHistory(
        times=np.array(times), curves=curves, frames=frames,
        k1=np.array([f.k1 for f in frames]), k2=np.array([f.k2 for f in frames]),
        case=case, config=cfg, drift=np.array(drifts), speed_deviation=np.array(devs),
        seed_index=m, seeds=np.array(seeds), events=events)


# ---------------------------------------------------------------------------
# checks on recorded histories


def _frame_stack(h):
    return np.stack([pf.frames() for pf in h.frames])  # (m, n, 3, 3)


def frame_t_residual(h, margin=1):
    """Max norm of ``D_t(T,E1,E2) - A_t (T,E1,E2)`` over interior points.

    ``A_t`` uses k_s from central differences in s; both derivatives are
    centred, so the residual is second order in ``ds`` and the record step.
    """
    F = _frame_stack(h)
    dF = (F[2:] - F[:-2]) / (2 * h.dt)
    k1s = diff1(h.k1.T, h.ds, periodic=False).T
    k2s = diff1(h.k2.T, h.ds, periodic=False).T
    R = np.empty_like(dF)
    for j in range(1, len(F) - 1):
        A = t_matrix(h.k1[j], h.k2[j], k1s[j], k2s[j], h.case)
        R[j - 1] = dF[j - 1] - np.einsum("nij,njk->nik", A, F[j])
    per = np.linalg.norm(R, axis=(2, 3))[:, margin:-margin]
    return float(np.max(per))


def tangent_evolution_residual(h, margin=1):
    """``T_t`` against ``v1_s E1 + v2_s E2`` (binormal velocity in the frame)."""
    F = _frame_stack(h)
    Tt = (F[2:, :, 0] - F[:-2, :, 0]) / (2 * h.dt)
    worst = 0.0
    for j in range(1, len(F) - 1):
        v1, v2 = binormal_velocity_in_frame(h.frames[j])
        v1s = diff1(v1, h.ds, periodic=False)
        v2s = diff1(v2, h.ds, periodic=False)
        pred = v1s[:, None] * F[j, :, 1] + v2s[:, None] * F[j, :, 2]
        r = np.linalg.norm(Tt[j - 1] - pred, axis=1)[margin:-margin]
        worst = max(worst, float(np.max(r)))
    return worst


def recovered_u(h):
    """``eps_2 <(E1)_t, E2>`` from recorded frames, shape ``(m - 2, n)``."""
    F = _frame_stack(h)
    dE1 = (F[2:, :, 1] - F[:-2, :, 1]) / (2 * h.dt)
    return h.case.signs[2] * lz.inner(dE1, F[1:-1, :, 2])


def u_consistency(h, margin=1):
    """Per-snapshot spread in s of ``recovered u - gauge formula``.

    Returns ``(spread, offset)``: the max over t of the range in s of the
    difference (its constancy in s), and the max over t of its mean (the
    residual ``c(t)``).
    """
    u = recovered_u(h)
    formula = gauge_u(h.k1[1:-1], h.k2[1:-1], h.case)
    d = (u - formula)[:, margin:-margin]
    spread = float(np.max(d.max(axis=1) - d.min(axis=1)))
    offset = float(np.max(np.abs(d.mean(axis=1))))
    return spread, offset


def rigid_translation_error(h, velocity):
    """Max deviation of the final curve from ``c0 + velocity * t``."""
    t = h.times[-1]
    return float(np.max(np.abs(h.curves[-1].samples - h.curves[0].samples
                               - np.asarray(velocity) * t)))
