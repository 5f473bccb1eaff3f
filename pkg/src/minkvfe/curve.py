"""
Discrete non-lightlike space curves
===================================

Curves are stored as ``(n, 3)`` sample arrays on a uniform arclength grid.
Closed curves may carry a period translation ``shift`` so that helices,
which repeat up to a translation, can use periodic stencils:
``alpha(s + L) = alpha(s) + shift``.

All derivatives are second order: central differences in the interior,
periodic wraparound for closed curves and one-sided three/four point
stencils at the ends of open curves.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import logm

from . import lorentz as lz
from .errors import CausalDegeneracy, MixedCausality

KAPPA_EPS = 1e-9
FRAME_TOL = 1e-8
MIN_SAMPLES = 8


class Topology(Enum):
    CLOSED = "closed"
    OPEN = "open"


# ---------------------------------------------------------------------------
# finite differences along axis 0


def diff1(f, h, periodic):
    f = np.asarray(f, dtype=np.float64)
    if periodic:
        return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * h)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return out


def diff2(f, h, periodic):
    f = np.asarray(f, dtype=np.float64)
    if periodic:
        return (np.roll(f, -1, axis=0) - 2 * f + np.roll(f, 1, axis=0)) / h**2
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return out


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class DiscreteCurve:
    """Arclength-sampled curve in Minkowski 3-space.

    Parameters
    ----------
    samples : array-like
        ``(n, 3)`` positions.
    ds : float
        Uniform arclength step.
    topology : Topology
    shift : array-like, optional
        Period translation for closed curves (zero for genuinely closed ones).
    s0 : float
        Arclength coordinate of the first sample.
    """

    samples: np.ndarray
    ds: float
    topology: Topology = Topology.OPEN
    shift: np.ndarray = field(default_factory=lambda: np.zeros(3))
    s0: float = 0.0
    tol_causal: float = lz.TOL_CAUSAL

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        shift = np.array(self.shift, dtype=np.float64).reshape(3)
        if samples.ndim != 2 or samples.shape[1] != 3:
            raise ValueError(f"samples must have shape (n, 3), got {samples.shape}")
        if len(samples) < MIN_SAMPLES:
            raise ValueError(f"a curve needs at least {MIN_SAMPLES} samples")
        if not (np.all(np.isfinite(samples)) and np.all(np.isfinite(shift))):
            raise ValueError("non-finite curve samples")
        if not self.ds > 0:
            raise ValueError("ds must be positive")
        if self.topology is Topology.OPEN and np.any(shift != 0):
            raise ValueError("open curves carry no period shift")
        samples.flags.writeable = False
        shift.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "shift", shift)

    @property
    def n(self):
        return len(self.samples)

    @property
    def closed(self):
        return self.topology is Topology.CLOSED

    @property
    def s(self):
        return self.s0 + self.ds * np.arange(self.n)

    @property
    def length(self):
        return self.ds * (self.n if self.closed else self.n - 1)

    @property
    def causal_class(self):
        return curve_causal_class(self)

    def with_samples(self, samples):
        return DiscreteCurve(samples, self.ds, self.topology, self.shift, self.s0,
                             self.tol_causal)


def position_d1(c, samples=None):
    """First arclength derivative of the positions (not normalized)."""
    p = c.samples if samples is None else samples
    if not c.closed:
        return diff1(p, c.ds, periodic=False)
    nxt = np.roll(p, -1, axis=0)
    prv = np.roll(p, 1, axis=0)
    nxt[-1] += c.shift
    prv[0] -= c.shift
    return (nxt - prv) / (2 * c.ds)


def position_d2(c, samples=None):
    p = c.samples if samples is None else samples
    if not c.closed:
        return diff2(p, c.ds, periodic=False)
    nxt = np.roll(p, -1, axis=0)
    prv = np.roll(p, 1, axis=0)
    nxt[-1] += c.shift
    prv[0] -= c.shift
    return (nxt - 2 * p + prv) / c.ds**2


def speed(c):
    """Lorentz norm of the raw first difference at every sample."""
    return lz.norm(position_d1(c))


def speed_deviation(c):
    """``max_i | ||alpha_s(i)|| - 1 |``."""
    return float(np.max(np.abs(speed(c) - 1.0)))


def curve_causal_class(c):
    d = position_d1(c)
    q = lz.inner(d, d)
    if np.any(np.abs(q) <= c.tol_causal):
        raise CausalDegeneracy("curve has a lightlike tangent")
    if np.all(q > 0):
        return lz.CausalClass.SPACELIKE
    if np.all(q < 0):
        return lz.CausalClass.TIMELIKE
    raise MixedCausality("tangent causal class changes along the curve")


def tangent_field(c):
    """Unit tangents ``T = alpha_s / ||alpha_s||``."""
    d = position_d1(c)
    if np.any(lz.norm(d) < c.tol_causal):
        raise CausalDegeneracy("raw tangent difference is lightlike")
    curve_causal_class(c)
    return lz.normalize(d, c.tol_causal)


def field_d1(c, f):
    """Arclength derivative of a per-sample field that is periodic on closed curves."""
    return diff1(f, c.ds, periodic=c.closed)


def field_d2(c, f):
    return diff2(f, c.ds, periodic=c.closed)


# ---------------------------------------------------------------------------
# resampling


def resample_arclength(points, n, topology=Topology.OPEN, shift=None,
                       tol_causal=lz.TOL_CAUSAL, oversample=64):
    """Resample a polyline to ``n`` points equispaced in Lorentzian arclength.

    A cubic spline (periodic for closed curves) through the input points is
    measured with the Lorentzian speed and inverted on a fine grid.

    Raises CausalDegeneracy for a lightlike chord and MixedCausality when the
    chords change causal class.
    """
    pts = np.asarray(points, dtype=np.float64)
    closed = topology is Topology.CLOSED
    shift = np.zeros(3) if shift is None else np.asarray(shift, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
        raise ValueError("points must have shape (m, 3), m >= 2")
    if n < MIN_SAMPLES:
        raise ValueError(f"n must be at least {MIN_SAMPLES}")

    ext = np.vstack([pts, pts[:1] + shift]) if closed else pts
    chords = np.diff(ext, axis=0)
    q = lz.inner(chords, chords)
    if np.any(np.abs(q) <= tol_causal * np.maximum(1.0, np.sum(chords**2, axis=1))):
        raise CausalDegeneracy("lightlike or repeated chord in input polyline")
    if not (np.all(q > 0) or np.all(q < 0)):
        raise MixedCausality("chords change causal class")

    # spline parameter: cumulative Euclidean chord length
    u = np.concatenate([[0.0], np.cumsum(np.sqrt(np.sum(chords**2, axis=1)))])
    if closed:
        drift = np.outer(u / u[-1], shift)
        spline = CubicSpline(u, ext - drift, bc_type="periodic")
        slope = shift / u[-1]
    else:
        spline = CubicSpline(u, ext)
        slope = np.zeros(3)

    fine = np.linspace(0.0, u[-1], (len(ext) - 1) * oversample + 1)
    sp = lz.norm(spline(fine, 1) + slope)
    arc = np.concatenate([[0.0], np.cumsum((sp[1:] + sp[:-1]) * np.diff(fine) / 2)])
    total = arc[-1]
    if closed:
        ds = total / n
        targets = ds * np.arange(n)
    else:
        ds = total / (n - 1)
        targets = ds * np.arange(n)
        targets[-1] = total
    uu = np.interp(targets, arc, fine)
    samples = spline(uu) + np.outer(uu, slope)
    return DiscreteCurve(samples, ds, topology, shift, tol_causal=tol_causal)


# ---------------------------------------------------------------------------
# Frenet apparatus


@dataclass
class FrenetApparatus:
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    eps_T: int
    eps_N: int
    eps_B: int
    kappa_defined: np.ndarray
    ds: float
    closed: bool

    @property
    def signs(self):
        return (self.eps_T, self.eps_N, self.eps_B)

    @property
    def fully_defined(self):
        return bool(np.all(self.kappa_defined))

    def frames(self):
        """``(n, 3, 3)`` array whose rows are T, N, B."""
        return np.stack([self.T, self.N, self.B], axis=1)


ADMISSIBLE_SIGNS = {(-1, 1, 1), (1, -1, 1), (1, 1, -1)}


def frenet_apparatus(c, kappa_eps=KAPPA_EPS):
    """Frenet frame, curvature and torsion of a discrete curve.

    ``N`` points along the part of ``+T_s`` orthogonal to T, ``B = T x N``
    and ``tau = eps_B <N_s, B>``.
    Samples with ``kappa < kappa_eps`` are flagged undefined and carry NaN
    in N, B and tau.
    """
    T = tangent_field(c)
    eps_T = -1 if curve_causal_class(c) is lz.CausalClass.TIMELIKE else 1
    Ts = field_d1(c, T)
    # the difference quotient carries an O(ds^2) component along T
    Ts = Ts - (eps_T * lz.inner(Ts, T))[:, None] * T
    kappa = lz.norm(Ts)
    defined = kappa >= kappa_eps

    N = np.full_like(T, np.nan)
    B = np.full_like(T, np.nan)
    tau = np.full(c.n, np.nan)
    eps_N = eps_B = 0
    if np.any(defined):
        qn = lz.inner(Ts[defined], Ts[defined])
        if np.any(np.abs(qn) <= c.tol_causal * np.sum(Ts[defined] ** 2, axis=1)):
            raise CausalDegeneracy("principal normal is lightlike")
        if not (np.all(qn > 0) or np.all(qn < 0)):
            raise MixedCausality("principal normal changes causal class")
        eps_N = 1 if qn[0] > 0 else -1
        N[defined] = Ts[defined] / kappa[defined, None]
        B = lz.cross(T, N)
        eps_B = -eps_T * eps_N
        Ns = field_d1(c, N)
        tau = eps_B * lz.inner(Ns, B)
        if (eps_T, eps_N, eps_B) not in ADMISSIBLE_SIGNS:
            raise CausalDegeneracy(f"inadmissible Frenet signs {(eps_T, eps_N, eps_B)}")
    return FrenetApparatus(T, N, B, kappa, tau, eps_T, eps_N, eps_B, defined,
                           c.ds, c.closed)


def frenet_matrix(fa):
    """Per-sample Frenet-Serret coefficient matrix ``(n, 3, 3)``.

    Rows ``T' = kappa N``, ``N' = eps_B kappa T + tau B``, ``B' = eps_T tau N``.
    """
    n = len(fa.kappa)
    A = np.zeros((n, 3, 3))
    A[:, 0, 1] = fa.kappa
    A[:, 1, 0] = fa.eps_B * fa.kappa
    A[:, 1, 2] = fa.tau
    A[:, 2, 1] = fa.eps_T * fa.tau
    return A


def frame_ode_residual(frames, A, ds, periodic):
    """``D_s F - A F`` for frames ``F`` with vector rows; shape ``(n, 3, 3)``."""
    dF = diff1(frames, ds, periodic)
    return dF - np.einsum("nij,njk->nik", A, frames)


def frenet_residual(fa):
    """Max Euclidean norm of the Frenet-Serret ODE residual over valid samples.

    Samples whose stencil touches an undefined sample (or an open end) are
    excluded.
    """
    F = fa.frames()
    R = frame_ode_residual(F, frenet_matrix(fa), fa.ds, fa.closed)
    ok = fa.kappa_defined.copy()
    ok &= np.roll(fa.kappa_defined, 1) & np.roll(fa.kappa_defined, -1)
    if not fa.closed:
        ok[:2] = ok[-2:] = False
    return float(np.max(np.linalg.norm(R[ok], axis=(1, 2))))


def connection_matrices(frames, signs, ds, closed):
    """Coefficient matrices extracted from consecutive frames.

    For frames ``F_i`` (rows orthonormal with metric signs ``signs``) the
    transition ``F_{i+1} = C_i F_i`` is a Lorentz transformation, and
    ``logm(C_i) / ds`` approximates the coefficient matrix at the midpoint
    ``s_i + ds/2`` to second order. Returns ``(m, 3, 3)`` with ``m = n`` for
    closed curves and ``n - 1`` for open ones.
    """
    F = np.asarray(frames)
    nxt = np.roll(F, -1, axis=0) if closed else F[1:]
    cur = F if closed else F[:-1]
    eps = np.asarray(signs, dtype=np.float64)
    # C_jk = eps_k <X_j(i+1), X_k(i)>
    C = np.einsum("nja,nka,a,k->njk", nxt, cur, lz.ETA, eps)
    out = np.empty_like(C)
    for i, Ci in enumerate(C):
        out[i] = np.real(logm(Ci)) / ds
    return out


def semi_skew_defect(A, signs):
    """``max |eps_j a_ij + eps_i a_ji|`` over all entries (and samples)."""
    A = np.asarray(A, dtype=np.float64)
    e = np.asarray(signs, dtype=np.float64)
    D = A * e[None, :] + np.swapaxes(A, -1, -2) * e[:, None]
    return float(np.max(np.abs(D)))
