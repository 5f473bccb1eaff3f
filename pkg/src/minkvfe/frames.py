"""
Parallel (rotation-minimizing) frames
=====================================

A parallel frame ``(T, E1, E2)`` along a non-lightlike curve satisfies
``T' = k1 E1 + k2 E2`` and ``E_j' = a_j T`` with no normal-plane rotation.
Three causal cases are supported; the signs ``(eps_T, eps_1, eps_2)`` of
the frame vectors fix the coefficient matrix:

==============================  ==================  ===========================
case                            signs               rows of the s-matrix
==============================  ==================  ===========================
``TIMELIKE_CURVE``              (-1, +1, +1)        (0,k1,k2) (k1,0,0) (k2,0,0)
``SPACELIKE_TIMELIKE_NORMAL``   (+1, -1, +1)        (0,k1,k2) (k1,0,0) (-k2,0,0)
``SPACELIKE_TIMELIKE_BINORMAL`` (+1, +1, -1)        (0,k1,k2) (-k1,0,0) (k2,0,0)
==============================  ==================  ===========================

Two constructions are provided: rotating the Frenet frame by the
integrated torsion, and direct discrete transport of a seed vector, which
also works where the curvature vanishes.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import lorentz as lz
from .curve import (FRAME_TOL, diff1, field_d1, frame_ode_residual,
                    frenet_apparatus, tangent_field)
from .errors import (CausalDegeneracy, FrenetUndefined, HyperbolicRangeError,
                     MixedCausality)

MAX_HYPERBOLIC_ANGLE = 30.0


class CausalCase(Enum):
    TIMELIKE_CURVE = "timelike"
    SPACELIKE_TIMELIKE_NORMAL = "spacelike_timelike_normal"
    SPACELIKE_TIMELIKE_BINORMAL = "spacelike_timelike_binormal"

    @property
    def signs(self):
        return _SIGNS[self]

    @property
    def hyperbolic(self):
        return self is not CausalCase.TIMELIKE_CURVE

    @property
    def torsion_sign(self):
        """theta_s = torsion_sign * tau."""
        return 1.0 if self is CausalCase.TIMELIKE_CURVE else -1.0

    @classmethod
    def from_frenet_signs(cls, eps_T, eps_N, eps_B):
        for case, signs in _SIGNS.items():
            if signs == (eps_T, eps_N, eps_B):
                return case
        raise CausalDegeneracy(f"no causal case with signs {(eps_T, eps_N, eps_B)}")


_SIGNS = {
    CausalCase.TIMELIKE_CURVE: (-1, 1, 1),
    CausalCase.SPACELIKE_TIMELIKE_NORMAL: (1, -1, 1),
    CausalCase.SPACELIKE_TIMELIKE_BINORMAL: (1, 1, -1),
}


@dataclass
class FrameCoefficientMatrix:
    """3x3 (or stacked ``(n, 3, 3)``) coefficient matrix with frame signs."""
    A: np.ndarray
    signs: tuple

    def semi_skew_defect(self):
        e = np.asarray(self.signs, dtype=np.float64)
        D = self.A * e[None, :] + np.swapaxes(self.A, -1, -2) * e[:, None]
        return float(np.max(np.abs(D)))


@dataclass
class ParallelFrameField:
    T: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    theta: np.ndarray
    case: CausalCase
    ds: float
    closed: bool
    s0: float = 0.0
    #: rotation angle taking the transported E1 back to the seed after one
    #: period (closed curves only)
    holonomy: float = 0.0

    @property
    def n(self):
        return len(self.k1)

    @property
    def s(self):
        return self.s0 + self.ds * np.arange(self.n)

    def frames(self):
        return np.stack([self.T, self.E1, self.E2], axis=1)


def case_of(c, kappa_eps=None):
    """Causal case of a curve from its Frenet signs."""
    fa = frenet_apparatus(c) if kappa_eps is None else frenet_apparatus(c, kappa_eps)
    if not np.any(fa.kappa_defined):
        raise FrenetUndefined("curvature vanishes everywhere; the case is ambiguous")
    return CausalCase.from_frenet_signs(*fa.signs)


# ---------------------------------------------------------------------------
# normal-plane rotations


def rotate_normal_pair(E1, E2, angle, case):
    """Rotate ``(E1, E2)`` by a constant (circular or hyperbolic) angle.

    Uses the same convention as the Frenet rotation, so rotating ``(N, B)`` by
    ``theta`` gives the parallel frame of :func:`frame_by_rotation`.
    """
    if case.hyperbolic:
        _check_hyperbolic(angle)
        c, s = np.cosh(angle), np.sinh(angle)
        return c * E1 + s * E2, s * E1 + c * E2
    c, s = np.cos(angle), np.sin(angle)
    return c * E1 - s * E2, s * E1 + c * E2


def rotate_curvatures(k1, k2, angle, case):
    """Effect of :func:`rotate_normal_pair` on the principal curvatures."""
    if case.hyperbolic:
        c, s = np.cosh(angle), np.sinh(angle)
        return c * k1 - s * k2, -s * k1 + c * k2
    c, s = np.cos(angle), np.sin(angle)
    return c * k1 - s * k2, s * k1 + c * k2


def _check_hyperbolic(theta):
    if np.any(np.abs(theta) > MAX_HYPERBOLIC_ANGLE):
        raise HyperbolicRangeError(
            f"|theta| exceeds {MAX_HYPERBOLIC_ANGLE}; cosh(theta) is too ill-conditioned")


# ---------------------------------------------------------------------------
# Frenet-rotation route


def check_case(fa, case):
    if fa.eps_T != case.signs[0]:
        raise MixedCausality(f"curve tangent sign {fa.eps_T} does not fit {case.value}")
    if np.any(fa.kappa_defined) and fa.signs != case.signs:
        raise MixedCausality(f"Frenet signs {fa.signs} do not fit {case.value}")


def theta_from_torsion(fa, case, theta0=0.0):
    """Frame angle ``theta(s) = theta0 + sigma * int_0^s tau`` (trapezoidal).

    ``sigma = +1`` for timelike curves and ``-1`` for both spacelike cases.
    """
    if not fa.fully_defined:
        raise FrenetUndefined("torsion needed where the curvature vanishes")
    check_case(fa, case)
    tau = case.torsion_sign * fa.tau
    theta = theta0 + np.concatenate([[0.0], np.cumsum((tau[1:] + tau[:-1]) * fa.ds / 2)])
    if case.hyperbolic:
        _check_hyperbolic(theta)
    return theta


def frame_by_rotation(fa, theta, case):
    """Parallel frame obtained by rotating ``(N, B)`` by ``theta``.

    Timelike curves: ``E1 = cos N - sin B``, ``E2 = sin N + cos B``,
    ``(k1, k2) = kappa (cos, sin)``. Spacelike curves:
    ``E1 = cosh N + sinh B``, ``E2 = sinh N + cosh B``, and
    ``(k1, k2) = kappa (cosh, -sinh)`` so that ``T' = k1 E1 + k2 E2``.
    """
    if not fa.fully_defined:
        raise FrenetUndefined("Frenet frame undefined on part of the curve")
    check_case(fa, case)
    theta = np.asarray(theta, dtype=np.float64)
    th = theta[:, None]
    if case.hyperbolic:
        _check_hyperbolic(theta)
        E1 = np.cosh(th) * fa.N + np.sinh(th) * fa.B
        E2 = np.sinh(th) * fa.N + np.cosh(th) * fa.B
        k1 = fa.kappa * np.cosh(theta)
        k2 = -fa.kappa * np.sinh(theta)
    else:
        E1 = np.cos(th) * fa.N - np.sin(th) * fa.B
        E2 = np.sin(th) * fa.N + np.cos(th) * fa.B
        k1 = fa.kappa * np.cos(theta)
        k2 = fa.kappa * np.sin(theta)
    return ParallelFrameField(fa.T.copy(), E1, E2, k1, k2, theta.copy(), case,
                              fa.ds, fa.closed)


def frenet_relation_matrix(theta, case):
    """Matrix ``M`` with ``(T, N, B)^T = M (T, E1, E2)^T`` per sample."""
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    M = np.zeros((len(theta), 3, 3))
    M[:, 0, 0] = 1.0
    if case.hyperbolic:
        c, s = np.cosh(theta), np.sinh(theta)
        M[:, 1, 1], M[:, 1, 2], M[:, 2, 1], M[:, 2, 2] = c, -s, -s, c
    else:
        c, s = np.cos(theta), np.sin(theta)
        M[:, 1, 1], M[:, 1, 2], M[:, 2, 1], M[:, 2, 2] = c, s, -s, c
    return M


# ---------------------------------------------------------------------------
# discrete transport route


def lorentz_rotation(a, b):
    """Matrices of the minimal Lorentz rotations taking unit ``a`` to unit ``b``.

    The map is the product of the reflections in ``(a + b)^perp`` and
    ``b^perp``; it fixes the Lorentz-orthogonal complement of ``span(a, b)``.
    ``a`` and ``b`` are ``(m, 3)`` with a common causal sign.
    """
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    eps = np.sign(lz.inner(a, a))
    w = a + b
    den = eps + lz.inner(a, b)
    if np.any(np.abs(den) < 1e-12):
        raise CausalDegeneracy("consecutive tangents are antiparallel")
    eye = np.broadcast_to(np.eye(3), (len(a), 3, 3))
    # R x = x - <w, x>/den w + 2 eps <a, x> b, with <y, x> = (eta y) . x
    return (eye
            - np.einsum("ni,nj->nij", w, w * lz.ETA) / den[:, None, None]
            + 2 * eps[:, None, None] * np.einsum("ni,nj->nij", b, a * lz.ETA))


def _prefix_products(M):
    """``P[i] = M[i-1] ... M[0]`` with ``P[0] = I`` via a log-depth scan."""
    m = len(M)
    P = np.empty((m + 1, 3, 3))
    P[0] = np.eye(3)
    acc = M.copy()
    shift = 1
    while shift < m:
        acc[shift:] = acc[shift:] @ acc[:-shift]
        shift *= 2
    P[1:] = acc
    return P


def _complete_frame(T, E1, case, tol_causal):
    """Re-orthonormalize E1 against T and set ``E2 = T x E1``."""
    eps_T, eps_1, eps_2 = case.signs
    E1 = E1 - (eps_T * lz.inner(E1, T))[:, None] * T
    q = lz.inner(E1, E1)
    if np.any(q * eps_1 <= tol_causal):
        raise CausalDegeneracy("transported normal lost its causal character")
    E1 = E1 / np.sqrt(np.abs(q))[:, None]
    E2 = lz.cross(T, E1)
    return E1, E2


def default_seed(T0, case):
    """A unit vector orthogonal to ``T0`` with the case's E1 sign."""
    eps_T, eps_1, _ = case.signs
    best = None
    for e in np.eye(3):
        v = e - eps_T * lz.inner(e, T0) * T0
        q = lz.inner(v, v)
        if q * eps_1 > 1e-6 and (best is None or abs(q) > best[0]):
            best = (abs(q), v / np.sqrt(abs(q)))
    if best is None:
        raise CausalDegeneracy("no admissible seed direction")
    return best[1]


def principal_curvatures(Ts, E1, E2, case):
    """``k_j = eps_j <T_s, E_j>``."""
    _, e1, e2 = case.signs
    return e1 * lz.inner(Ts, E1), e2 * lz.inner(Ts, E2)


def frame_angle(T, Ts, E1, case, kappa_eps=1e-9):
    """Angle of E1 relative to the Frenet normal (NaN where kappa vanishes)."""
    kappa = lz.norm(Ts)
    theta = np.full(len(T), np.nan)
    ok = kappa >= kappa_eps
    N = Ts[ok] / kappa[ok, None]
    B = lz.cross(T[ok], N)
    a = lz.inner(E1[ok], N)
    b = lz.inner(E1[ok], B)
    if case is CausalCase.TIMELIKE_CURVE:
        theta[ok] = np.arctan2(-b, a)
    elif case is CausalCase.SPACELIKE_TIMELIKE_NORMAL:
        theta[ok] = np.arcsinh(b)
    else:
        theta[ok] = np.arcsinh(-b)
    return theta


def _frenet_seed(c, m, case):
    """Frenet normal at sample ``m`` (theta = 0), or any admissible normal
    where the curvature vanishes or the Frenet signs do not fit ``case``."""
    T = tangent_field(c)
    fa = frenet_apparatus(c)
    if fa.kappa_defined[m] and (fa.eps_T, fa.eps_N, fa.eps_B) == case.signs:
        return fa.N[m]
    return default_seed(T[m], case)


def default_seed_index(c):
    """First sample for closed curves, middle sample for open ones."""
    return 0 if c.closed else c.n // 2


def frame_by_transport(c, seed_E1=None, case=None, tol_causal=None, seed_index=None):
    """Parallel frame by discrete transport of ``seed_E1``.

    The seed sits at ``seed_index`` (see :func:`default_seed_index`) and is
    carried in both directions. Each step applies the minimal Lorentz
    rotation taking ``T_i`` to ``T_{i+1}``; the result is re-orthonormalized
    against T and completed by ``E2 = T x E1``. Principal curvatures are
    ``k_j = eps_j <T_s, E_j>``.
    """
    tol_causal = c.tol_causal if tol_causal is None else tol_causal
    T = tangent_field(c)
    eps_T = -1 if lz.inner(T[0], T[0]) < 0 else 1
    if case is None:
        case = case_of(c)
    if case.signs[0] != eps_T:
        raise MixedCausality(f"tangent sign {eps_T} does not fit case {case.value}")
    m = default_seed_index(c) if seed_index is None else int(seed_index)
    if seed_E1 is None:
        seed_E1 = _frenet_seed(c, m, case)
    seed = np.asarray(seed_E1, dtype=np.float64)
    if abs(lz.inner(seed, T[m])) > 1e3 * FRAME_TOL * max(1.0, np.abs(seed).max()):
        raise ValueError("seed_E1 is not Lorentz-orthogonal to the first tangent")
    if lz.inner(seed, seed) * case.signs[1] <= tol_causal:
        raise CausalDegeneracy(f"seed_E1 has the wrong causal character for {case.value}")

    E1 = np.empty_like(T)
    fwd = _prefix_products(lorentz_rotation(T[m:-1], T[m + 1:])) if m < c.n - 1 else np.eye(3)[None]
    E1[m:] = np.einsum("nij,j->ni", fwd, seed)
    if m > 0:
        bwd = _prefix_products(lorentz_rotation(T[m:0:-1], T[m - 1::-1]))
        E1[m::-1] = np.einsum("nij,j->ni", bwd, seed)
    E1, E2 = _complete_frame(T, E1, case, tol_causal)

    holonomy = 0.0
    if c.closed:
        back = lorentz_rotation(T[-1:], T[:1])[0] @ E1[-1]
        E1h, _ = _complete_frame(T[:1], back[None], case, tol_causal)
        b = lz.inner(E1h[0], E2[0])
        if case.hyperbolic:
            holonomy = float(np.arcsinh(case.signs[2] * b))
        else:
            holonomy = float(np.arctan2(-b, lz.inner(E1h[0], E1[0])))

    Ts = field_d1(c, T)
    k1, k2 = principal_curvatures(Ts, E1, E2, case)
    theta = frame_angle(T, Ts, E1, case)
    return ParallelFrameField(T, E1, E2, k1, k2, theta, case, c.ds, c.closed,
                              c.s0, holonomy)


# ---------------------------------------------------------------------------
# coefficient matrices and checks


def s_matrix(k1, k2, case):
    """Stacked s-derivative coefficient matrices ``(n, 3, 3)``."""
    k1 = np.atleast_1d(np.asarray(k1, dtype=np.float64))
    k2 = np.atleast_1d(np.asarray(k2, dtype=np.float64))
    eps_T, e1, e2 = case.signs
    A = np.zeros((len(k1), 3, 3))
    A[:, 0, 1] = k1
    A[:, 0, 2] = k2
    A[:, 1, 0] = -e1 * eps_T * k1
    A[:, 2, 0] = -e2 * eps_T * k2
    return A


def frame_s_matrix(pf, i):
    """Coefficient matrix of ``(T, E1, E2)_s`` at sample ``i``."""
    return FrameCoefficientMatrix(s_matrix(pf.k1[i], pf.k2[i], pf.case)[0],
                                  pf.case.signs)


def frame_residual(pf, margin=1):
    """Max and per-sample norm of ``D_s(T,E1,E2) - A (T,E1,E2)``.

    Derivatives are central differences that never wrap, so closed curves
    with nontrivial holonomy are handled; ``margin`` samples at each end are
    excluded.
    """
    F = pf.frames()
    R = frame_ode_residual(F, s_matrix(pf.k1, pf.k2, pf.case), pf.ds, periodic=False)
    per = np.linalg.norm(R, axis=(1, 2))
    inner_part = per[margin:pf.n - margin]
    return float(np.max(inner_part)), per


def parallelism_defect(pf, margin=1):
    """``max |<(E1)_s, E2>|`` over interior samples."""
    dE1 = diff1(pf.E1, pf.ds, periodic=False)
    return float(np.max(np.abs(lz.inner(dE1, pf.E2))[margin:pf.n - margin]))


def curvature_identity_defect(pf, kappa):
    """``max |k1^2 +- k2^2 - kappa^2|`` (+ timelike, - spacelike)."""
    if pf.case.hyperbolic:
        val = pf.k1**2 - pf.k2**2
    else:
        val = pf.k1**2 + pf.k2**2
    ok = np.isfinite(kappa)
    return float(np.max(np.abs(val[ok] - kappa[ok] ** 2)))


def frame_orthonormality_defect(pf):
    """Max deviation of the Gram matrix of (T, E1, E2) from diag(signs)."""
    F = pf.frames()
    G = np.einsum("nia,nja,a->nij", F, F, lz.ETA)
    return float(np.max(np.abs(G - np.diag(pf.case.signs))))


def torsion_integral(tau, ds):
    """Trapezoid ``int_0^s tau``, zero at the first sample."""
    tau = np.asarray(tau, dtype=np.float64)
    return np.concatenate([[0.0], np.cumsum((tau[1:] + tau[:-1]) * ds / 2)])


def hasimoto_phase(pf, kappa, tau):
    """``arg((k1 + i k2) * conj(kappa exp(i int tau)))`` along a timelike curve."""
    if pf.case is not CausalCase.TIMELIKE_CURVE:
        raise ValueError("the complex Hasimoto phase applies to timelike curves")
    z = (pf.k1 + 1j * pf.k2) * np.conj(kappa * np.exp(1j * torsion_integral(tau, pf.ds)))
    return np.unwrap(np.angle(z))


def frame_agreement(pf, ref, index=None, margin=None):
    """Max ``|E - E_ref|`` after removing the constant gauge at ``index``.

    ``ref`` is rotated by the constant angle that makes its E1 match
    ``pf.E1`` at the reference sample, so only the s-dependent
    disagreement remains. Open curves drop ``margin`` samples at each end
    (default ``max(4, n // 16)``), where one-sided stencils dominate.
    """
    if margin is None:
        margin = 0 if pf.closed else max(4, pf.n // 16)
    if pf.case is not ref.case:
        raise ValueError("frames belong to different causal cases")
    m = (0 if pf.closed else pf.n // 2) if index is None else int(index)
    _, e1, e2 = pf.case.signs
    a = e1 * lz.inner(pf.E1[m], ref.E1[m])
    b = e2 * lz.inner(pf.E1[m], ref.E2[m])
    E1r, E2r = ref.E1, ref.E2
    if pf.case.hyperbolic:
        if a < 0:
            # -1 on the normal plane is a constant gauge of the hyperbolic case
            E1r, E2r, b = -E1r, -E2r, -b
        angle = np.arcsinh(b)
    else:
        angle = np.arctan2(-b, a)
    E1, E2 = rotate_normal_pair(E1r, E2r, angle, pf.case)
    sl = slice(margin, pf.n - margin)
    return float(max(np.abs(pf.E1 - E1)[sl].max(), np.abs(pf.E2 - E2)[sl].max()))
