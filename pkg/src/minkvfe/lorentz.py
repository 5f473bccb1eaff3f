"""
Minkowski 3-space vector algebra
================================

Vectors are plain float64 arrays whose last axis has length 3, ordered
``(x0, x1, x2)`` with ``x0`` the time component. Every function broadcasts
over leading axes, so an ``(n, 3)`` array of samples is handled in one call.
"""

from enum import Enum

import numpy as np

from .errors import CausalDegeneracy

#: metric signature diag(-1, 1, 1)
ETA = np.array([-1.0, 1.0, 1.0])

TOL_CAUSAL = 1e-10


class CausalClass(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def mvector(x0, x1, x2):
    """Build a single vector; rejects non-finite components."""
    v = np.array([x0, x1, x2], dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite Minkowski vector {v}")
    return v


def inner(x, y):
    """Lorentzian inner product ``-x0*y0 + x1*y1 + x2*y2``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def norm(x):
    """``sqrt(|<x, x>|)``; zero for lightlike vectors."""
    return np.sqrt(np.abs(inner(x, x)))


def cross(x, y):
    """Lorentzian vector product.

    The result is Lorentz-orthogonal to both arguments, and
    ``<x ^ y, z> = det[x, y, z]``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x0, x1, x2 = x[..., 0], x[..., 1], x[..., 2]
    y0, y1, y2 = y[..., 0], y[..., 1], y[..., 2]
    return np.stack(
        [-x1 * y2 + x2 * y1, x2 * y0 - x0 * y2, x0 * y1 - x1 * y0], axis=-1
    )


def classify(v, tol_causal=TOL_CAUSAL):
    """Causal class of a single vector."""
    q = float(inner(v, v))
    if q > tol_causal:
        return CausalClass.SPACELIKE
    if q < -tol_causal:
        return CausalClass.TIMELIKE
    return CausalClass.LIGHTLIKE


def metric_sign(v, tol_causal=TOL_CAUSAL):
    """Sign of ``<v, v>`` as an int array (+1 spacelike, -1 timelike).

    Raises CausalDegeneracy if any vector is lightlike within ``tol_causal``.
    """
    q = inner(v, v)
    if np.any(np.abs(q) <= tol_causal):
        raise CausalDegeneracy("lightlike vector where a unit vector was expected")
    return np.where(q > 0, 1, -1)


def normalize(v, tol_causal=TOL_CAUSAL):
    """Scale non-lightlike vectors to ``<v, v> = +-1``."""
    v = np.asarray(v, dtype=np.float64)
    n = norm(v)
    if np.any(n < tol_causal):
        raise CausalDegeneracy("cannot normalize a lightlike or zero vector")
    return v / n[..., None]
