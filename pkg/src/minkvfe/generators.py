"""
Analytic seed curves
====================

Unit-speed curves for each causal case, sampled on a uniform arclength
grid. Each generator validates the unit-speed relation of its parameters
and raises ConstraintViolation naming the relation when it fails.
"""

import numpy as np
from scipy.integrate import cumulative_simpson

from .curve import DiscreteCurve, Topology
from .errors import ConstraintViolation

CONSTRAINT_TOL = 1e-12


def line(n, length=1.0, timelike=False):
    """Straight line ``(s, 0, 0)`` (timelike) or ``(0, s, 0)`` (spacelike)."""
    ds = length / (n - 1)
    s = ds * np.arange(n)
    pts = np.zeros((n, 3))
    pts[:, 0 if timelike else 1] = s
    return DiscreteCurve(pts, ds, Topology.OPEN)


def circle(n, radius=1.0):
    """``(0, R cos(s/R), R sin(s/R))``: spacelike, timelike binormal, kappa = 1/R."""
    if not radius > 0:
        raise ConstraintViolation("circle radius must be positive")
    ds = 2 * np.pi * radius / n
    u = np.arange(n) * ds / radius
    pts = np.stack([np.zeros(n), radius * np.cos(u), radius * np.sin(u)], axis=1)
    return DiscreteCurve(pts, ds, Topology.CLOSED)


def timelike_helix_pitch(a, omega):
    """Pitch ``b`` solving ``a^2 omega^2 - b^2 = -1``."""
    return float(np.sqrt(a**2 * omega**2 + 1.0))


def timelike_helix(n, a=1.0, omega=1.0, b=None, turns=1):
    """``(b s, a cos ws, a sin ws)`` with ``a^2 w^2 - b^2 = -1``.

    Sampled over ``turns`` full turns as a closed curve with period shift
    ``(b L, 0, 0)``. Curvature ``a w^2``, torsion ``b w``.
    """
    if b is None:
        b = timelike_helix_pitch(a, omega)
    if abs(a**2 * omega**2 - b**2 + 1.0) > CONSTRAINT_TOL:
        raise ConstraintViolation(
            "timelike helix requires a^2 omega^2 - b^2 = -1 "
            f"(got {a**2 * omega**2 - b**2:.3e})")
    if omega <= 0 or turns < 1:
        raise ConstraintViolation("timelike helix requires omega > 0 and turns >= 1")
    L = 2 * np.pi * turns / omega
    ds = L / n
    s = ds * np.arange(n)
    pts = np.stack([b * s, a * np.cos(omega * s), a * np.sin(omega * s)], axis=1)
    return DiscreteCurve(pts, ds, Topology.CLOSED, shift=[b * L, 0.0, 0.0])


def timelike_helix_invariants(a=1.0, omega=1.0, b=None):
    b = timelike_helix_pitch(a, omega) if b is None else b
    return a * omega**2, b * omega


def spacelike_helix_pitch(b, omega):
    """``a`` solving ``a^2 + b^2 omega^2 = 1``."""
    val = 1.0 - b**2 * omega**2
    if val <= 0:
        raise ConstraintViolation("spacelike helix requires b^2 omega^2 < 1")
    return float(np.sqrt(val))


def spacelike_helix(n, b=0.8, omega=1.0, a=None, length=2.0):
    """``(b cosh ws, a s, b sinh ws)`` with ``a^2 + b^2 w^2 = 1``.

    Spacelike with timelike principal normal; open, centred on ``s = 0``.
    Curvature ``b w^2``, torsion ``-a w``.
    """
    if a is None:
        a = spacelike_helix_pitch(b, omega)
    if abs(a**2 + b**2 * omega**2 - 1.0) > CONSTRAINT_TOL:
        raise ConstraintViolation(
            "spacelike helix requires a^2 + b^2 omega^2 = 1 "
            f"(got {a**2 + b**2 * omega**2:.3e})")
    if b <= 0 or omega <= 0:
        raise ConstraintViolation("spacelike helix requires b > 0 and omega > 0")
    ds = length / (n - 1)
    s = -length / 2 + ds * np.arange(n)
    pts = np.stack([b * np.cosh(omega * s), a * s, b * np.sinh(omega * s)], axis=1)
    return DiscreteCurve(pts, ds, Topology.OPEN, s0=-length / 2)


def spacelike_helix_invariants(b=0.8, omega=1.0, a=None):
    a = spacelike_helix_pitch(b, omega) if a is None else a
    return b * omega**2, -a * omega


def curve_from_tangent(tangent, n, length, origin=(0.0, 0.0, 0.0), fine=16):
    """Closed (period-shifted) curve with prescribed periodic unit tangent.

    ``tangent(s)`` must be smooth and ``length``-periodic; its integral is
    taken spectrally on a grid ``fine`` times denser than the output, so the
    samples are unit speed to roundoff in the continuum sense.
    """
    m = n * fine
    s = length * np.arange(m) / m
    T = np.asarray(tangent(s), dtype=np.float64)
    mean = T.mean(axis=0)
    F = np.fft.rfft(T - mean, axis=0)
    k = 2 * np.pi * np.fft.rfftfreq(m, d=length / m)
    F[1:] /= 1j * k[1:, None]
    F[0] = 0.0
    periodic = np.fft.irfft(F, n=m, axis=0)
    pts = np.asarray(origin) + mean * s[:, None] + periodic - periodic[0]
    return DiscreteCurve(pts[::fine], length / n, Topology.CLOSED, shift=mean * length)


def wobbly_timelike_helix(n, beta=0.8, omega=1.0, amplitude=0.1, mode=2):
    """Timelike curve with non-constant curvature and torsion.

    Unit tangent ``(cosh beta(s), sinh beta(s) cos phi, sinh beta(s) sin phi)``
    with ``phi = omega s`` and ``beta = beta0 (1 + amplitude sin(mode omega s))``.
    One turn, closed with period shift.
    """
    L = 2 * np.pi / omega

    def tangent(s):
        bta = beta * (1 + amplitude * np.sin(mode * omega * s))
        phi = omega * s
        return np.stack([np.cosh(bta), np.sinh(bta) * np.cos(phi),
                         np.sinh(bta) * np.sin(phi)], axis=1)

    return curve_from_tangent(tangent, n, L)


def wobbly_circle(n, amplitude=0.2, mode=2, radius=1.0):
    """Closed spacelike curve with timelike binormal and varying curvature.

    Unit tangent ``(sinh beta, cosh beta cos phi, cosh beta sin phi)`` with
    ``phi = s / R`` and ``beta = amplitude sin(mode s / R)``. The normal
    stays spacelike while ``amplitude * mode < 1``.
    """
    if not amplitude * mode < 1:
        raise ConstraintViolation("wobbly circle requires amplitude * mode < 1")
    L = 2 * np.pi * radius

    def tangent(s):
        bta = amplitude * np.sin(mode * s / radius)
        phi = s / radius
        return np.stack([np.sinh(bta), np.cosh(bta) * np.cos(phi),
                         np.cosh(bta) * np.sin(phi)], axis=1)

    return curve_from_tangent(tangent, n, L)


def wobbly_spacelike_helix(n, omega=1.0, amplitude=0.2, mode=2, length=2.0):
    """Open spacelike curve with timelike normal and varying curvature.

    Unit tangent ``(sinh beta, cosh beta cos g, cosh beta sin g)`` with
    ``beta = omega s`` and ``g = amplitude sin(mode s)``; the normal is
    timelike while ``amplitude * mode < 1``. Positions are integrated with
    a fourth-order cumulative Simpson rule on a refined grid.
    """
    if not amplitude * mode < 1 or omega <= 0:
        raise ConstraintViolation("wobbly spacelike helix requires amplitude * mode < 1 "
                                  "and omega > 0")
    fine = 16
    m = (n - 1) * fine + 1
    s = np.linspace(-length / 2, length / 2, m)
    bta = omega * s
    gam = amplitude * np.sin(mode * s)
    T = np.stack([np.sinh(bta), np.cosh(bta) * np.cos(gam), np.cosh(bta) * np.sin(gam)],
                 axis=1)
    pts = cumulative_simpson(T, x=s, axis=0, initial=0.0)
    return DiscreteCurve(pts[::fine], length / (n - 1), Topology.OPEN, s0=-length / 2)
