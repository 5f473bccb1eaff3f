import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkvfe import curve as cv
from minkvfe import frames as fr
from minkvfe import generators as gen
from minkvfe import lorentz as lz
from minkvfe.errors import HyperbolicRangeError, MixedCausality
from minkvfe.frames import CausalCase

SEEDS = {
    "timelike_helix": lambda n: gen.timelike_helix(n),
    "circle": lambda n: gen.circle(n),
    "wobbly_circle": lambda n: gen.wobbly_circle(n),
    "spacelike_helix": lambda n: gen.spacelike_helix(n + 1),
}


def rotation_frame(c, theta0=0.0):
    fa = cv.frenet_apparatus(c)
    case = fr.case_of(c)
    return fr.frame_by_rotation(fa, fr.theta_from_torsion(fa, case, theta0), case), fa


def test_case_detection():
    assert fr.case_of(gen.timelike_helix(64)) is CausalCase.TIMELIKE_CURVE
    assert fr.case_of(gen.spacelike_helix(65)) is CausalCase.SPACELIKE_TIMELIKE_NORMAL
    assert fr.case_of(gen.circle(64)) is CausalCase.SPACELIKE_TIMELIKE_BINORMAL


@pytest.mark.parametrize("name", list(SEEDS))
def test_transport_frame_is_orthonormal(name):
    pf = fr.frame_by_transport(SEEDS[name](128))
    assert fr.frame_orthonormality_defect(pf) < 1e-12
    eps_T, e1, e2 = pf.case.signs
    np.testing.assert_allclose(lz.inner(pf.E2, lz.cross(pf.T, pf.E1)), e2, atol=1e-12)


@pytest.mark.parametrize("name", list(SEEDS))
def test_kappa_identity(name):
    c = SEEDS[name](256)
    pf = fr.frame_by_transport(c)
    fa = cv.frenet_apparatus(c)
    assert fr.curvature_identity_defect(pf, fa.kappa) < 1e-10


@pytest.mark.parametrize("name", ["timelike_helix", "wobbly_circle", "spacelike_helix"])
def test_frame_ode_residual_second_order(name):
    errs, hs = [], []
    for n in (64, 128, 256):
        c = SEEDS[name](n)
        pf = fr.frame_by_transport(c)
        margin = 1 if c.closed else max(4, c.n // 16)
        errs.append(fr.frame_residual(pf, margin)[0])
        hs.append(c.ds)
    rate = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert abs(rate - 2.0) < 0.2


def test_circle_transport_frame_is_exact():
    pf = fr.frame_by_transport(gen.circle(128))
    assert fr.frame_residual(pf)[0] < 1e-12
    assert pf.holonomy == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", list(SEEDS))
def test_rotation_and_transport_agree(name):
    errs = []
    for n in (64, 128, 256):
        c = SEEDS[name](n)
        pr, _ = rotation_frame(c)
        errs.append(fr.frame_agreement(fr.frame_by_transport(c), pr))
    errs = np.array(errs)
    if errs.max() < 1e-12:
        return
    assert np.all(np.log2(errs[:-1] / errs[1:]) > 1.8), errs


def test_helix_holonomy_matches_total_torsion():
    c = gen.timelike_helix(256)
    pf = fr.frame_by_transport(c)
    tau = np.sqrt(2.0)
    expected = np.angle(np.exp(1j * tau * c.length))
    assert pf.holonomy == pytest.approx(expected, abs=10 * c.ds**2)


def test_emitted_coefficient_matrices_are_semi_skew():
    for name in SEEDS:
        pf = fr.frame_by_transport(SEEDS[name](64))
        A = fr.s_matrix(pf.k1, pf.k2, pf.case)
        assert cv.semi_skew_defect(A, pf.case.signs) == 0.0
        assert fr.frame_s_matrix(pf, 3).semi_skew_defect() == 0.0


@given(st.floats(-5, 5), st.floats(-5, 5))
@settings(max_examples=50)
def test_s_matrix_semi_skew_for_any_curvatures(k1, k2):
    for case in CausalCase:
        assert fr.FrameCoefficientMatrix(fr.s_matrix(k1, k2, case), case.signs) \
            .semi_skew_defect() == 0.0


def test_frenet_relation_for_parallel_curvatures():
    # k1 = kappa cos, k2 = kappa sin (timelike); (cosh, -sinh) spacelike
    pr, fa = rotation_frame(gen.timelike_helix(128), 0.4)
    np.testing.assert_allclose(pr.k1, fa.kappa * np.cos(pr.theta), atol=1e-14)
    np.testing.assert_allclose(pr.k2, fa.kappa * np.sin(pr.theta), atol=1e-14)
    pr, fa = rotation_frame(gen.spacelike_helix(129), 0.2)
    np.testing.assert_allclose(pr.k1, fa.kappa * np.cosh(pr.theta), atol=1e-14)
    np.testing.assert_allclose(pr.k2, -fa.kappa * np.sinh(pr.theta), atol=1e-14)


def test_theta_follows_torsion():
    c = gen.timelike_helix(128)
    pr, fa = rotation_frame(c)
    np.testing.assert_allclose(np.diff(pr.theta), np.sqrt(2) * c.ds, rtol=5 * c.ds**2)
    # both spacelike cases rotate with -tau
    c = gen.spacelike_helix(129)
    pr, fa = rotation_frame(c)
    # one-sided stencils spoil tau near the open ends
    np.testing.assert_allclose(np.diff(pr.theta)[8:-8], 0.6 * c.ds, rtol=5 * c.ds**2)


def test_constant_gauge_rotation():
    c = gen.timelike_helix(64)
    pf = fr.frame_by_transport(c)
    E1, E2 = fr.rotate_normal_pair(pf.E1, pf.E2, 0.3, pf.case)
    k1, k2 = fr.rotate_curvatures(pf.k1, pf.k2, 0.3, pf.case)
    Ts = cv.field_d1(c, pf.T)
    np.testing.assert_allclose(k1, lz.inner(Ts, E1), atol=1e-12)
    np.testing.assert_allclose(k2, lz.inner(Ts, E2), atol=1e-12)


def test_hyperbolic_range_guard():
    c = gen.circle(64)
    fa = cv.frenet_apparatus(c)
    with pytest.raises(HyperbolicRangeError):
        fr.frame_by_rotation(fa, np.full(c.n, 40.0), CausalCase.SPACELIKE_TIMELIKE_BINORMAL)


def test_case_mismatch_in_transport():
    with pytest.raises(MixedCausality):
        fr.frame_by_transport(gen.timelike_helix(64), case=CausalCase.SPACELIKE_TIMELIKE_NORMAL)


def test_line_admits_parallel_frame():
    pf = fr.frame_by_transport(gen.line(64), case=CausalCase.SPACELIKE_TIMELIKE_NORMAL)
    assert np.all(pf.k1 == 0) and np.all(pf.k2 == 0)
    assert fr.frame_orthonormality_defect(pf) < 1e-15


def test_hasimoto_phase_constant():
    spreads = []
    for n in (64, 128, 256):
        c = gen.wobbly_timelike_helix(n, amplitude=0.2)
        fa = cv.frenet_apparatus(c)
        pf = fr.frame_by_transport(c)
        ph = fr.hasimoto_phase(pf, fa.kappa, fa.tau)
        spreads.append(np.ptp(ph))
    spreads = np.array(spreads)
    assert np.all(np.log2(spreads[:-1] / spreads[1:]) > 1.8), spreads


def test_lorentz_rotation_maps_tangents():
    T = lz.normalize(np.array([[1.3, 0.2, 0.5], [1.4, 0.1, 0.7]]))
    R = fr.lorentz_rotation(T[:1], T[1:])[0]
    np.testing.assert_allclose(R @ T[0], T[1], atol=1e-14)
    G = R.T @ np.diag(lz.ETA) @ R
    np.testing.assert_allclose(G, np.diag(lz.ETA), atol=1e-14)
