import numpy as np
import pytest

from minkvfe import flow as fl
from minkvfe import frames as fr
from minkvfe import generators as gen
from minkvfe import lorentz as lz
from minkvfe import pde
from minkvfe.curve import frenet_apparatus
from minkvfe.errors import ArcLengthDrift
from minkvfe.frames import CausalCase


def short_run(c, steps=40, c_dt=0.05, record_every=4, **kw):
    cfg = fl.FlowConfig(dt=c_dt * c.ds**2, steps=steps, record_every=record_every,
                        unit_speed_tol=1.0)
    return fl.run(c, cfg, **kw)


def test_velocity_is_binormal_times_curvature():
    c = gen.timelike_helix(128)
    V = fl.vfe_velocity(c)
    pf = fr.frame_by_transport(c)
    v1, v2 = fl.binormal_velocity_in_frame(pf)
    np.testing.assert_allclose(V, v1[:, None] * pf.E1 + v2[:, None] * pf.E2, atol=5e-3)
    # screw motion: constant axial speed, planar part tangent to the circles
    np.testing.assert_allclose(V[:, 0], V[0, 0], atol=1e-12)
    radial = np.sum(V[:, 1:] * c.samples[:, 1:], axis=1)
    np.testing.assert_allclose(radial, 0.0, atol=1e-12)


def test_line_is_stationary():
    c = gen.line(32)
    h = fl.run(c, fl.FlowConfig(dt=1e-4, steps=5), case=CausalCase.SPACELIKE_TIMELIKE_NORMAL)
    np.testing.assert_array_equal(h.curves[-1].samples, c.samples)
    assert np.all(h.k1 == 0) and np.all(h.k2 == 0)


def test_record_stride_and_history_shape():
    c = gen.timelike_helix(32)
    h = fl.run(c, fl.FlowConfig(dt=1e-3, steps=10, record_every=5))
    assert h.times == pytest.approx([0.0, 5e-3, 1e-2])
    assert h.k1.shape == (3, 32)
    assert h.dt == pytest.approx(5e-3)
    assert h.case is CausalCase.TIMELIKE_CURVE


def test_helix_moves_rigidly():
    c = gen.timelike_helix(64)
    h = fl.run(c, fl.FlowConfig(dt=2e-4, steps=500, record_every=100))
    fa0 = frenet_apparatus(h.curves[0])
    fa1 = frenet_apparatus(h.curves[-1])
    np.testing.assert_allclose(fa1.kappa, fa0.kappa, atol=1e-10)
    np.testing.assert_allclose(fa1.tau, fa0.tau, atol=1e-10)
    q = h.k1**2 + h.k2**2
    assert np.ptp(q) < 1e-10


def test_drift_guard_raises():
    c = gen.wobbly_timelike_helix(32, amplitude=0.3)
    with pytest.raises(ArcLengthDrift):
        fl.run(c, fl.FlowConfig(dt=1e-3, steps=400, unit_speed_tol=1e-4))


def test_resample_on_drift_records_event():
    c = gen.wobbly_timelike_helix(32, amplitude=0.3)
    h = fl.run(c, fl.FlowConfig(dt=1e-3, steps=200, record_every=10, unit_speed_tol=1e-4,
                                resample_on_drift=True))
    assert h.events
    assert not np.all(h.valid_time_rows())


def test_stability_warning():
    c = gen.timelike_helix(64)
    with pytest.warns(RuntimeWarning, match="0.25 ds"):
        fl.run(c, fl.FlowConfig(dt=1e-2, steps=1))


def test_frame_stays_orthonormal_and_kappa_identity_holds():
    c = gen.wobbly_timelike_helix(64, amplitude=0.2)
    h = fl.run(c, fl.FlowConfig(dt=1e-4, steps=100, record_every=20))
    for curve, pf in zip(h.curves, h.frames):
        assert fr.frame_orthonormality_defect(pf) < 1e-12
        assert fr.curvature_identity_defect(pf, frenet_apparatus(curve).kappa) < 1e-10


def test_t_matrix_semi_skew():
    rng = np.random.default_rng(1)
    k = rng.normal(size=(4, 16))
    for case in CausalCase:
        A = fl.t_matrix(*k, case)
        assert fr.FrameCoefficientMatrix(A, case.signs).semi_skew_defect() == 0.0


def test_gauge_u_values():
    assert fl.gauge_u(3.0, 4.0, CausalCase.TIMELIKE_CURVE) == 12.5
    assert fl.gauge_u(3.0, 1.0, CausalCase.SPACELIKE_TIMELIKE_NORMAL) == 4.0
    assert fl.gauge_u(3.0, 1.0, CausalCase.SPACELIKE_TIMELIKE_BINORMAL) == -4.0


@pytest.mark.parametrize("make", [lambda n: gen.wobbly_timelike_helix(n, amplitude=0.2),
                                  lambda n: gen.wobbly_circle(n)])
def test_frame_time_evolution_second_order(make):
    errs, spreads, hs = [], [], []
    for lev, n in enumerate((64, 128, 256)):
        c = make(n)
        if fr.case_of(c).hyperbolic:
            h = short_run(c)
        else:
            N = 40 * 4**lev
            h = fl.run(c, fl.FlowConfig(dt=0.05 / N, steps=N, record_every=4))
        errs.append(fl.frame_t_residual(h))
        spreads.append(fl.u_consistency(h)[0])
        hs.append(c.ds)
    assert abs(pde.convergence_order(hs, errs) - 2.0) < 0.3
    # recovered u - formula is constant in s: the gauge has no c(t)
    assert pde.convergence_order(hs, spreads) > 1.8


def test_tangent_evolution_matches_frame_formula():
    errs, hs = [], []
    for lev, n in enumerate((64, 128, 256)):
        c = gen.wobbly_timelike_helix(n, amplitude=0.2)
        N = 40 * 4**lev
        h = fl.run(c, fl.FlowConfig(dt=0.05 / N, steps=N, record_every=4 * 4**lev))
        errs.append(fl.tangent_evolution_residual(h))
        hs.append(c.ds)
    assert abs(pde.convergence_order(hs, errs) - 2.0) < 0.3


def test_theta0_rotates_curvatures():
    c = gen.wobbly_timelike_helix(64, amplitude=0.2)
    cfg = fl.FlowConfig(dt=1e-4, steps=20, record_every=10)
    h0 = fl.run(c, cfg)
    h1 = fl.run(c, cfg, theta0=0.3)
    k1, k2 = fr.rotate_curvatures(h0.k1, h0.k2, 0.3, h0.case)
    np.testing.assert_allclose(h1.k1, k1, atol=1e-12)
    np.testing.assert_allclose(h1.k2, k2, atol=1e-12)


def test_initial_seed_is_normal():
    c = gen.circle(64)
    e = fl.initial_seed(c, CausalCase.SPACELIKE_TIMELIKE_BINORMAL, 0.5)
    T = fr.frame_by_transport(c).T[0]
    assert abs(lz.inner(e, T)) < 1e-14
    assert lz.inner(e, e) == pytest.approx(1.0)
