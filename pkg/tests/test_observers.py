"""Observer and PD layer: gain presets, residual algebra, windup behaviour."""
import math

import numpy as np
import pytest

from zerowrench.harness import two_link_unit
from zerowrench.observers import (
    CWDOBController,
    DimensionMismatch,
    DWDOBController,
    InertiaModel,
    MismatchConfig,
    PdGains,
    PDController,
    dwdob_residual,
    pd_wrench,
    saturate,
    standard_gains,
)
from zerowrench.rigid_body import task_inertia

DT = 1e-3


# --- gains and basic algebra --------------------------------------------------

def test_standard_gain_tables():
    a2 = standard_gains("A", 2)
    np.testing.assert_allclose(a2.kp, [0.10, 0.10])
    np.testing.assert_allclose(a2.kd, [0.01, 0.01])
    b3 = standard_gains("B", 3)
    np.testing.assert_allclose(b3.kp, [1.00, 1.00, 5.00])
    np.testing.assert_allclose(b3.kd, [0.01, 0.01, 0.06])
    assert not a2.exceeds_unity
    assert b3.exceeds_unity
    with pytest.raises(ValueError):
        standard_gains("C", 2)
    with pytest.raises(ValueError):
        standard_gains("A", 4)


def test_gains_validation():
    with pytest.raises(DimensionMismatch):
        PdGains(np.array([0.1, 0.1]), np.array([0.01]))
    with pytest.raises(ValueError):
        PdGains(np.array([-0.1, 0.1]), np.array([0.01, 0.01]))
    g = PdGains(np.array([0.5, 0.5, 0.5]), np.zeros(3))
    assert g.dim == 3 and not g.exceeds_unity


def test_pd_wrench_hand_example():
    g = PdGains(np.array([0.5, 2.0]), np.array([0.1, 0.0]))
    out = pd_wrench(np.array([2.0, -1.0]), np.array([10.0, 4.0]), g)
    np.testing.assert_allclose(out, [-2.0, 2.0])
    with pytest.raises(DimensionMismatch):
        pd_wrench(np.array([1.0]), np.array([1.0]), g)


def test_saturate_clamps_per_axis():
    w = np.array([5.0, -80.0, 1.0])
    np.testing.assert_allclose(saturate(w, (3.0, 40.0, 2.0)), [3.0, -40.0, 1.0])
    assert saturate(w, None) is w
    assert saturate(w, ()) is w


def test_dwdob_residual_hand_example():
    lam = np.array([[2.0, 0.0], [0.0, 1.0]])
    r = dwdob_residual(lam, np.array([1.0, 2.0]), np.array([0.5, 0.5]),
                       np.array([0.1, -0.1]))
    np.testing.assert_allclose(r, [1.4, 1.6])
    with pytest.raises(DimensionMismatch):
        dwdob_residual(lam, np.array([1.0, 2.0, 3.0]), np.zeros(3), np.zeros(3))
    with pytest.raises(DimensionMismatch):
        dwdob_residual(lam, np.array([1.0, 2.0]), np.zeros(3), np.zeros(2))


def test_mismatch_scales_and_offsets_the_inertia():
    lam = np.array([[2.0, 0.2], [0.2, 1.0]])
    mm = MismatchConfig(scale=0.5, offset=np.array([[0.1, 0.0], [0.0, 0.1]]))
    np.testing.assert_allclose(mm.apply(lam), 1.5 * lam + 0.1 * np.eye(2))
    mm.validate_on(lam)
    bad = MismatchConfig(scale=-0.99, offset=np.array([[-1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(ValueError):
        bad.validate_on(lam)


def test_inertia_model_applies_mismatch_to_task_inertia():
    model = two_link_unit()
    q = np.array([0.4, 1.0])
    hat = InertiaModel(model, MismatchConfig(scale=0.25), damping=1e-3)
    np.testing.assert_allclose(hat(q), 1.25 * task_inertia(model, q, 1e-3),
                               atol=1e-12)


# --- PD controller ------------------------------------------------------------

def test_pd_controller_first_tick_uses_zero_derivative():
    g = standard_gains("A", 2)
    ctl = PDController(g, DT)
    f = np.array([4.0, -2.0])
    bias = np.array([0.0, -20.0])
    out = ctl.tick(0.0, np.zeros(2), f, bias)
    np.testing.assert_allclose(out.f_c, -g.kp * f + bias)
    np.testing.assert_allclose(out.d_hat, 0.0)
    assert out.residual is None
    np.testing.assert_array_equal(out.applied, out.f_cp)


def test_pd_controller_respects_drive_limit():
    g = standard_gains("A", 2)
    ctl = PDController(g, DT, f_limit=(5.0, 5.0))
    out = ctl.tick(0.0, np.zeros(2), np.zeros(2), np.array([40.0, -40.0]))
    np.testing.assert_allclose(out.f_cp, [5.0, -5.0])
    np.testing.assert_allclose(out.f_c, [40.0, -40.0])   # pre-clamp command kept


# --- conventional observer ----------------------------------------------------

def test_cwdob_starts_bumplessly():
    ctl = CWDOBController(standard_gains("A", 2), DT)
    out = ctl.tick(0.0, np.zeros(2), np.zeros(2), np.zeros(2))
    np.testing.assert_allclose(out.d_hat, 0.0)
    # even a nonzero first wrench only moves the estimate by one filter step
    ctl.reset()
    out = ctl.tick(0.0, np.zeros(2), np.array([10.0, 0.0]), np.zeros(2))
    assert abs(out.d_hat[0]) < 1.0


def test_cwdob_winds_up_against_a_steady_command():
    # a constant free-space command is indistinguishable from a disturbance
    # for the conventional observer, so the estimate keeps growing
    ctl = CWDOBController(standard_gains("A", 2), DT)
    bias = np.array([5.0, 0.0])
    zero = np.zeros(2)
    mags = []
    for k in range(400):
        out = ctl.tick(k * DT, zero, zero, bias)
        mags.append(abs(out.d_hat[0]))
    assert mags[-1] > 10.0 * (abs(bias[0]) * 0.05)
    assert mags[-1] > mags[200] > mags[100]


def test_cwdob_saturation_feedback_bounds_the_windup():
    limit = (8.0, 8.0)
    ctl = CWDOBController(standard_gains("A", 2), DT, f_limit=limit)
    bias = np.array([5.0, 0.0])
    zero = np.zeros(2)
    for k in range(4000):
        out = ctl.tick(k * DT, zero, zero, bias)
        assert np.all(np.abs(out.f_cp) <= 8.0 + 1e-12)
    # anti-windup: the estimate levels off near the clamp instead of diverging
    assert abs(out.d_hat[0]) < 2.0 * 8.0


def test_cwdob_compensation_identity():
    ctl = CWDOBController(standard_gains("A", 2), DT)
    out = None
    for k in range(50):
        out = ctl.tick(k * DT, np.zeros(2), np.array([1.0, 2.0]),
                       np.array([3.0, -1.0]))
    np.testing.assert_allclose(out.f_cp, out.f_c - out.d_hat, atol=1e-12)


# --- dynamic observer ---------------------------------------------------------

def test_dwdob_rejects_mismatched_gain_dimension():
    with pytest.raises(DimensionMismatch):
        DWDOBController(standard_gains("A", 3), two_link_unit(), DT)


def test_dwdob_estimates_a_hidden_holding_force():
    # frozen plant, steady measured push, no command: the only explanation
    # is an equal and opposite hidden wrench, and the estimate finds it
    model = two_link_unit()
    ctl = DWDOBController(standard_gains("A", 2), model, DT)
    q = np.array([0.4, 1.0])
    f0 = np.array([6.0, -2.0])
    out = None
    for k in range(1500):
        out = ctl.tick(k * DT, q, f0, np.zeros(2))
        # keep the loop open: pretend the drive never applies the command
        ctl.last_commanded = np.zeros(2)
    np.testing.assert_allclose(out.d_hat, -f0, rtol=1e-3)


def test_dwdob_reset_restores_fresh_state():
    model = two_link_unit()
    ctl = DWDOBController(standard_gains("A", 2), model, DT)
    for k in range(20):
        ctl.tick(k * DT, np.array([0.4, 1.0]), np.array([3.0, 1.0]), np.zeros(2))
    ctl.reset()
    fresh = DWDOBController(standard_gains("A", 2), model, DT)
    a = ctl.tick(0.0, np.array([0.4, 1.0]), np.array([3.0, 1.0]), np.zeros(2))
    b = fresh.tick(0.0, np.array([0.4, 1.0]), np.array([3.0, 1.0]), np.zeros(2))
    np.testing.assert_array_equal(a.d_hat, b.d_hat)
    np.testing.assert_array_equal(a.f_cp, b.f_cp)


def test_dwdob_accepts_inertia_override():
    model = two_link_unit()
    q = np.array([0.4, 1.0])
    f0 = np.array([5.0, 0.0])
    a = DWDOBController(standard_gains("A", 2), model, DT)
    b = DWDOBController(standard_gains("A", 2), model, DT)
    out_a = out_b = None
    for k in range(200):
        out_a = a.tick(k * DT, q, f0, np.zeros(2))
        out_b = b.tick(k * DT, q, f0, np.zeros(2), lam_hat=np.eye(2) * 50.0)
    # a stationary pose keeps the acceleration path silent, so the inertia
    # override cannot change the estimate
    np.testing.assert_allclose(out_a.d_hat, out_b.d_hat, atol=1e-12)
    assert out_a.residual is not None


def test_dwdob_compensation_identity():
    model = two_link_unit()
    ctl = DWDOBController(standard_gains("A", 2), model, DT)
    out = None
    for k in range(50):
        out = ctl.tick(k * DT, np.array([0.4, 1.0]), np.array([1.0, 2.0]),
                       np.array([3.0, -1.0]))
    np.testing.assert_allclose(out.f_cp, out.f_c - out.d_hat, atol=1e-12)
