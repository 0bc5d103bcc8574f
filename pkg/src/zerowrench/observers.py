"""Zero-wrench PD control and wrench disturbance observers.

Three controllers share the same outer loop, which regulates the measured
external wrench toward zero (plus a constant insertion feedforward):

* PD: f_c = -Kp*f_ext - Kd*d/dt(f_ext), derivative through a filtered
  differentiator.
* Conventional wrench observer (CWDOB): d_hat = Q(-f_ext - f_c'), i.e. the
  nominal plant is treated as an identity wrench map.  Commanded inertial
  reactions are indistinguishable from disturbances, which is the failure
  mode the dynamic observer removes.
* Dynamic wrench observer (DWDOB): the residual subtracts the modeled
  inertial wrench, r = Lambda_hat * xddot_f - L(f_ext) - L(f_c'), with the
  acceleration estimated from sampled poses through the composite
  differentiator chain and both wrench terms passed through the chain's
  low-pass content L so all residual terms carry the same phase lag.

The commanded wrench fed back into either observer is the previous tick's
applied wrench (one-sample delay), which breaks the algebraic loop.  The
insertion feedforward is folded into f_c before the observer subtraction,
so the observers see every commanded component; with an ideal drive
f_c' + d_hat = f_c holds exactly at every tick.  When a per-axis actuator
limit is set the clamped wrench is what feeds back, so saturation cannot
wind the estimate up.

Both observers engage bumplessly: the estimate low-pass is primed at zero,
so starting against a preloaded contact winds the estimate up over the
filter time constant instead of applying the whole first residual as an
instantaneous compensation jump.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .filters import (
    TWO_PI,
    CompositeAccelFilter,
    CompositeWrenchFilter,
    FilteredDiff,
    FilterParams,
    LowPass,
    insertion_composite,
)
from .rigid_body import forward_kinematics, task_inertia

Q_CUTOFF_DEFAULT = TWO_PI * 15.0
DERIV_CUTOFF_DEFAULT = TWO_PI * 15.0


class DimensionMismatch(ValueError):
    """Signal dimensions disagree (wrench vs gains vs inertia model)."""


@dataclass
class PdGains:
    """Diagonal wrench PD gains.

    kp and kd are the diagonals (per task axis).  Nonnegative entries are
    required; kp entries above one are legal but flagged (exceeds_unity),
    since the stability argument for the wrench loop assumes kp <= 1.
    """

    kp: np.ndarray
    kd: np.ndarray
    exceeds_unity: bool = field(init=False)

    def __post_init__(self):
        self.kp = np.asarray(self.kp, dtype=float)
        self.kd = np.asarray(self.kd, dtype=float)
        if self.kp.shape != self.kd.shape or self.kp.ndim != 1:
            raise DimensionMismatch("kp and kd must be 1-D and the same length")
        if np.any(self.kp < 0) or np.any(self.kd < 0):
            raise ValueError("PD gains must be non-negative")
        self.exceeds_unity = bool(np.any(self.kp > 1.0))

    @property
    def dim(self):
        return self.kp.shape[0]


# Translational gains act on both force axes; the 3-link arm adds the
# rotational pair on the tool moment.
GAIN_SET_A = {"translational": (0.10, 0.01), "rotational": (0.50, 0.06)}
GAIN_SET_B = {"translational": (1.00, 0.01), "rotational": (5.00, 0.06)}


def standard_gains(set_name, task_dim):
    """Gain presets for the insertion scenarios ("A" soft, "B" stiff)."""
    try:
        table = {"A": GAIN_SET_A, "B": GAIN_SET_B}[set_name]
    except KeyError:
        raise ValueError("gain set must be 'A' or 'B'") from None
    tp, td = table["translational"]
    if task_dim == 2:
        return PdGains(np.array([tp, tp]), np.array([td, td]))
    if task_dim == 3:
        rp, rd = table["rotational"]
        return PdGains(np.array([tp, tp, rp]), np.array([td, td, rd]))
    raise ValueError("task_dim must be 2 or 3")


@dataclass
class MismatchConfig:
    """Deliberate model error injected into the task inertia the controller uses.

    lambda_hat = (1 + scale) * Lambda + offset.  The result must stay
    positive definite; validate() checks that at a given configuration.
    """

    scale: float = 0.0
    offset: np.ndarray = None

    def __post_init__(self):
        if self.offset is not None:
            self.offset = np.asarray(self.offset, dtype=float)

    def apply(self, lam):
        lam_hat = (1.0 + self.scale) * lam
        if self.offset is not None:
            lam_hat = lam_hat + self.offset
        return lam_hat

    def validate_on(self, lam):
        lam_hat = self.apply(lam)
        try:
            np.linalg.cholesky(lam_hat)
        except np.linalg.LinAlgError:
            raise ValueError("mismatch makes the model inertia non positive definite")
        return lam_hat


class InertiaModel:
    """Model-side task inertia Lambda_hat(q): damped true inertia plus mismatch."""

    def __init__(self, model, mismatch=None, damping=1e-3):
        self.model = model
        self.mismatch = mismatch if mismatch is not None else MismatchConfig()
        self.damping = damping

    def __call__(self, q):
        return self.mismatch.apply(task_inertia(self.model, q, self.damping))


def pd_wrench(f_ext, f_ext_dot, gains):
    """Zero-reference wrench PD: -Kp*f_ext - Kd*f_ext_dot (diagonal gains)."""
    f_ext = np.asarray(f_ext, dtype=float)
    f_ext_dot = np.asarray(f_ext_dot, dtype=float)
    if f_ext.shape != (gains.dim,) or f_ext_dot.shape != (gains.dim,):
        raise DimensionMismatch("wrench dimension does not match the gain vectors")
    return -gains.kp * f_ext - gains.kd * f_ext_dot


def saturate(wrench, limit):
    """Symmetric per-axis actuator clamp; a None or empty limit is an ideal drive."""
    if limit is None or len(limit) == 0:
        return wrench
    limit = np.asarray(limit, dtype=float)
    return np.clip(wrench, -limit, limit)


def dwdob_residual(lambda_hat, xddot_f, f_ext_L, f_c_L):
    """Phase-aligned observer residual Lambda_hat*xddot_f - f_ext_L - f_c_L."""
    lambda_hat = np.asarray(lambda_hat, dtype=float)
    xddot_f = np.asarray(xddot_f, dtype=float)
    m = xddot_f.shape[0]
    if lambda_hat.shape != (m, m):
        raise DimensionMismatch("inertia model shape does not match the acceleration")
    f_ext_L = np.asarray(f_ext_L, dtype=float)
    f_c_L = np.asarray(f_c_L, dtype=float)
    if f_ext_L.shape != (m,) or f_c_L.shape != (m,):
        raise DimensionMismatch("filtered wrench dimensions do not match")
    return lambda_hat @ xddot_f - f_ext_L - f_c_L


@dataclass
class ControlOutput:
    """One controller tick: total commanded f_c, estimate d_hat, compensated f_cp.

    The wrench sent to the plant is f_cp = f_c - d_hat, clipped to the
    actuator limit when one is set; f_c already includes the feedforward
    and any scripted command transient.
    """

    f_c: np.ndarray
    d_hat: np.ndarray
    f_cp: np.ndarray
    residual: np.ndarray = None

    @property
    def applied(self):
        return self.f_cp


class PDController:
    """Wrench PD with no observer: applied = f_c (through the actuator clamp)."""

    name = "PD"

    def __init__(self, gains, dt, deriv_cutoff=DERIV_CUTOFF_DEFAULT, f_limit=None):
        self.gains = gains
        self.f_limit = f_limit
        self.deriv = FilteredDiff(FilterParams(deriv_cutoff, dt))
        self.d_hat = np.zeros(gains.dim)
        self.last_commanded = np.zeros(gains.dim)

    def reset(self):
        self.deriv.reset()
        self.d_hat = np.zeros(self.gains.dim)
        self.last_commanded = np.zeros(self.gains.dim)

    def tick(self, t, q, f_ext, command_bias, lam_hat=None):
        f_dot = self.deriv.step(f_ext)
        f_c = pd_wrench(f_ext, f_dot, self.gains) + command_bias
        f_cp = saturate(f_c, self.f_limit)
        self.last_commanded = f_cp
        return ControlOutput(f_c=f_c, d_hat=self.d_hat.copy(), f_cp=f_cp)


class CWDOBController:
    """PD plus conventional wrench observer (identity nominal plant)."""

    name = "CWDOB"

    def __init__(self, gains, dt, q_cutoff=Q_CUTOFF_DEFAULT,
                 deriv_cutoff=DERIV_CUTOFF_DEFAULT, f_limit=None):
        self.gains = gains
        self.f_limit = f_limit
        self.q_filter = LowPass(FilterParams(q_cutoff, dt, prewarp=True))
        self.deriv = FilteredDiff(FilterParams(deriv_cutoff, dt))
        self.d_hat = np.zeros(gains.dim)
        self.last_commanded = np.zeros(gains.dim)
        self.q_filter.prime(np.zeros(gains.dim))

    def reset(self):
        self.q_filter.reset()
        self.deriv.reset()
        self.d_hat = np.zeros(self.gains.dim)
        self.last_commanded = np.zeros(self.gains.dim)
        self.q_filter.prime(np.zeros(self.gains.dim))

    def tick(self, t, q, f_ext, command_bias, lam_hat=None):
        f_ext = np.asarray(f_ext, dtype=float)
        residual = -f_ext - self.last_commanded
        d_hat = self.q_filter.step(residual)
        f_dot = self.deriv.step(f_ext)
        f_c = pd_wrench(f_ext, f_dot, self.gains) + command_bias
        f_cp = saturate(f_c - d_hat, self.f_limit)
        self.d_hat = d_hat
        self.last_commanded = f_cp
        return ControlOutput(f_c=f_c, d_hat=d_hat, f_cp=f_cp, residual=residual)


class DWDOBController:
    """PD plus dynamic wrench observer with modeled task inertia.

    The residual sees the model inertial wrench Lambda_hat * xddot (pose
    samples through the composite differentiator chain) minus the
    low-pass-matched measured and commanded wrenches, so commanded
    accelerations cancel instead of being misread as disturbances.
    """

    name = "DWDOB"

    def __init__(self, gains, model, dt, mismatch=None, inertia_damping=1e-3,
                 q_cutoff=Q_CUTOFF_DEFAULT, deriv_cutoff=DERIV_CUTOFF_DEFAULT,
                 l_cutoffs_hz=(100.0, 15.0), f_limit=None):
        self.gains = gains
        self.model = model
        self.f_limit = f_limit
        if model.task_dim != gains.dim:
            raise DimensionMismatch("gain vector does not match the task dimension")
        config = insertion_composite(dt, l_cutoffs_hz)
        self.accel_path = CompositeAccelFilter(config)
        self.ext_path = CompositeWrenchFilter(config)
        self.cmd_path = CompositeWrenchFilter(config)
        self.q_filter = LowPass(FilterParams(q_cutoff, dt, prewarp=True))
        self.deriv = FilteredDiff(FilterParams(deriv_cutoff, dt))
        self.inertia = InertiaModel(model, mismatch, inertia_damping)
        self.d_hat = np.zeros(gains.dim)
        self.last_commanded = np.zeros(gains.dim)
        self.last_residual = np.zeros(gains.dim)
        self.q_filter.prime(np.zeros(gains.dim))

    def reset(self):
        self.accel_path.reset()
        self.ext_path.reset()
        self.cmd_path.reset()
        self.q_filter.reset()
        self.deriv.reset()
        self.d_hat = np.zeros(self.gains.dim)
        self.last_commanded = np.zeros(self.gains.dim)
        self.last_residual = np.zeros(self.gains.dim)
        self.q_filter.prime(np.zeros(self.gains.dim))

    def tick(self, t, q, f_ext, command_bias, lam_hat=None):
        f_ext = np.asarray(f_ext, dtype=float)
        pose = forward_kinematics(self.model, q)
        xddot_f = self.accel_path.step(pose)
        f_ext_L = self.ext_path.step(f_ext)
        f_c_L = self.cmd_path.step(self.last_commanded)
        if lam_hat is None:
            lam_hat = self.inertia(q)
        residual = dwdob_residual(lam_hat, xddot_f, f_ext_L, f_c_L)
        d_hat = self.q_filter.step(residual)
        f_dot = self.deriv.step(f_ext)
        f_c = pd_wrench(f_ext, f_dot, self.gains) + command_bias
        f_cp = saturate(f_c - d_hat, self.f_limit)
        self.d_hat = d_hat
        self.last_commanded = f_cp
        self.last_residual = residual
        return ControlOutput(f_c=f_c, d_hat=d_hat, f_cp=f_cp, residual=residual)
