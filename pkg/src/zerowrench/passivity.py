"""Runtime passivity instrumentation and the safety stop.

The monitor tracks the model-side kinetic storage S = 1/2 xd' Lambda_hat xd
and the energy received through the contact port E_port = integral of
f_ext' xd (trapezoidal, at the control rate).  The passivity residual
rho = (S - S0) - E_port is the storage growth not explained by the port:
rho > 0 means the controlled robot injected energy.  The implemented rho
omits the internal filter storage, so healthy runs are asserted bounded by
a small budget rather than exactly non-positive; an optional diagonal
observer-storage term 1/2 * p * |d_hat|^2 can be added for analysis and is
off by default.

Safety: the run latches a stop as soon as the measured force norm exceeds
90 N or the moment norm exceeds 5 N*m (strict inequalities).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FORCE_LIMIT_DEFAULT = 90.0   # N
MOMENT_LIMIT_DEFAULT = 5.0   # N*m


class NotPositiveDefinite(ValueError):
    """Storage requested with a non positive definite inertia model."""


@dataclass(frozen=True)
class SafetyLimits:
    """Hard stop thresholds on the measured external wrench."""

    force_max: float = FORCE_LIMIT_DEFAULT
    moment_max: float = MOMENT_LIMIT_DEFAULT

    def __post_init__(self):
        if self.force_max <= 0 or self.moment_max <= 0:
            raise ValueError("safety limits must be positive")


def split_wrench(w):
    """Split a planar wrench into (forces, moments); 2-D wrenches have no moment."""
    w = np.asarray(w, dtype=float)
    if w.shape[0] <= 2:
        return w, w[2:]
    return w[:2], w[2:]


def safety_check(limits, f_ext):
    """Return "force" or "moment" when a limit is exceeded (strict), else None."""
    force, moment = split_wrench(f_ext)
    if float(np.linalg.norm(force)) > limits.force_max:
        return "force"
    if moment.size and float(np.linalg.norm(moment)) > limits.moment_max:
        return "moment"
    return None


def storage(lambda_hat, xdot):
    """Model-side kinetic storage 1/2 xd' Lambda_hat xd (J); Lambda_hat must be SPD."""
    lam = np.asarray(lambda_hat, dtype=float)
    if not np.allclose(lam, lam.T, rtol=1e-9, atol=1e-12):
        raise NotPositiveDefinite("inertia model is not symmetric")
    try:
        np.linalg.cholesky(lam)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("inertia model is not positive definite") from None
    xdot = np.asarray(xdot, dtype=float)
    return 0.5 * float(xdot @ lam @ xdot)


@dataclass
class EnergyLedger:
    """Per-run energy bookkeeping (all entries in joules).

    obs_storage_gain > 0 adds the optional observer-storage term
    1/2 * gain * |d_hat|^2 to the stored energy.
    """

    e_port: float = 0.0
    s0: float = 0.0
    s_now: float = 0.0
    rho: float = 0.0
    stopped: bool = False
    stop_reason: str = "none"
    obs_storage_gain: float = 0.0
    _prev_power: float = field(default=0.0, repr=False)
    _started: bool = field(default=False, repr=False)

    def reset(self):
        self.e_port = 0.0
        self.s0 = 0.0
        self.s_now = 0.0
        self.rho = 0.0
        self.stopped = False
        self.stop_reason = "none"
        self._prev_power = 0.0
        self._started = False

    def mark_stopped(self, reason):
        # latch: the first reason wins
        if not self.stopped:
            self.stopped = True
            self.stop_reason = reason

    def update(self, lambda_hat, xdot, f_ext, dt, d_hat=None):
        """Advance the ledger one control tick and return the current rho."""
        s = storage(lambda_hat, xdot)
        if self.obs_storage_gain > 0.0 and d_hat is not None:
            d_hat = np.asarray(d_hat, dtype=float)
            s += 0.5 * self.obs_storage_gain * float(d_hat @ d_hat)
        if not self._started:
            self.s0 = s
            self._started = True
            self._prev_power = float(np.dot(f_ext, xdot))
        else:
            port_energy_step(self, f_ext, xdot, dt)
        self.s_now = s
        self.rho = passivity_residual(self)
        return self.rho


def port_energy_step(ledger, f_ext, xdot, dt):
    """Trapezoidal update of the port energy integral f_ext' xd dt."""
    power = float(np.dot(np.asarray(f_ext, dtype=float), np.asarray(xdot, dtype=float)))
    ledger.e_port += 0.5 * dt * (power + ledger._prev_power)
    ledger._prev_power = power
    return ledger.e_port


def passivity_residual(ledger):
    """rho = (S - S0) - E_port; positive values flag injected energy."""
    return (ledger.s_now - ledger.s0) - ledger.e_port
