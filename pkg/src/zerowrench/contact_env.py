"""Planar peg-in-hole contact environment and the closed-loop simulator.

The environment is a rigid plate with a rectangular slot (optional 45-degree
chamfer at the lips) and a rectangular peg rigidly attached to the arm tip,
extending from the tip task frame back up along the tool axis.  Contact is
a penalty model with two mechanisms:

* peg bottom corners against plate top, chamfer faces, slot walls, floor;
* slot lip corners against the peg side faces (the tilted-peg wedge case).

Each contact produces a clamped spring-damper normal force
N = max(0, k*pen + c*pen_rate) plus regularized Coulomb friction
-mu*N*tanh(v_t / V_EPS) along the surface tangent, so the element never
pulls and never generates energy.  The resulting wrench is expressed at
the tip task frame (fx, fy, tz).

The closed-loop world runs the controller at the control rate and
integrates the plant with semi-implicit Euler substeps, with the contact
wrench re-evaluated every substep.  Safety latches a stop when the
measured wrench exceeds the limits; the trace up to and including the
stop tick is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rigid_body as rb
from .observers import InertiaModel
from .passivity import EnergyLedger, SafetyLimits, safety_check

V_EPS = 1e-4          # m/s, friction regularization velocity
PEG_EXTRA_LENGTH = 0.05   # m of peg body above the hole depth for lip contacts
_SQRT2 = math.sqrt(2.0)


class SafetyStop(RuntimeError):
    """Raised by World.step when a safety limit latches; the trace stays valid."""


@dataclass(frozen=True)
class HoleGeometry:
    """Slot and peg geometry plus contact material parameters.

    width          slot opening width (m), must exceed peg_width
    depth          slot depth (m)
    peg_width      peg width (m)
    chamfer        45-degree lead-in size (m), 0 disables it
    wall_stiffness penalty stiffness (N/m)
    wall_damping   penalty damping (N*s/m)
    friction_coeff Coulomb friction coefficient
    mouth_x/y      world position of the slot mouth center
    """

    width: float = 0.0202
    depth: float = 0.030
    peg_width: float = 0.020
    chamfer: float = 0.001
    wall_stiffness: float = 1e5
    wall_damping: float = 150.0
    friction_coeff: float = 0.4
    mouth_x: float = 0.0
    mouth_y: float = 0.0

    def __post_init__(self):
        if self.peg_width <= 0 or self.depth <= 0:
            raise ValueError("peg width and slot depth must be positive")
        if self.width <= self.peg_width:
            raise ValueError("slot width must exceed the peg width (clearance > 0)")
        if self.chamfer < 0:
            raise ValueError("chamfer must be non-negative")
        if self.wall_stiffness <= 0 or self.wall_damping < 0:
            raise ValueError("stiffness must be positive, damping non-negative")
        if not 0.0 <= self.friction_coeff < 2.0:
            raise ValueError("friction coefficient out of range")

    @property
    def clearance(self):
        return self.width - self.peg_width

    @property
    def peg_length(self):
        return self.depth + PEG_EXTRA_LENGTH


@dataclass
class ContactInfo:
    """One resolved contact point (world frame) for diagnostics."""

    kind: str
    point: tuple
    normal: tuple
    penetration: float
    normal_force: float
    friction_force: float


def _corner_surface(cx, cy, geom):
    """Nearest-surface resolution for a peg corner in hole-local coords.

    Returns (penetration, nx, ny, kind) or None when the point is free.
    """
    if cy >= 0.0:
        return None
    w2 = 0.5 * geom.width
    ch = geom.chamfer
    opening = w2 + ch
    ax = abs(cx)
    if -ch <= cy < 0.0 and ch > 0.0:
        half_open = w2 + (cy + ch)
    else:
        half_open = w2
    if ax <= half_open:
        # inside the slot airspace; only the floor can be hit
        pen = -geom.depth - cy
        if pen > 0.0:
            return pen, 0.0, 1.0, "corner-floor"
        return None
    # laterally inside wall material
    sgn = 1.0 if cx > 0.0 else -1.0
    if cy >= -ch and ch > 0.0:
        pen = (ax - half_open) / _SQRT2
        nx, ny, kind = -sgn / _SQRT2, 1.0 / _SQRT2, "corner-chamfer"
    else:
        pen = ax - w2
        nx, ny, kind = -sgn, 0.0, "corner-wall"
    if ax >= opening:
        # outside the opening the plate top may be the nearest face
        up_pen = -cy
        if up_pen < pen:
            pen, nx, ny, kind = up_pen, 0.0, 1.0, "corner-top"
    if cy < -geom.depth:
        floor_pen = -geom.depth - cy
        if floor_pen < pen:
            pen, nx, ny, kind = floor_pen, 0.0, 1.0, "corner-floor"
    return pen, nx, ny, kind


def _contact_terms(pose, vel, geom, collect=None):
    """Total contact wrench at the tip plus stored spring energy.

    pose/vel are (x, y, phi) and (vx, vy, phidot); returns
    (fx, fy, tz, spring_energy).  Appends ContactInfo records to collect
    when a list is given.
    """
    x, y, phi = float(pose[0]), float(pose[1]), float(pose[2])
    vx, vy, phidot = float(vel[0]), float(vel[1]), float(vel[2])
    k = geom.wall_stiffness
    c = geom.wall_damping
    mu = geom.friction_coeff
    w2 = 0.5 * geom.peg_width

    # peg axes: u points from the tip up the peg, n is the lateral axis
    ux, uy = -math.cos(phi), -math.sin(phi)
    nx_ax, ny_ax = -math.sin(phi), math.cos(phi)

    fx = fy = tz = energy = 0.0
    mouth_x, mouth_y = geom.mouth_x, geom.mouth_y

    for s in (1.0, -1.0):
        # corner world position and velocity (rigid body point)
        rx = s * w2 * nx_ax
        ry = s * w2 * ny_ax
        cx_w = x + rx
        cy_w = y + ry
        vcx = vx + s * w2 * phidot * ux
        vcy = vy + s * w2 * phidot * uy
        hit = _corner_surface(cx_w - mouth_x, cy_w - mouth_y, geom)
        if hit is None:
            continue
        pen, nrm_x, nrm_y, kind = hit
        # flat bottom meets flat floor at both corners: split the surface
        # stiffness between them so the total matches a single flat contact
        share = 0.5 if kind == "corner-floor" else 1.0
        pen_rate = -(vcx * nrm_x + vcy * nrm_y)
        normal_force = share * (k * pen + c * pen_rate)
        if normal_force <= 0.0:
            continue
        energy += 0.5 * share * k * pen * pen
        tx, ty = -nrm_y, nrm_x
        v_t = vcx * tx + vcy * ty
        fric = -mu * normal_force * math.tanh(v_t / V_EPS)
        fxi = normal_force * nrm_x + fric * tx
        fyi = normal_force * nrm_y + fric * ty
        fx += fxi
        fy += fyi
        tz += rx * fyi - ry * fxi
        if collect is not None:
            collect.append(ContactInfo(kind, (cx_w, cy_w), (nrm_x, nrm_y),
                                       pen, normal_force, fric))

    # slot lip corners against the peg side faces
    lip_y = mouth_y - geom.chamfer
    peg_len = geom.peg_length
    for s_lip in (1.0, -1.0):
        lx = mouth_x + s_lip * 0.5 * geom.width
        dx = lx - x
        dy = lip_y - y
        xi = dx * nx_ax + dy * ny_ax
        eta = dx * ux + dy * uy
        if not 0.0 < eta <= peg_len:
            continue
        axi = abs(xi)
        if axi >= w2 or axi == 0.0:
            continue
        s_face = 1.0 if xi > 0.0 else -1.0
        pen = w2 - axi
        # xi rate: d/dt[(L - tip) . n(phi)] with dn/dphi = u
        xi_rate = -(vx * nx_ax + vy * ny_ax) + phidot * eta
        pen_rate = -s_face * xi_rate
        normal_force = k * pen + c * pen_rate
        if normal_force <= 0.0:
            continue
        energy += 0.5 * k * pen * pen
        nrm_x = -s_face * nx_ax
        nrm_y = -s_face * ny_ax
        # peg material point coincident with the lip corner
        rx = lx - x
        ry = lip_y - y
        vmx = vx - phidot * ry
        vmy = vy + phidot * rx
        v_t = vmx * ux + vmy * uy
        fric = -mu * normal_force * math.tanh(v_t / V_EPS)
        fxi = normal_force * nrm_x + fric * ux
        fyi = normal_force * nrm_y + fric * uy
        fx += fxi
        fy += fyi
        tz += rx * fyi - ry * fxi
        if collect is not None:
            collect.append(ContactInfo("lip-side", (lx, lip_y), (nrm_x, nrm_y),
                                       pen, normal_force, fric))

    return fx, fy, tz, energy


def contact_wrench(pose, vel, geom):
    """Contact wrench (fx, fy, tz) on the peg, expressed at the tip frame."""
    fx, fy, tz, _ = _contact_terms(pose, vel, geom)
    return np.array([fx, fy, tz])


def contact_details(pose, vel, geom):
    """Contact wrench plus per-contact records and stored spring energy."""
    contacts = []
    fx, fy, tz, energy = _contact_terms(pose, vel, geom, collect=contacts)
    return np.array([fx, fy, tz]), contacts, energy


@dataclass(frozen=True)
class CommandPulse:
    """Scripted smooth command transient: amp * sin^2(pi*(t-t0)/T) inside the window."""

    amplitude: tuple
    t_start: float
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "amplitude", tuple(float(a) for a in self.amplitude))
        if self.duration <= 0:
            raise ValueError("pulse duration must be positive")

    def value(self, t):
        tau = t - self.t_start
        if tau < 0.0 or tau > self.duration:
            return None
        w = math.sin(math.pi * tau / self.duration)
        return w * w


@dataclass(frozen=True)
class SimConfig:
    """Closed-loop run settings.

    control_dt        controller period (s)
    physics_substeps  plant substeps per control tick
    duration          run length (s)
    feedforward       constant commanded wrench (task dim), e.g. (0, -20, 0)
    initial_pose      initial task pose of the tip, (x, y) or (x, y, phi)
    sensor_noise_std  additive white noise on the measured wrench (N / N*m)
    command_pulse     optional scripted command transient
    command_limit     per-axis actuator saturation |f_cp[i]| <= limit[i],
                      empty tuple for an ideal (unclamped) drive
    plant_disturbance optional constant wrench injected at the plant input
                      (invisible to the controller; for observer tests)
    """

    control_dt: float = 1e-3
    physics_substeps: int = 10
    duration: float = 4.0
    feedforward: tuple = (0.0, 0.0, 0.0)
    initial_pose: tuple = (0.0, 0.0, -0.5 * math.pi)
    sensor_noise_std: float = 0.0
    command_pulse: CommandPulse = None
    command_limit: tuple = ()
    plant_disturbance: tuple = None

    def __post_init__(self):
        if self.control_dt <= 0 or self.duration <= 0:
            raise ValueError("control_dt and duration must be positive")
        if int(self.physics_substeps) < 1:
            raise ValueError("physics_substeps must be at least 1")
        object.__setattr__(self, "physics_substeps", int(self.physics_substeps))
        object.__setattr__(self, "feedforward",
                           tuple(float(v) for v in self.feedforward))
        object.__setattr__(self, "initial_pose",
                           tuple(float(v) for v in self.initial_pose))
        if self.sensor_noise_std < 0:
            raise ValueError("sensor noise std must be non-negative")
        limit = tuple(float(v) for v in (self.command_limit or ()))
        if any(v <= 0 for v in limit):
            raise ValueError("command limits must be positive")
        object.__setattr__(self, "command_limit", limit)
        if self.plant_disturbance is not None:
            object.__setattr__(self, "plant_disturbance",
                               tuple(float(v) for v in self.plant_disturbance))

    @property
    def physics_dt(self):
        return self.control_dt / self.physics_substeps


class Trace:
    """Per-tick closed-loop records with CSV export.

    f_ext is the measured external wrench, f_c the total commanded wrench
    (PD + feedforward + transient), d_hat the observer estimate; the
    applied wrench is f_c - d_hat.  depth is the insertion depth of the
    tip below the slot mouth (negative above it).
    """

    def __init__(self, ticks, n_joints, task_dim):
        self.t = np.zeros(ticks)
        self.q = np.zeros((ticks, n_joints))
        self.qdot = np.zeros((ticks, n_joints))
        self.pose = np.zeros((ticks, task_dim))
        self.f_ext = np.zeros((ticks, task_dim))
        self.f_c = np.zeros((ticks, task_dim))
        self.f_cp = np.zeros((ticks, task_dim))
        self.d_hat = np.zeros((ticks, task_dim))
        self.depth = np.zeros(ticks)
        self.e_port = np.zeros(ticks)
        self.rho = np.zeros(ticks)
        self.stopped = np.zeros(ticks, dtype=np.int8)
        self.stop_reason = "none"
        self.n = 0

    def _truncate(self):
        k = self.n
        for name in ("t", "q", "qdot", "pose", "f_ext", "f_c", "f_cp",
                     "d_hat", "depth", "e_port", "rho", "stopped"):
            setattr(self, name, getattr(self, name)[:k])

    @property
    def was_stopped(self):
        return bool(self.n and self.stopped[self.n - 1])

    def column_header(self):
        nq = self.q.shape[1]
        cols = ["t_s"] + [f"q{i+1}_rad" for i in range(nq)] + ["depth_m", "fx_N", "fy_N"]
        if self.pose.shape[1] == 3:
            cols += ["t_theta_Nm", "fcx_N", "fcy_N", "fc_t_Nm",
                     "dhat_x_N", "dhat_y_N", "dhat_t_Nm"]
        else:
            cols += ["fcx_N", "fcy_N", "dhat_x_N", "dhat_y_N"]
        cols += ["e_port_J", "rho_J", "stopped"]
        return cols

    def to_csv(self, path):
        """Write the trace with units in the header and 9 significant digits."""
        cols = self.column_header()
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(self.n):
                row = [self.t[i], *self.q[i], self.depth[i], *self.f_ext[i],
                       *self.f_c[i], *self.d_hat[i], self.e_port[i], self.rho[i]]
                fh.write(",".join(f"{v:.9g}" for v in row))
                fh.write(f",{int(self.stopped[i])}\n")


class World:
    """Closed-loop plant + controller + monitor simulation."""

    def __init__(self, model, controller, sim, geom=None, limits=None,
                 mismatch=None, inertia_damping=1e-3, seed=0, q0=None,
                 track_contact_energy=False):
        self.model = model
        self.controller = controller
        self.sim = sim
        self.geom = geom
        self.limits = limits if limits is not None else SafetyLimits()
        self.inertia_model = InertiaModel(model, mismatch, inertia_damping)
        self.rng = np.random.default_rng(seed)
        self.ledger = EnergyLedger()

        m = model.task_dim
        if len(sim.feedforward) != m:
            raise ValueError("feedforward dimension does not match the task")
        self._ff = np.asarray(sim.feedforward, dtype=float)
        self._dist = (np.asarray(sim.plant_disturbance, dtype=float)
                      if sim.plant_disturbance is not None else None)
        if self._dist is not None and self._dist.shape != (m,):
            raise ValueError("plant disturbance dimension does not match the task")

        if q0 is not None:
            self.q = np.asarray(q0, dtype=float).copy()
        else:
            pose = sim.initial_pose
            if model.n_joints == 3:
                if len(pose) != 3:
                    raise ValueError("3-link initial pose needs (x, y, phi)")
                self.q = rb.inverse_kinematics_3link(model, pose)
            else:
                self.q = rb.inverse_kinematics_2link(model, pose[:2])
        self.qdot = np.zeros(model.n_joints)
        self.t = 0.0
        self.tick_index = 0

        self.ticks_total = int(round(sim.duration / sim.control_dt))
        self.trace = Trace(self.ticks_total, model.n_joints, m)

        self.track_contact_energy = track_contact_energy
        self.contact_work = 0.0
        self.spring_energy = 0.0
        if track_contact_energy:
            nsub = self.ticks_total * sim.physics_substeps
            self.work_series = np.zeros(nsub)
            self.spring_series = np.zeros(nsub)
            self._sub_index = 0

    def _measure_contact(self, pose3, vel3):
        if self.geom is None:
            return np.zeros(3)
        return contact_wrench(pose3, vel3, self.geom)

    def _pose3(self, pose):
        # 2-link worlds carry a rigidly oriented peg (phi = -pi/2)
        if pose.shape[0] == 3:
            return pose
        return np.array([pose[0], pose[1], -0.5 * math.pi])

    def _vel3(self, xdot):
        if xdot.shape[0] == 3:
            return xdot
        return np.array([xdot[0], xdot[1], 0.0])

    def command_bias(self, t):
        bias = self._ff
        pulse = self.sim.command_pulse
        if pulse is not None:
            w = pulse.value(t)
            if w is not None:
                bias = bias + w * np.asarray(pulse.amplitude, dtype=float)
        return bias

    def step(self):
        """Run one control tick; raises SafetyStop when a limit latches."""
        model = self.model
        sim = self.sim
        m = model.task_dim
        k = self.tick_index
        if k >= self.ticks_total:
            raise RuntimeError("run is already complete")
        if self.ledger.stopped:
            raise SafetyStop(self.ledger.stop_reason)

        q = self.q
        qdot = self.qdot
        pose = rb.forward_kinematics(model, q)
        J = rb.jacobian(model, q)
        xdot = J @ qdot
        pose3 = self._pose3(pose)
        vel3 = self._vel3(xdot)

        w3 = self._measure_contact(pose3, vel3)
        f_true = w3 if m == 3 else w3[:2]
        if sim.sensor_noise_std > 0.0:
            f_meas = f_true + self.rng.normal(0.0, sim.sensor_noise_std, m)
        else:
            f_meas = f_true

        lam_hat = self.inertia_model(q)
        rho = self.ledger.update(lam_hat, xdot, f_meas, sim.control_dt,
                                 d_hat=self.controller.d_hat)
        out = self.controller.tick(self.t, q, f_meas, self.command_bias(self.t),
                                   lam_hat)

        tr = self.trace
        tr.t[k] = self.t
        tr.q[k] = q
        tr.qdot[k] = qdot
        tr.pose[k] = pose
        tr.f_ext[k] = f_meas
        tr.f_c[k] = out.f_c
        tr.f_cp[k] = out.f_cp
        tr.d_hat[k] = out.d_hat
        tr.depth[k] = (self.geom.mouth_y - pose[1]) if self.geom is not None else 0.0
        tr.e_port[k] = self.ledger.e_port
        tr.rho[k] = rho
        tr.n = k + 1

        reason = safety_check(self.limits, f_meas)
        if reason is not None:
            self.ledger.mark_stopped(reason)
            tr.stopped[k] = 1
            tr.stop_reason = reason
            tr._truncate()
            self.tick_index = k + 1
            raise SafetyStop(reason)

        applied = out.f_cp if self._dist is None else out.f_cp + self._dist
        dt_p = sim.physics_dt
        for _ in range(sim.physics_substeps):
            pose_s = rb.forward_kinematics(model, q)
            J_s = rb.jacobian(model, q)
            xdot_s = J_s @ qdot
            if self.geom is not None:
                w3 = contact_wrench(self._pose3(pose_s), self._vel3(xdot_s),
                                    self.geom)
                f_c_sub = w3 if m == 3 else w3[:2]
            else:
                w3 = None
                f_c_sub = None
            qdd = rb.forward_dynamics(model, q, qdot, applied, f_c_sub)
            qdot = qdot + dt_p * qdd
            if model.has_dry_friction:
                # joints held below breakaway stop dead instead of creeping
                qdot = rb.stiction_arrest(model, q, qdot, applied, f_c_sub)
            q = q + dt_p * qdot
            if self.track_contact_energy:
                if w3 is not None:
                    vel_full = self._vel3(xdot_s)
                    self.contact_work += dt_p * float(
                        w3[0] * vel_full[0] + w3[1] * vel_full[1] + w3[2] * vel_full[2])
                    _, _, _, u_spring = _contact_terms(
                        self._pose3(pose_s), self._vel3(xdot_s), self.geom)
                    self.spring_energy = u_spring
                self.work_series[self._sub_index] = self.contact_work
                self.spring_series[self._sub_index] = self.spring_energy
                self._sub_index += 1

        self.q = q
        self.qdot = qdot
        self.tick_index = k + 1
        self.t = self.tick_index * sim.control_dt
        return out

    def run(self):
        """Run to completion (or safety stop) and return the trace."""
        while self.tick_index < self.ticks_total:
            try:
                self.step()
            except SafetyStop:
                break
        if self.track_contact_energy and self._sub_index:
            self.work_series = self.work_series[: self._sub_index]
            self.spring_series = self.spring_series[: self._sub_index]
        self.trace._truncate()
        return self.trace
