"""Analytic dynamics of planar serial arms with point-mass links.

Two desk-scale stand-in arms are supported: a 2-link arm whose task space
is the tip position (x, y), and a 3-link arm whose task space adds the
absolute tool orientation phi = q1 + q2 + q3.  Lumping each link's mass at
its tip keeps every quantity in closed form (mass matrix, bias forces,
Jacobians and their time derivatives), so the simulator can be pinned
against exact oracles.

Conventions: world x lateral, y up, angles counter-clockwise from +x.
Wrenches are plain 1-D float arrays ordered (fx, fy) or (fx, fy, tz) and
are expressed at the tip task frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SINGULARITY_CONDITION_LIMIT = 1e12
JACOBIAN_FD_STEP = 1e-6


class SingularTaskInertia(RuntimeError):
    """Undamped task inertia requested at (or numerically near) a singularity."""


def as_wrench(values, dim=None):
    """Validate and return a wrench as a float ndarray (forces first, moment last)."""
    w = np.atleast_1d(np.asarray(values, dtype=float))
    if w.ndim != 1:
        raise ValueError("wrench must be a flat vector")
    if dim is not None and w.shape[0] != dim:
        raise ValueError(f"wrench has dimension {w.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(w)):
        raise ValueError("wrench entries must be finite")
    return w


@dataclass(frozen=True)
class ManipulatorModel:
    """Planar serial arm, one point mass at each link tip.

    link_lengths  m, one per link (2 or 3 links)
    link_masses   kg, same length
    gravity       m/s^2 acting along -y (0 allowed: gravity-compensated rig)
    joint_damping N*m*s/rad viscous drag per joint, defaults to zero
    rayleigh_beta 1/s mass-proportional drag, tau = -beta*M(q)*qd
    joint_coulomb N*m dry friction level per joint, defaults to zero
    stiction_band rad/s velocity half-width of the stick regime

    Mass-proportional drag models reflected actuator/transmission losses.
    It maps through any nonsingular Jacobian to a task-space force of
    exactly -beta*Lambda(q)*xd, so it decays every task axis uniformly
    without cross-axis coupling.

    Dry friction follows a Karnopp-style law: joints moving faster than
    stiction_band see the constant kinetic level, slower ones a torque
    ramp; pair with stiction_arrest in a semi-implicit stepper so joints
    held below breakaway come exactly to rest instead of creeping.
    """

    link_lengths: tuple
    link_masses: tuple
    gravity: float = 0.0
    joint_damping: tuple = ()
    rayleigh_beta: float = 0.0
    joint_coulomb: tuple = ()
    stiction_band: float = 2e-3

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.link_lengths)
        masses = tuple(float(v) for v in self.link_masses)
        damping = tuple(float(v) for v in self.joint_damping)
        coulomb = tuple(float(v) for v in self.joint_coulomb)
        if not damping:
            damping = (0.0,) * len(lengths)
        if not coulomb:
            coulomb = (0.0,) * len(lengths)
        object.__setattr__(self, "link_lengths", lengths)
        object.__setattr__(self, "link_masses", masses)
        object.__setattr__(self, "joint_damping", damping)
        object.__setattr__(self, "joint_coulomb", coulomb)
        n = len(lengths)
        if n not in (2, 3):
            raise ValueError("only 2- and 3-link planar arms are supported")
        if len(masses) != n or len(damping) != n:
            raise ValueError("link_masses and joint_damping must match link count")
        if len(coulomb) != n:
            raise ValueError("joint_coulomb must match link count")
        if any(l <= 0 for l in lengths) or any(m <= 0 for m in masses):
            raise ValueError("link lengths and masses must be positive")
        if any(d < 0 for d in damping) or any(c < 0 for c in coulomb):
            raise ValueError("joint damping and coulomb levels must be non-negative")
        if self.gravity < 0:
            raise ValueError("gravity magnitude must be non-negative")
        object.__setattr__(self, "rayleigh_beta", float(self.rayleigh_beta))
        object.__setattr__(self, "stiction_band", float(self.stiction_band))
        if self.rayleigh_beta < 0:
            raise ValueError("rayleigh_beta must be non-negative")
        if self.stiction_band <= 0:
            raise ValueError("stiction_band must be positive")

    @property
    def has_dry_friction(self):
        return any(c > 0.0 for c in self.joint_coulomb)

    @property
    def n_joints(self):
        return len(self.link_lengths)

    @property
    def task_dim(self):
        # 2-link: (x, y); 3-link: (x, y, phi)
        return 2 if self.n_joints == 2 else 3

    @property
    def reach(self):
        return sum(self.link_lengths)


@dataclass
class JointState:
    """Joint-space state snapshot (arrays are not copied)."""

    q: np.ndarray
    qdot: np.ndarray

    def copy(self):
        return JointState(self.q.copy(), self.qdot.copy())


@dataclass
class TaskState:
    """Task-space state snapshot: pose, velocity and (estimated) acceleration."""

    x: np.ndarray
    xdot: np.ndarray
    xddot: np.ndarray = field(default=None)


def _chain_terms(model, q):
    """Cumulative angles and per-link vector components (l_i*cos, l_i*sin)."""
    n = model.n_joints
    cs = [0.0] * n
    sn = [0.0] * n
    s = 0.0
    for i in range(n):
        s += q[i]
        cs[i] = math.cos(s)
        sn[i] = math.sin(s)
    l = model.link_lengths
    ax = [l[i] * cs[i] for i in range(n)]
    ay = [l[i] * sn[i] for i in range(n)]
    return ax, ay, s


def forward_kinematics(model, q):
    """Tip task pose: (x, y) for 2 links, (x, y, phi) for 3."""
    ax, ay, s = _chain_terms(model, q)
    x = math.fsum(ax)
    y = math.fsum(ay)
    if model.task_dim == 2:
        return np.array([x, y])
    return np.array([x, y, s])


def _dynamics_terms(model, q, qdot):
    """Mass matrix, bias force C*qd + g, and tip Jacobian in one pass.

    All follow from the point-mass kinetic energy T = 1/2 sum m_k |v_k|^2
    with v_k the tip velocity of link k; see the partial-sum identities in
    the tests for the independent derivation.
    """
    n = model.n_joints
    masses = model.link_masses
    l = model.link_lengths
    g = model.gravity

    cs = [0.0] * n
    sn = [0.0] * n
    sd = [0.0] * n
    s = 0.0
    v = 0.0
    for i in range(n):
        s += q[i]
        v += qdot[i]
        cs[i] = math.cos(s)
        sn[i] = math.sin(s)
        sd[i] = v

    ax = [l[i] * cs[i] for i in range(n)]
    ay = [l[i] * sn[i] for i in range(n)]
    # mass-k tip acceleration due to Jdot*qd has prefix-sum form
    bx = [ax[i] * sd[i] * sd[i] for i in range(n)]
    by = [ay[i] * sd[i] * sd[i] for i in range(n)]
    Bx = [0.0] * n
    By = [0.0] * n
    px = 0.0
    py = 0.0
    for i in range(n):
        px += bx[i]
        py += by[i]
        Bx[i] = px
        By[i] = py

    # S_x[a][k] = sum_{i=a..k} ax_i (and same for y): segment sums
    Sx = [[0.0] * n for _ in range(n)]
    Sy = [[0.0] * n for _ in range(n)]
    for a in range(n):
        tx = 0.0
        ty = 0.0
        for k in range(a, n):
            tx += ax[k]
            ty += ay[k]
            Sx[a][k] = tx
            Sy[a][k] = ty

    M = np.empty((n, n))
    bias = np.empty(n)
    for a in range(n):
        ba = 0.0
        for k in range(a, n):
            mk = masses[k]
            # Coriolis/centrifugal: J_k^T (Jdot_k qd), gravity: m g dy_k/dq_a
            ba += mk * (Sy[a][k] * Bx[k] - Sx[a][k] * By[k] + g * Sx[a][k])
        bias[a] = ba
        for b in range(a, n):
            acc = 0.0
            for k in range(b, n):
                mk = masses[k]
                acc += mk * (Sy[a][k] * Sy[b][k] + Sx[a][k] * Sx[b][k])
            M[a, b] = acc
            M[b, a] = acc

    m_task = model.task_dim
    J = np.empty((m_task, n))
    last = n - 1
    for a in range(n):
        J[0, a] = -Sy[a][last]
        J[1, a] = Sx[a][last]
    if m_task == 3:
        J[2, :] = 1.0
    return M, bias, J


def mass_matrix(model, q):
    """Joint-space mass matrix M(q), symmetric positive definite."""
    M, _, _ = _dynamics_terms(model, q, np.zeros(model.n_joints))
    return M


def joint_bias(model, q, qdot):
    """Joint-space bias force C(q, qd)*qd + g(q) (no viscous damping)."""
    _, bias, _ = _dynamics_terms(model, q, qdot)
    return bias


def jacobian(model, q):
    """Task Jacobian mapping qd to task velocity (tip linear, plus phi rate)."""
    _, _, J = _dynamics_terms(model, q, np.zeros(model.n_joints))
    return J


def _jacobian_dot_analytic(model, q, qdot):
    n = model.n_joints
    l = model.link_lengths
    cs = [0.0] * n
    sn = [0.0] * n
    sd = [0.0] * n
    s = 0.0
    v = 0.0
    for i in range(n):
        s += q[i]
        v += qdot[i]
        cs[i] = math.cos(s)
        sn[i] = math.sin(s)
        sd[i] = v
    m_task = model.task_dim
    Jd = np.zeros((m_task, n))
    for a in range(n):
        tx = 0.0
        ty = 0.0
        for i in range(a, n):
            tx += l[i] * cs[i] * sd[i]
            ty += l[i] * sn[i] * sd[i]
        Jd[0, a] = -tx
        Jd[1, a] = -ty
    # orientation row of J is constant, so its derivative stays zero
    return Jd


def jacobian_dot(model, q, qdot):
    """Time derivative of the task Jacobian.

    2-link arm: closed form.  3-link arm: central finite difference of J
    over q (step 1e-6) contracted with qdot, which keeps the error bounded
    and testable against the closed form.
    """
    if model.n_joints == 2:
        return _jacobian_dot_analytic(model, q, qdot)
    n = model.n_joints
    q = np.asarray(q, dtype=float)
    Jd = np.zeros((model.task_dim, n))
    h = JACOBIAN_FD_STEP
    for j in range(n):
        dq = np.zeros(n)
        dq[j] = h
        dJ = (jacobian(model, q + dq) - jacobian(model, q - dq)) / (2.0 * h)
        Jd += dJ * qdot[j]
    return Jd


def _task_inertia_core(J, M, damping):
    """Lambda = (J M^-1 J^T + damping^2 I)^-1, symmetrized."""
    X = np.linalg.solve(M, J.T)
    A = J @ X
    if damping == 0.0:
        if np.linalg.cond(A) > SINGULARITY_CONDITION_LIMIT:
            raise SingularTaskInertia(
                "task inertia is singular; use a nonzero damping factor")
    else:
        A = A + (damping * damping) * np.eye(A.shape[0])
    lam = np.linalg.inv(A)
    return 0.5 * (lam + lam.T)


def task_inertia(model, q, damping=1e-3):
    """Task-space inertia Lambda(q).

    damping is the singularity-robustness factor lambda in
    (J M^-1 J^T + lambda^2 I)^-1; pass 0 for the exact operational-space
    inertia, which raises SingularTaskInertia near singular configurations.
    """
    if damping < 0:
        raise ValueError("damping must be non-negative")
    M, _, J = _dynamics_terms(model, q, np.zeros(model.n_joints))
    return _task_inertia_core(J, M, damping)


def bias_wrench(model, q, qdot, damping=1e-3):
    """Non-inertial task-space bias mu(q, qd) = Lambda*(J M^-1 (C qd + g) - Jd qd)."""
    M, bias, J = _dynamics_terms(model, q, qdot)
    lam = _task_inertia_core(J, M, damping)
    y = np.linalg.solve(M, bias)
    return lam @ (J @ y - jacobian_dot(model, q, qdot) @ np.asarray(qdot, dtype=float))


def _tip_wrench_sum(tau_task, f_ext):
    total = None
    if tau_task is not None:
        total = np.asarray(tau_task, dtype=float).copy()
    if f_ext is not None:
        fe = np.asarray(f_ext, dtype=float)
        total = fe.copy() if total is None else total + fe
    return total


def _drive_torque(model, q, qdot, tau_task=None, f_ext=None):
    """Net joint drive J^T(f) - C qd - g - D qd - beta*M qd, friction excluded."""
    M, bias, J = _dynamics_terms(model, q, qdot)
    rhs = -bias
    total = _tip_wrench_sum(tau_task, f_ext)
    if total is not None:
        rhs = rhs + J.T @ total
    damping = model.joint_damping
    for i in range(model.n_joints):
        rhs[i] -= damping[i] * qdot[i]
    if model.rayleigh_beta:
        rhs = rhs - model.rayleigh_beta * (M @ np.asarray(qdot, dtype=float))
    return M, rhs


def forward_dynamics(model, q, qdot, tau_task=None, f_ext=None):
    """Joint accelerations under a commanded task wrench and an external tip wrench.

    qdd = M^-1 (J^T (tau_task + f_ext) - C qd - g - D qd - beta*M qd - tau_fric);
    both wrenches act at the tip task frame and enter through the same
    Jacobian transpose.  tau_fric is the dry-friction torque: the kinetic
    level outside the stiction band, a linear ramp inside it.
    """
    M, rhs = _drive_torque(model, q, qdot, tau_task, f_ext)
    if model.has_dry_friction:
        coulomb = model.joint_coulomb
        band = model.stiction_band
        for i in range(model.n_joints):
            v = qdot[i]
            if abs(v) >= band:
                rhs[i] -= coulomb[i] if v > 0 else -coulomb[i]
            else:
                rhs[i] -= coulomb[i] * v / band
    return np.linalg.solve(M, rhs)


def stiction_arrest(model, q, qdot, tau_task=None, f_ext=None):
    """Project slow joints onto the stick state of the dry-friction law.

    A joint inside the stiction band whose net drive torque (evaluated
    with every slow joint at rest, friction excluded) is within the
    breakaway level is brought exactly to rest.  Run between the velocity
    and position updates of a semi-implicit step so stuck joints add no
    position creep; faster or over-driven joints pass through unchanged.
    """
    if not model.has_dry_friction:
        return qdot
    qdot = np.asarray(qdot, dtype=float)
    coulomb = model.joint_coulomb
    band = model.stiction_band
    cand = [i for i in range(model.n_joints)
            if coulomb[i] > 0.0 and abs(qdot[i]) < band]
    if not cand:
        return qdot
    rest = qdot.copy()
    rest[cand] = 0.0
    _, drive = _drive_torque(model, q, rest, tau_task, f_ext)
    out = qdot.copy()
    for i in cand:
        if abs(drive[i]) <= coulomb[i]:
            out[i] = 0.0
    return out


def task_velocity(model, q, qdot):
    """Task-space velocity J(q)*qdot."""
    return jacobian(model, q) @ np.asarray(qdot, dtype=float)


def kinetic_energy(model, q, qdot):
    qdot = np.asarray(qdot, dtype=float)
    return 0.5 * float(qdot @ mass_matrix(model, q) @ qdot)


def potential_energy(model, q):
    """Gravitational potential, zero level at the base joint height."""
    ax, ay, _ = _chain_terms(model, q)
    masses = model.link_masses
    y = 0.0
    total = 0.0
    for k in range(model.n_joints):
        y += ay[k]
        total += masses[k] * model.gravity * y
    return total


def total_energy(model, q, qdot):
    return kinetic_energy(model, q, qdot) + potential_energy(model, q)


def rk4_step(model, q, qdot, tau_task, f_ext, dt):
    """Classic RK4 step with the wrenches held constant over the step.

    Used for conservative-dynamics checks and oracles; the contact
    simulator uses its own semi-implicit stepping.
    """

    def f(y):
        qq = y[: model.n_joints]
        vv = y[model.n_joints:]
        return np.concatenate((vv, forward_dynamics(model, qq, vv, tau_task, f_ext)))

    y0 = np.concatenate((np.asarray(q, dtype=float), np.asarray(qdot, dtype=float)))
    k1 = f(y0)
    k2 = f(y0 + 0.5 * dt * k1)
    k3 = f(y0 + 0.5 * dt * k2)
    k4 = f(y0 + dt * k3)
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y1[: model.n_joints], y1[model.n_joints:]


def inverse_kinematics_2link(model, xy, elbow_up=False):
    """Closed-form IK for the 2-link arm tip position (x, y)."""
    if model.n_joints != 2:
        raise ValueError("inverse_kinematics_2link needs a 2-link model")
    x, y = float(xy[0]), float(xy[1])
    l1, l2 = model.link_lengths
    r2 = x * x + y * y
    c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if not -1.0 <= c2 <= 1.0:
        raise ValueError("tip position out of reach for the 2-link arm")
    s2 = math.sqrt(max(0.0, 1.0 - c2 * c2))
    if elbow_up:
        s2 = -s2
    q2 = math.atan2(s2, c2)
    q1 = math.atan2(y, x) - math.atan2(l2 * s2, l1 + l2 * c2)
    return np.array([q1, q2])


def inverse_kinematics_3link(model, pose, elbow_up=False):
    """Closed-form IK for the 3-link arm: pose = (x, y, phi) of the tip.

    Solves the wrist position with 2-link geometry after subtracting the
    final link along phi.  Raises ValueError when the pose is out of reach.
    """
    if model.n_joints != 3:
        raise ValueError("inverse_kinematics_3link needs a 3-link model")
    x, y, phi = (float(v) for v in pose)
    l1, l2, l3 = model.link_lengths
    wx = x - l3 * math.cos(phi)
    wy = y - l3 * math.sin(phi)
    r2 = wx * wx + wy * wy
    c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if not -1.0 <= c2 <= 1.0:
        raise ValueError("task pose out of reach for the 3-link arm")
    s2 = math.sqrt(max(0.0, 1.0 - c2 * c2))
    if elbow_up:
        s2 = -s2
    q2 = math.atan2(s2, c2)
    q1 = math.atan2(wy, wx) - math.atan2(l2 * s2, l1 + l2 * c2)
    q3 = phi - q1 - q2
    return np.array([q1, q2, q3])
