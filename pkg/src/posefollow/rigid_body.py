"""Rigid-body dynamics: vector form, the dual-twist drift/control split,
and a dual-form integrator used as a cross-verification path.

State vectors are length 13: position, linear velocity, unit attitude
quaternion, body angular velocity, exposed via the P/V/Q/W slices.  The
production loop in `sim` integrates this vector form; `step_dual`
integrates the coupled dual-quaternion/dual-twist equations directly and
exists so the two models can be compared in tests.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _quatmath as tm
from ._accel import njit
from .dq_algebra import dq_from_pose
from .errors import ConfigInvalid, NonFiniteState, NonUnitRotation
from .tolerances import UNIT_ROTATION_TOL

STATE_SIZE = 13
P = slice(0, 3)
V = slice(3, 6)
Q = slice(6, 10)
W = slice(10, 13)


@dataclass(frozen=True)
class Wrench:
    """Force and torque command, body-consistent with the dynamics below."""

    f: np.ndarray
    tau: np.ndarray


@dataclass(frozen=True)
class BodyParams:
    mass: float
    inertia: np.ndarray
    inertia_inv: np.ndarray = field(init=False)

    def __post_init__(self):
        J = np.asarray(self.inertia, dtype=float)
        if not np.isfinite(self.mass) or self.mass <= 0.0:
            raise ConfigInvalid("mass must be positive")
        if J.shape != (3, 3) or not np.isfinite(J).all():
            raise ConfigInvalid("inertia must be a finite 3x3 matrix")
        scale = max(float(np.max(np.abs(J))), 1e-30)
        if np.max(np.abs(J - J.T)) > 1e-9 * scale:
            raise ConfigInvalid("inertia must be symmetric")
        if np.min(np.linalg.eigvalsh(J)) <= 0.0:
            raise ConfigInvalid("inertia must be positive definite")
        object.__setattr__(self, "inertia", J)
        object.__setattr__(self, "inertia_inv", np.linalg.inv(J))


def make_state(p, v, q, w) -> np.ndarray:
    """Pack (p, v, q, w) into a 13-vector."""
    x = np.empty(STATE_SIZE)
    x[P] = p
    x[V] = v
    x[Q] = q
    x[W] = w
    return x


@njit
def deriv_tuples(p, v, q, w, f, tau, m, J, Jinv):
    """State derivative as tuples; shared by the array API and the fused
    closed-loop core."""
    dv = (f[0] / m, f[1] / m, f[2] / m)
    dq = tm.qderiv(w, q)
    Jw = tm.matvec3(J, w)
    dw = tm.matvec3(Jinv, tm.sub3(tau, tm.cross(w, Jw)))
    return v, dv, dq, dw


@njit
def _deriv(x, f, tau, m, J, Jinv):
    p = (x[0], x[1], x[2])
    v = (x[3], x[4], x[5])
    q = (x[6], x[7], x[8], x[9])
    w = (x[10], x[11], x[12])
    ft = (f[0], f[1], f[2])
    tt = (tau[0], tau[1], tau[2])
    dp, dv, dq, dw = deriv_tuples(p, v, q, w, ft, tt, m, J, Jinv)
    out = np.empty(STATE_SIZE)
    out[0], out[1], out[2] = dp
    out[3], out[4], out[5] = dv
    out[6], out[7], out[8], out[9] = dq
    out[10], out[11], out[12] = dw
    return out


@njit
def _rk4_step(x, f, tau, m, J, Jinv, dt):
    k1 = _deriv(x, f, tau, m, J, Jinv)
    k2 = _deriv(x + 0.5 * dt * k1, f, tau, m, J, Jinv)
    k3 = _deriv(x + 0.5 * dt * k2, f, tau, m, J, Jinv)
    k4 = _deriv(x + dt * k3, f, tau, m, J, Jinv)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    n = np.sqrt(out[6] * out[6] + out[7] * out[7] + out[8] * out[8] + out[9] * out[9])
    for i in range(6, 10):
        out[i] /= n
    return out


def dynamics_deriv(x, u: Wrench, params: BodyParams) -> np.ndarray:
    """Right-hand side of the equations of motion at state x under wrench u."""
    return _deriv(
        np.asarray(x, dtype=float),
        np.asarray(u.f, dtype=float),
        np.asarray(u.tau, dtype=float),
        params.mass,
        params.inertia,
        params.inertia_inv,
    )


def integrate_step(x, u: Wrench, params: BodyParams, dt: float) -> np.ndarray:
    """One fixed-step RK4 step under a constant wrench; attitude is
    renormalized afterwards."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    out = _rk4_step(
        np.asarray(x, dtype=float),
        np.asarray(u.f, dtype=float),
        np.asarray(u.tau, dtype=float),
        params.mass,
        params.inertia,
        params.inertia_inv,
        dt,
    )
    if not np.isfinite(out).all():
        raise NonFiniteState("state became non-finite during integration")
    return out


def to_dual_state(x):
    """Dual quaternion pose and dual twist (w, pdot + p x w) of a state."""
    x = np.asarray(x, dtype=float)
    qhat = dq_from_pose(x[P], x[Q])
    what = np.empty(6)
    what[:3] = x[W]
    what[3:] = x[V] + np.cross(x[P], x[W])
    return qhat, what


@njit
def drift_tuples(p, v, w, J, Jinv):
    """State-dependent part of the dual twist rate.  The angular block is
    the gyroscopic acceleration -Jinv (w x J w); the dual block couples it
    with the translational motion."""
    Jw = tm.matvec3(J, w)
    a = tm.scale3(-1.0, tm.matvec3(Jinv, tm.cross(w, Jw)))
    d = tm.add3(tm.cross(p, a), tm.cross(v, w))
    return (a[0], a[1], a[2], d[0], d[1], d[2])


@njit
def control_tuples(p, f, tau, m, Jinv):
    """Input-dependent part of the dual twist rate for a wrench (f, tau)."""
    r = tm.matvec3(Jinv, tau)
    c = tm.cross(p, r)
    return (r[0], r[1], r[2], f[0] / m + c[0], f[1] / m + c[1], f[2] / m + c[2])


def drift_term(x, params: BodyParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array(
        drift_tuples(
            (x[0], x[1], x[2]),
            (x[3], x[4], x[5]),
            (x[10], x[11], x[12]),
            params.inertia,
            params.inertia_inv,
        )
    )


def control_twist(u: Wrench, x, params: BodyParams) -> np.ndarray:
    """Dual twist acceleration produced by a wrench at the current state."""
    x = np.asarray(x, dtype=float)
    return np.array(
        control_tuples(
            (x[0], x[1], x[2]),
            (float(u.f[0]), float(u.f[1]), float(u.f[2])),
            (float(u.tau[0]), float(u.tau[1]), float(u.tau[2])),
            params.mass,
            params.inertia_inv,
        )
    )


def wrench_from_control(u_hat, x, params: BodyParams) -> Wrench:
    """Invert the control map: tau = J u_real, f = m (u_dual - p x u_real)."""
    u_hat = np.asarray(u_hat, dtype=float)
    x = np.asarray(x, dtype=float)
    tau = params.inertia @ u_hat[:3]
    f = params.mass * (u_hat[3:] - np.cross(x[P], u_hat[:3]))
    return Wrench(f=f, tau=tau)


# --- dual-form integration (verification path) -----------------------------


@njit
def _dual_rhs(y, f, tau, m, J, Jinv):
    qh = ((y[0], y[1], y[2], y[3]), (y[4], y[5], y[6], y[7]))
    wh = (y[8], y[9], y[10], y[11], y[12], y[13])
    p = tm.translation_of(qh)
    w = (wh[0], wh[1], wh[2])
    v = tm.sub3((wh[3], wh[4], wh[5]), tm.cross(p, w))
    dqh = tm.dqmul(tm.dv_to_dq(wh), qh)
    ft = (f[0], f[1], f[2])
    tt = (tau[0], tau[1], tau[2])
    dwh = tm.add6(drift_tuples(p, v, w, J, Jinv), control_tuples(p, ft, tt, m, Jinv))
    out = np.empty(14)
    out[0], out[1], out[2], out[3] = tm.qscale(0.5, dqh[0])
    out[4], out[5], out[6], out[7] = tm.qscale(0.5, dqh[1])
    for i in range(6):
        out[8 + i] = dwh[i]
    return out


@njit
def _dual_rk4(y, f, tau, m, J, Jinv, dt):
    k1 = _dual_rhs(y, f, tau, m, J, Jinv)
    k2 = _dual_rhs(y + 0.5 * dt * k1, f, tau, m, J, Jinv)
    k3 = _dual_rhs(y + 0.5 * dt * k2, f, tau, m, J, Jinv)
    k4 = _dual_rhs(y + dt * k3, f, tau, m, J, Jinv)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # project back onto the unit constraints
    n = np.sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2] + out[3] * out[3])
    for i in range(4):
        out[i] /= n
    dot = out[0] * out[4] + out[1] * out[5] + out[2] * out[6] + out[3] * out[7]
    for i in range(4):
        out[4 + i] = out[4 + i] / n - (dot / n) * out[i]
    return out


def step_dual(qhat, what, u: Wrench, params: BodyParams, dt: float):
    """RK4 step of the dual-form model (pose and twist as one system)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    y = np.concatenate([np.asarray(qhat, dtype=float), np.asarray(what, dtype=float)])
    out = _dual_rk4(
        y,
        np.asarray(u.f, dtype=float),
        np.asarray(u.tau, dtype=float),
        params.mass,
        params.inertia,
        params.inertia_inv,
        dt,
    )
    if not np.isfinite(out).all():
        raise NonFiniteState("dual state became non-finite during integration")
    return out[:8], out[8:]
