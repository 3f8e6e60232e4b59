"""Pose and twist tracking errors between a body and a moving target.

The pose error is the right relative transform qhat . conj(qhat_d): it is
the identity exactly when the body sits on the target. The twist error
subtracts the target rate carried into the error frame by the adjoint, so
a body that matches the target pose and velocity has zero error twist even
while both are moving.

All rates of the desired state are derivatives in the path parameter; the
parameter rate theta_dot converts them to time derivatives at the call
sites below.
"""

import numpy as np

from . import _quatmath as tm
from ._accel import njit
from .dq_algebra import (
    adjoint_twist,
    dq_conj,
    dq_mul,
    dv_embed,
    dv_extract,
    q_conj,
    q_mul,
    q_rotate,
)
from .rigid_body import drift_term, to_dual_state


@njit
def pose_error(qhat, qhat_d):
    """Relative pose qhat . conj(qhat_d) as a unit dual quaternion."""
    return dq_mul(qhat, dq_conj(qhat_d))


@njit
def twist_error_adjoint(what, theta_dot, qhat_e, what_d):
    """Error twist: body twist minus the target twist seen through Ad."""
    return what - theta_dot * adjoint_twist(qhat_e, what_d)


def rotation_error(q, q_d):
    return q_mul(q, q_conj(q_d))


def angular_error(w, theta_dot, q_e, w_d):
    return w - theta_dot * q_rotate(q_e, w_d)


def position_error(p, q_e, p_d):
    return p - q_rotate(q_e, p_d)


def position_error_rate(pdot, w_e, q_e, p_d, theta_dot, p1_d):
    # follows from differentiating position_error with dq_e/dt = 1/2 [0,w_e] q_e
    return pdot - np.cross(w_e, q_rotate(q_e, p_d)) - theta_dot * q_rotate(q_e, p1_d)


def twist_error_structural(w_e, p_e, pdot_e):
    """Assemble the error twist from its rotation/translation error parts.

    Same quantity as twist_error_adjoint, built the other way around: from
    the error kinematics rather than the adjoint of the target twist.
    Useful as a cross check and for reading off the physical content of
    the dual part.
    """
    out = np.empty(6)
    out[:3] = w_e
    out[3:] = pdot_e + np.cross(p_e, w_e)
    return out


def error_accel(x, theta_dot, theta_ddot, u_hat, desired, params):
    """Time derivative of the error twist for a given control twist.

    Evaluates the exact sandwich products; the conjugate on the target
    twist (a pure dual vector) is a sign flip, and the trailing factor of
    the first and last bracket terms conjugates the error pose rate.
    """
    x = np.asarray(x, dtype=float)
    u_hat = np.asarray(u_hat, dtype=float)
    qhat, what = to_dual_state(x)
    qhat_e = pose_error(qhat, desired.qhat_d)
    what_e = twist_error_adjoint(what, theta_dot, qhat_e, desired.what_d)

    wd_star = -dv_embed(desired.what_d)
    wdo_star = -dv_embed(desired.what_d_dot)
    qe_conj = dq_conj(qhat_e)
    qe_dot = 0.5 * dq_mul(dv_embed(what_e), qhat_e)

    carried = dq_mul(dq_mul(qhat_e, wd_star), qe_conj)
    bracket = (
        dq_mul(dq_mul(qe_dot, wd_star), qe_conj)
        + theta_dot * dq_mul(dq_mul(qhat_e, wdo_star), qe_conj)
        + dq_mul(dq_mul(qhat_e, wd_star), dq_conj(qe_dot))
    )
    out = drift_term(x, params) + u_hat
    out += theta_ddot * dv_extract(carried) + theta_dot * dv_extract(bracket)
    return out


# tuple kernels shared with the fused simulation loop


@njit
def pose_error_t(qhat, qhat_d):
    return tm.dqmul(qhat, tm.dqconj(qhat_d))


@njit
def twist_error_t(what, theta_dot, qhat_e, what_d):
    return tm.sub6(what, tm.scale6(theta_dot, tm.adj6(qhat_e, what_d)))
