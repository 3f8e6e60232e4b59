"""Quaternion and dual quaternion algebra on numpy arrays.

Conventions, fixed package-wide and normative for every export:

* quaternions are length-4 arrays, scalar first: ``[w, x, y, z]``;
* dual quaternions are length-8 arrays, real part then dual part;
* dual vectors (twists, logs, gain stacks) are length-6 arrays, real
  3-vector then dual 3-vector;
* products are Hamilton products; rotations act as ``q [0,v] q*``.

A unit dual quaternion ``q + eps 0.5 p.q`` encodes the rigid displacement
(rotate by ``q``, translate by ``p``); composition is the dual product.
These wrappers delegate the arithmetic to the tuple kernels so the same
formulas serve both the public API and the fused simulation core.
"""

import math

import numpy as np

from . import _quatmath as tm
from ._accel import njit
from .errors import NonUnitDualQuaternion, NonUnitRotation
from .tolerances import UNIT_DQ_TOL, UNIT_ROTATION_TOL


def dq_identity() -> np.ndarray:
    """The identity displacement [1,0,0,0, 0,0,0,0]."""
    out = np.zeros(8)
    out[0] = 1.0
    return out


@njit
def q_mul(a, b):
    """Hamilton product of two quaternions."""
    out = np.empty(4)
    out[0], out[1], out[2], out[3] = tm.qmul(
        (a[0], a[1], a[2], a[3]), (b[0], b[1], b[2], b[3])
    )
    return out


@njit
def q_conj(a):
    out = np.empty(4)
    out[0], out[1], out[2], out[3] = a[0], -a[1], -a[2], -a[3]
    return out


@njit
def q_normalize(a):
    out = np.empty(4)
    out[0], out[1], out[2], out[3] = tm.qnormalize((a[0], a[1], a[2], a[3]))
    return out


@njit
def q_rotate(q, v):
    """Rotate a 3-vector by a unit quaternion."""
    out = np.empty(3)
    out[0], out[1], out[2] = tm.qrot((q[0], q[1], q[2], q[3]), (v[0], v[1], v[2]))
    return out


@njit
def _pair(a):
    return ((a[0], a[1], a[2], a[3]), (a[4], a[5], a[6], a[7]))


@njit
def _pack(pair):
    out = np.empty(8)
    out[0], out[1], out[2], out[3] = pair[0]
    out[4], out[5], out[6], out[7] = pair[1]
    return out


@njit
def dq_mul(a, b):
    """Dual quaternion product: (ar br, ar bd + ad br)."""
    return _pack(tm.dqmul(_pair(a), _pair(b)))


@njit
def dq_conj(a):
    """Quaternion conjugation of both parts; inverse for unit elements."""
    out = np.empty(8)
    out[0], out[4] = a[0], a[4]
    for i in (1, 2, 3, 5, 6, 7):
        out[i] = -a[i]
    return out


@njit
def dq_from_pose(p, q):
    """Encode position p and unit attitude q as a unit dual quaternion."""
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if abs(n - 1.0) > UNIT_ROTATION_TOL:
        raise NonUnitRotation("attitude quaternion must be unit length")
    return _pack(tm.dq_of_pose((p[0], p[1], p[2]), (q[0], q[1], q[2], q[3])))


@njit
def dq_to_pose(a):
    """Decode a unit dual quaternion into (position, attitude)."""
    n2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]
    ortho = a[0] * a[4] + a[1] * a[5] + a[2] * a[6] + a[3] * a[7]
    if abs(math.sqrt(n2) - 1.0) > UNIT_DQ_TOL or abs(2.0 * ortho) > UNIT_DQ_TOL:
        raise NonUnitDualQuaternion("dual quaternion violates the unit constraints")
    pair = _pair(a)
    p = np.empty(3)
    p[0], p[1], p[2] = tm.translation_of(pair)
    q = np.empty(4)
    q[0], q[1], q[2], q[3] = pair[0]
    return p, q


@njit
def dq_log(a):
    """Screw logarithm: half rotation vector stacked on half translation.

    Rotation magnitude is taken in [0, 2pi) via atan2; below SMALL_ANGLE a
    two-term series replaces the ill-conditioned ratio.
    """
    out = np.empty(6)
    v = tm.dqlog(_pair(a))
    for i in range(6):
        out[i] = v[i]
    return out


@njit
def dq_exp(v):
    """Screw exponential, inverse of dq_log on its domain (real-part norm
    below pi, meaning rotation magnitude below 2pi)."""
    return _pack(tm.dqexp((v[0], v[1], v[2], v[3], v[4], v[5])))


@njit
def dq_adjoint(g, v):
    """Group adjoint g . v . g* on a full dual quaternion."""
    gp = _pair(g)
    return _pack(tm.dqmul(tm.dqmul(gp, _pair(v)), tm.dqconj(gp)))


@njit
def adjoint_twist(g, w):
    """Adjoint action on a dual vector, scalar-free fast path."""
    out = np.empty(6)
    v = tm.adj6(_pair(g), (w[0], w[1], w[2], w[3], w[4], w[5]))
    for i in range(6):
        out[i] = v[i]
    return out


@njit
def gain_apply(k, v):
    """Diagonal gain action on a dual vector: real part scaled by k[:3],
    dual part by k[3:]."""
    out = np.empty(6)
    for i in range(6):
        out[i] = k[i] * v[i]
    return out


@njit
def dual_cross(a, b):
    """Cross product of dual vectors: (ar x br) + eps (ar x bd + ad x br).

    Equals the vector part of the dual quaternion commutator (1/2)[a, b]
    for pure dual vectors.
    """
    out = np.empty(6)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    out[3] = a[1] * b[5] - a[2] * b[4] + a[4] * b[2] - a[5] * b[1]
    out[4] = a[2] * b[3] - a[0] * b[5] + a[5] * b[0] - a[3] * b[2]
    out[5] = a[0] * b[4] - a[1] * b[3] + a[3] * b[1] - a[4] * b[0]
    return out


@njit
def dv_embed(v):
    """Embed a dual vector as a dual quaternion with zero scalar parts."""
    out = np.zeros(8)
    out[1], out[2], out[3] = v[0], v[1], v[2]
    out[5], out[6], out[7] = v[3], v[4], v[5]
    return out


@njit
def dv_extract(a):
    """Drop the scalar parts of a dual quaternion, keeping the two vectors."""
    out = np.empty(6)
    out[0], out[1], out[2] = a[1], a[2], a[3]
    out[3], out[4], out[5] = a[5], a[6], a[7]
    return out


@njit
def dq_normalize(a):
    """Project onto the unit constraint set: normalize the real part,
    remove the dual component parallel to it."""
    out = np.empty(8)
    n = math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3])
    for i in range(4):
        out[i] = a[i] / n
    dot = out[0] * a[4] + out[1] * a[5] + out[2] * a[6] + out[3] * a[7]
    for i in range(4):
        out[4 + i] = a[4 + i] / n - (dot / n) * out[i]
    return out


def is_unit_quaternion(q, tol: float = UNIT_ROTATION_TOL) -> bool:
    return abs(float(np.linalg.norm(q)) - 1.0) <= tol


def is_unit_dual_quaternion(a, tol: float = UNIT_DQ_TOL) -> bool:
    a = np.asarray(a, dtype=float)
    real_norm = float(np.linalg.norm(a[:4]))
    ortho = float(a[:4] @ a[4:])
    return abs(real_norm - 1.0) <= tol and abs(2.0 * ortho) <= tol
