"""Scalar tuple kernels.

Every quaternion / dual-quaternion formula in the package is written here
exactly once, over plain tuples of floats: quaternions as (w, x, y, z),
dual quaternions as a ((w,x,y,z), (w,x,y,z)) pair, dual vectors as
(rx, ry, rz, dx, dy, dz).  Tuples stay in registers under numba, so the
closed-loop core composes these with zero heap traffic; under the numpy
fallback the same source runs as plain Python.  Array-facing wrappers live
in `dq_algebra`.
"""

import math

from ._accel import njit
from .errors import AngleOutOfRange
from .tolerances import SMALL_ANGLE


@njit
def dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit
def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


@njit
def add3(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


@njit
def sub3(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


@njit
def scale3(s, a):
    return (s * a[0], s * a[1], s * a[2])


@njit
def qmul(a, b):
    return (
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    )


@njit
def qconj(q):
    return (q[0], -q[1], -q[2], -q[3])


@njit
def qadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


@njit
def qscale(s, q):
    return (s * q[0], s * q[1], s * q[2], s * q[3])


@njit
def qnormalize(q):
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


@njit
def qrot(q, v):
    # q . [0,v] . q* expanded as v + w*t + qv x t with t = 2 qv x v
    qv = (q[1], q[2], q[3])
    t = scale3(2.0, cross(qv, v))
    u = cross(qv, t)
    return (
        v[0] + q[0] * t[0] + u[0],
        v[1] + q[0] * t[1] + u[1],
        v[2] + q[0] * t[2] + u[2],
    )


@njit
def qderiv(w, q):
    # attitude kinematics dq/dt = 1/2 [0,w] . q
    return qscale(0.5, qmul((0.0, w[0], w[1], w[2]), q))


@njit
def dqmul(a, b):
    return (qmul(a[0], b[0]), qadd(qmul(a[0], b[1]), qmul(a[1], b[0])))


@njit
def dqconj(a):
    return (qconj(a[0]), qconj(a[1]))


@njit
def dqneg(a):
    return (qscale(-1.0, a[0]), qscale(-1.0, a[1]))


@njit
def dq_of_pose(p, q):
    return (q, qscale(0.5, qmul((0.0, p[0], p[1], p[2]), q)))


@njit
def translation_of(a):
    t = qmul(a[1], qconj(a[0]))
    return (2.0 * t[1], 2.0 * t[2], 2.0 * t[3])


@njit
def dqlog(a):
    """Screw log: real part (|phi|/2) n for rotation magnitude |phi| in
    [0, 2pi), dual part half the translation.  Series branch below
    SMALL_ANGLE avoids the 0/0 at identity."""
    s = a[0][0]
    vx, vy, vz = a[0][1], a[0][2], a[0][3]
    vn = math.sqrt(vx * vx + vy * vy + vz * vz)
    half = math.atan2(vn, s)
    if 2.0 * half < SMALL_ANGLE:
        factor = (1.0 - vn * vn / (3.0 * s * s)) / s
    elif vn < 1e-300:
        # antipode: the rotation axis is undefined, return a zero rotation
        # log so downstream feedback vanishes at the unstable equilibrium
        factor = 0.0
    else:
        factor = half / vn
    t = qmul(a[1], qconj(a[0]))
    return (factor * vx, factor * vy, factor * vz, t[1], t[2], t[3])


@njit
def dqexp(v):
    """Screw exp, inverse of dqlog on rotation magnitudes below 2pi."""
    a = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if a >= math.pi:
        raise AngleOutOfRange("log-vector real part must have norm below pi")
    if 2.0 * a < SMALL_ANGLE:
        sc = 1.0 - a * a / 6.0
    else:
        sc = math.sin(a) / a
    qr = (math.cos(a), sc * v[0], sc * v[1], sc * v[2])
    qd = qmul((0.0, v[3], v[4], v[5]), qr)
    return (qr, qd)


@njit
def adj6(g, w):
    # Ad_g on a dual vector; for unit g the sandwich collapses to
    # (R wr, R wd + p x R wr)
    r = qrot(g[0], (w[0], w[1], w[2]))
    d = qrot(g[0], (w[3], w[4], w[5]))
    p = translation_of(g)
    c = cross(p, r)
    return (r[0], r[1], r[2], d[0] + c[0], d[1] + c[1], d[2] + c[2])


@njit
def gain6(k, w):
    return (k[0] * w[0], k[1] * w[1], k[2] * w[2], k[3] * w[3], k[4] * w[4], k[5] * w[5])


@njit
def add6(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4], a[5] + b[5])


@njit
def sub6(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4], a[5] - b[5])


@njit
def scale6(s, a):
    return (s * a[0], s * a[1], s * a[2], s * a[3], s * a[4], s * a[5])


@njit
def cross6(a, b):
    # cross product on dual vectors: real parts cross, dual parts couple
    ar = (a[0], a[1], a[2])
    ad = (a[3], a[4], a[5])
    br = (b[0], b[1], b[2])
    bd = (b[3], b[4], b[5])
    rr = cross(ar, br)
    rd = add3(cross(ar, bd), cross(ad, br))
    return (rr[0], rr[1], rr[2], rd[0], rd[1], rd[2])


@njit
def norm6(a):
    return math.sqrt(
        a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3] + a[4] * a[4] + a[5] * a[5]
    )


@njit
def twist_of(p, v, w):
    # body twist: angular rate plus coupled linear part v + p x w
    c = cross(p, w)
    return (w[0], w[1], w[2], v[0] + c[0], v[1] + c[1], v[2] + c[2])


@njit
def dv_to_dq(w):
    # embed a dual vector as a dual quaternion with zero scalar parts
    return ((0.0, w[0], w[1], w[2]), (0.0, w[3], w[4], w[5]))


@njit
def dq_to_dv(a):
    # drop the (zero) scalar parts
    return (a[0][1], a[0][2], a[0][3], a[1][1], a[1][2], a[1][3])


@njit
def matvec3(M, v):
    return (
        M[0, 0] * v[0] + M[0, 1] * v[1] + M[0, 2] * v[2],
        M[1, 0] * v[0] + M[1, 1] * v[1] + M[1, 2] * v[2],
        M[2, 0] * v[0] + M[2, 1] * v[1] + M[2, 2] * v[2],
    )
