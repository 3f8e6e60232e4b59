"""Independent oracles shared by the test suite.

Everything in this module is written from scratch against plain numpy,
deliberately NOT importing the package under test, so that agreement
between the two is evidence and not tautology.  Where the implementation
uses a two-term series, oracles carry one extra term.
"""

import numpy as np


# ---------------------------------------------------------------------------
# quaternion oracles (scalar-first storage, Hamilton convention)

def qmul_oracle(a, b):
    """Hamilton product via the left-multiplication matrix, an independent
    derivation path from any component-by-component formula."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w, x, y, z = a
    left = np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )
    return left @ b


def qconj_oracle(q):
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_to_rotmat(q):
    """Direction-cosine matrix of a unit quaternion, textbook formula."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_unit_quat(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_pose(rng, scale=2.0):
    return scale * rng.normal(size=3), random_unit_quat(rng)


# ---------------------------------------------------------------------------
# homogeneous-transform oracle for pose composition

def htm_from_pose(p, q):
    T = np.eye(4)
    T[:3, :3] = quat_to_rotmat(q)
    T[:3, 3] = np.asarray(p, dtype=float)
    return T


def htm_to_pose(T):
    return T[:3, 3].copy(), T[:3, :3].copy()


# ---------------------------------------------------------------------------
# dual-quaternion oracles built only on the two routines above

def dq_from_pose_oracle(p, q):
    p = np.asarray(p, dtype=float)
    real = np.asarray(q, dtype=float)
    dual = 0.5 * qmul_oracle(np.array([0.0, p[0], p[1], p[2]]), real)
    return np.concatenate([real, dual])


def dq_mul_oracle(a, b):
    ar, ad = a[:4], a[4:]
    br, bd = b[:4], b[4:]
    real = qmul_oracle(ar, br)
    dual = qmul_oracle(ar, bd) + qmul_oracle(ad, br)
    return np.concatenate([real, dual])


def dq_conj_oracle(a):
    return np.concatenate([qconj_oracle(a[:4]), qconj_oracle(a[4:])])


def dq_sandwich_oracle(g, v):
    """g . v . g* computed purely with the oracle product."""
    return dq_mul_oracle(dq_mul_oracle(g, v), dq_conj_oracle(g))


def dq_translation_oracle(a):
    t = 2.0 * qmul_oracle(a[4:], qconj_oracle(a[:4]))
    return t[1:]


def random_unit_dq(rng, scale=2.0):
    p, q = random_pose(rng, scale)
    return dq_from_pose_oracle(p, q)


def random_dq_with_angle(rng, angle, scale=2.0):
    """Unit dual quaternion whose rotation magnitude is exactly `angle`."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    q = np.concatenate([[np.cos(angle / 2.0)], np.sin(angle / 2.0) * axis])
    p = scale * rng.normal(size=3)
    return dq_from_pose_oracle(p, q)


# ---------------------------------------------------------------------------
# high-accuracy series oracles for the small-angle branch (one term more
# than the implementation carries)

def dq_exp_series_oracle(v):
    """exp of a dual vector for tiny rotation magnitude, 3-term series."""
    v = np.asarray(v, dtype=float)
    r, d = v[:3], v[3:]
    a2 = float(r @ r)
    # cos(a) and sin(a)/a to O(a^6)
    c = 1.0 - a2 / 2.0 + a2 * a2 / 24.0
    sc = 1.0 - a2 / 6.0 + a2 * a2 / 120.0
    real = np.concatenate([[c], sc * r])
    dual = qmul_oracle(np.array([0.0, d[0], d[1], d[2]]), real)
    return np.concatenate([real, dual])


def dq_log_series_oracle(a):
    """log of a near-identity unit dual quaternion, 3-term series."""
    a = np.asarray(a, dtype=float)
    s = a[0]
    vec = a[1:4]
    x2 = float(vec @ vec) / (s * s)
    # atan(x)/x to O(x^4), then /s
    factor = (1.0 - x2 / 3.0 + x2 * x2 / 5.0) / s
    dual = qmul_oracle(a[4:], qconj_oracle(a[:4]))[1:]
    return np.concatenate([factor * vec, dual])


# ---------------------------------------------------------------------------
# generic numeric differentiation

def central_diff(f, x, h=1e-5):
    """Central difference of a vector-valued scalar-argument function."""
    return (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2.0 * h)


def central_diff_series(samples, dt):
    """Central differences along axis 0 of a uniformly sampled series;
    returns derivative for the interior points samples[1:-1]."""
    arr = np.asarray(samples, dtype=float)
    return (arr[2:] - arr[:-2]) / (2.0 * dt)
