"""Geometric pose references: theta -> (position, attitude) with first and
second theta-derivatives, and the desired dual quaternion / dual twist
quantities derived from them.

Built-in curves keep everything in closed form so the moving frame and its
rates are exact:

* ``helix3d`` — constant-radius circular sweep with a sinusoidally varying
  climb rate; the frame's x-axis is the unit tangent, obtained by composing
  a yaw with a pitch of gamma = atan2(climb rate, radius).
* ``sinusoid2d`` — planar sinusoid; frame x-axis is the unit tangent, z is
  the plane normal.

Sampled paths come in as (theta, p, q) records and are fitted with natural
cubic splines; quaternion samples are sign-canonicalized and the spline is
normalized pointwise, which keeps C2 continuity, interpolates the knots,
and yields analytic frame rates via quotient-rule differentiation.

All rates here are per unit theta (ring accents in the derivations), not
per second; the simulation multiplies by the pose-parameter rate.
"""

import json
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import _quatmath as tm
from ._accel import njit
from .errors import (
    ConfigInvalid,
    InsufficientSamples,
    NonMonotonicTheta,
    NonUnitRotation,
    SchemaMismatch,
    ThetaOutOfRange,
)
from .tolerances import UNIT_ROTATION_TOL

HELIX = 0
SINUSOID = 1
SPLINE = 2

_EMPTY_BREAKS = np.zeros(0)
_EMPTY_COEFS3 = np.zeros((3, 4, 0))
_EMPTY_COEFS4 = np.zeros((4, 4, 0))

RefSample = namedtuple("RefSample", "p q p1 p2 w w1")


@dataclass(frozen=True)
class DesiredDualState:
    """Desired pose as a unit dual quaternion plus the desired dual twist
    and its theta-derivative."""

    qhat_d: np.ndarray
    what_d: np.ndarray
    what_d_dot: np.ndarray


@njit
def _segment(breaks, t):
    i = np.searchsorted(breaks, t, side="right") - 1
    if i < 0:
        i = 0
    m = breaks.shape[0] - 2
    if i > m:
        i = m
    return i


@njit
def _poly(c0, c1, c2, c3, u):
    val = ((c0 * u + c1) * u + c2) * u + c3
    d1 = (3.0 * c0 * u + 2.0 * c1) * u + c2
    d2 = 6.0 * c0 * u + 2.0 * c1
    return val, d1, d2


@njit
def ref_eval_tuples(code, par, breaks, pc, qc, theta):
    """Evaluate a reference at theta (assumed in range).

    Returns (p, q, p1, p2, w, w1) as tuples: position, unit attitude,
    position theta-derivatives, frame angular rate and its theta-derivative.
    """
    if code == HELIX:
        radius, climb, amp, freq = par[0], par[1], par[2], par[3]
        st, ct = np.sin(theta), np.cos(theta)
        h = climb * theta + amp * np.sin(freq * theta)
        h1 = climb + amp * freq * np.cos(freq * theta)
        h2 = -amp * freq * freq * np.sin(freq * theta)
        h3 = -amp * freq * freq * freq * np.cos(freq * theta)
        p = (radius * ct, radius * st, h)
        p1 = (-radius * st, radius * ct, h1)
        p2 = (-radius * ct, -radius * st, h2)
        gamma = np.arctan2(h1, radius)
        den = radius * radius + h1 * h1
        g1 = radius * h2 / den
        g2 = radius * h3 / den - 2.0 * radius * h1 * h2 * h2 / (den * den)
        # yaw to the tangent azimuth, then pitch by -gamma
        half_yaw = 0.5 * (theta + 0.5 * np.pi)
        qz = (np.cos(half_yaw), 0.0, 0.0, np.sin(half_yaw))
        qy = (np.cos(-0.5 * gamma), 0.0, np.sin(-0.5 * gamma), 0.0)
        q = tm.qmul(qz, qy)
        w = (g1 * ct, g1 * st, 1.0)
        w1 = (g2 * ct - g1 * st, g2 * st + g1 * ct, 0.0)
        return p, q, p1, p2, w, w1
    elif code == SINUSOID:
        stretch, amp, freq = par[0], par[1], par[2]
        g = amp * freq * np.cos(freq * theta)
        g1 = -amp * freq * freq * np.sin(freq * theta)
        g2 = -amp * freq * freq * freq * np.cos(freq * theta)
        p = (stretch * theta, amp * np.sin(freq * theta), 0.0)
        p1 = (stretch, g, 0.0)
        p2 = (0.0, g1, 0.0)
        psi = np.arctan2(g, stretch)
        den = stretch * stretch + g * g
        psi1 = stretch * g1 / den
        psi2 = stretch * g2 / den - 2.0 * stretch * g * g1 * g1 / (den * den)
        q = (np.cos(0.5 * psi), 0.0, 0.0, np.sin(0.5 * psi))
        w = (0.0, 0.0, psi1)
        w1 = (0.0, 0.0, psi2)
        return p, q, p1, p2, w, w1
    else:
        i = _segment(breaks, theta)
        u = theta - breaks[i]
        px, px1, px2 = _poly(pc[0, 0, i], pc[0, 1, i], pc[0, 2, i], pc[0, 3, i], u)
        py, py1, py2 = _poly(pc[1, 0, i], pc[1, 1, i], pc[1, 2, i], pc[1, 3, i], u)
        pz, pz1, pz2 = _poly(pc[2, 0, i], pc[2, 1, i], pc[2, 2, i], pc[2, 3, i], u)
        s0, s0_1, s0_2 = _poly(qc[0, 0, i], qc[0, 1, i], qc[0, 2, i], qc[0, 3, i], u)
        s1, s1_1, s1_2 = _poly(qc[1, 0, i], qc[1, 1, i], qc[1, 2, i], qc[1, 3, i], u)
        s2, s2_1, s2_2 = _poly(qc[2, 0, i], qc[2, 1, i], qc[2, 2, i], qc[2, 3, i], u)
        s3, s3_1, s3_2 = _poly(qc[3, 0, i], qc[3, 1, i], qc[3, 2, i], qc[3, 3, i], u)
        s = (s0, s1, s2, s3)
        sd = (s0_1, s1_1, s2_1, s3_1)
        sdd = (s0_2, s1_2, s2_2, s3_2)
        n2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]
        n = np.sqrt(n2)
        alpha = s[0] * sd[0] + s[1] * sd[1] + s[2] * sd[2] + s[3] * sd[3]
        beta = (
            sd[0] * sd[0] + sd[1] * sd[1] + sd[2] * sd[2] + sd[3] * sd[3]
            + s[0] * sdd[0] + s[1] * sdd[1] + s[2] * sdd[2] + s[3] * sdd[3]
        )
        n3 = n2 * n
        n5 = n3 * n2
        q = (s[0] / n, s[1] / n, s[2] / n, s[3] / n)
        q1 = (
            sd[0] / n - s[0] * alpha / n3,
            sd[1] / n - s[1] * alpha / n3,
            sd[2] / n - s[2] * alpha / n3,
            sd[3] / n - s[3] * alpha / n3,
        )
        q2 = (
            sdd[0] / n - 2.0 * sd[0] * alpha / n3 - s[0] * beta / n3 + 3.0 * s[0] * alpha * alpha / n5,
            sdd[1] / n - 2.0 * sd[1] * alpha / n3 - s[1] * beta / n3 + 3.0 * s[1] * alpha * alpha / n5,
            sdd[2] / n - 2.0 * sd[2] * alpha / n3 - s[2] * beta / n3 + 3.0 * s[2] * alpha * alpha / n5,
            sdd[3] / n - 2.0 * sd[3] * alpha / n3 - s[3] * beta / n3 + 3.0 * s[3] * alpha * alpha / n5,
        )
        wq = tm.qmul(q1, tm.qconj(q))
        w = (2.0 * wq[1], 2.0 * wq[2], 2.0 * wq[3])
        w1q_a = tm.qmul(q2, tm.qconj(q))
        w1q_b = tm.qmul(q1, tm.qconj(q1))
        w1 = (
            2.0 * (w1q_a[1] + w1q_b[1]),
            2.0 * (w1q_a[2] + w1q_b[2]),
            2.0 * (w1q_a[3] + w1q_b[3]),
        )
        return (px, py, pz), q, (px1, py1, pz1), (px2, py2, pz2), w, w1


@njit
def desired_tuples(code, par, breaks, pc, qc, theta):
    """Desired pose (dual quaternion pair), dual twist, and twist
    theta-derivative at theta."""
    p, q, p1, p2, w, w1 = ref_eval_tuples(code, par, breaks, pc, qc, theta)
    qhat = tm.dq_of_pose(p, q)
    dual = tm.add3(p1, tm.cross(p, w))
    what = (w[0], w[1], w[2], dual[0], dual[1], dual[2])
    dual_dot = tm.add3(p2, tm.add3(tm.cross(p1, w), tm.cross(p, w1)))
    what_dot = (w1[0], w1[1], w1[2], dual_dot[0], dual_dot[1], dual_dot[2])
    return qhat, what, what_dot


@dataclass(frozen=True)
class GeometricReference:
    kind: str
    theta0: float
    theta_f: float
    code: int
    params: np.ndarray
    breaks: np.ndarray
    pos_coefs: np.ndarray
    quat_coefs: np.ndarray

    def _check(self, theta: float) -> float:
        if theta < self.theta0 - 1e-9 or theta > self.theta_f + 1e-9:
            raise ThetaOutOfRange(
                f"theta={theta} outside [{self.theta0}, {self.theta_f}]"
            )
        return min(max(theta, self.theta0), self.theta_f)

    def evaluate(self, theta: float) -> RefSample:
        theta = self._check(theta)
        p, q, p1, p2, w, w1 = ref_eval_tuples(
            self.code, self.params, self.breaks, self.pos_coefs, self.quat_coefs, theta
        )
        return RefSample(
            np.array(p), np.array(q), np.array(p1), np.array(p2), np.array(w), np.array(w1)
        )


def eval_desired(ref: GeometricReference, theta: float) -> DesiredDualState:
    theta = ref._check(theta)
    qhat, what, what_dot = desired_tuples(
        ref.code, ref.params, ref.breaks, ref.pos_coefs, ref.quat_coefs, theta
    )
    out = np.empty(8)
    out[:4] = qhat[0]
    out[4:] = qhat[1]
    return DesiredDualState(out, np.array(what), np.array(what_dot))


def build_helix3d(
    radius: float = 2.0,
    climb: float = 0.25,
    wave_amplitude: float = 0.4,
    wave_frequency: float = 2.0,
    theta_span=(0.0, 2.0 * np.pi),
) -> GeometricReference:
    """Circular sweep of fixed radius whose climb rate varies sinusoidally,
    giving a fully 3D curve with closed-form tangent frame."""
    if radius <= 0.0:
        raise ConfigInvalid("helix radius must be positive")
    t0, tf = float(theta_span[0]), float(theta_span[1])
    if not tf > t0:
        raise ConfigInvalid("theta_span must be increasing")
    params = np.array([radius, climb, wave_amplitude, wave_frequency])
    return GeometricReference(
        "helix3d", t0, tf, HELIX, params, _EMPTY_BREAKS, _EMPTY_COEFS3, _EMPTY_COEFS4
    )


def build_sinusoid2d(
    stretch: float = 1.0,
    amplitude: float = 1.0,
    frequency: float = 1.0,
    theta_span=(0.0, 4.0 * np.pi),
) -> GeometricReference:
    """Planar sinusoid with the tangent frame of the curve."""
    if stretch <= 0.0:
        raise ConfigInvalid("sinusoid stretch must be positive")
    t0, tf = float(theta_span[0]), float(theta_span[1])
    if not tf > t0:
        raise ConfigInvalid("theta_span must be increasing")
    params = np.array([stretch, amplitude, frequency])
    return GeometricReference(
        "sinusoid2d", t0, tf, SINUSOID, params, _EMPTY_BREAKS, _EMPTY_COEFS3, _EMPTY_COEFS4
    )


def build_spline_reference(samples) -> GeometricReference:
    """Fit natural cubic splines through (theta, p, q) samples.

    Quaternions are sign-canonicalized (consecutive dot products >= 0)
    before fitting and the evaluated spline is normalized pointwise.
    """
    n = len(samples)
    if n < 4:
        raise InsufficientSamples("spline reference needs at least 4 samples")
    thetas = np.array([float(s[0]) for s in samples])
    if not np.all(np.diff(thetas) > 0.0):
        raise NonMonotonicTheta("sample thetas must be strictly increasing")
    pos = np.array([np.asarray(s[1], dtype=float) for s in samples])
    quat = np.array([np.asarray(s[2], dtype=float) for s in samples])
    if pos.shape != (n, 3) or quat.shape != (n, 4):
        raise ConfigInvalid("samples must carry 3-vector p and 4-vector q")
    norms = np.linalg.norm(quat, axis=1)
    if np.max(np.abs(norms - 1.0)) > UNIT_ROTATION_TOL:
        raise NonUnitRotation("sample attitude quaternions must be unit length")
    for i in range(1, n):
        if quat[i] @ quat[i - 1] < 0.0:
            quat[i] = -quat[i]
    pos_cs = CubicSpline(thetas, pos, axis=0, bc_type="natural")
    quat_cs = CubicSpline(thetas, quat, axis=0, bc_type="natural")
    pos_coefs = np.ascontiguousarray(np.moveaxis(pos_cs.c, 2, 0))
    quat_coefs = np.ascontiguousarray(np.moveaxis(quat_cs.c, 2, 0))
    return GeometricReference(
        "spline",
        float(thetas[0]),
        float(thetas[-1]),
        SPLINE,
        np.zeros(0),
        np.ascontiguousarray(thetas),
        pos_coefs,
        quat_coefs,
    )


def load_spline_samples(path):
    """Read a versioned sample file: {schema_version: 1, samples: [{theta,
    p:[3], q:[4 scalar-first]}, ...]} and return build_spline_reference
    input."""
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise ConfigInvalid("sample file must hold a JSON object")
    version = payload.get("schema_version")
    if version is None:
        raise ConfigInvalid("sample file is missing schema_version")
    if version != 1:
        raise SchemaMismatch(f"unsupported sample schema_version {version!r}")
    samples = payload.get("samples")
    if not isinstance(samples, list) or not samples:
        raise ConfigInvalid("sample file must hold a non-empty samples array")
    out = []
    for i, rec in enumerate(samples):
        try:
            theta = float(rec["theta"])
            p = np.asarray(rec["p"], dtype=float)
            q = np.asarray(rec["q"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"malformed sample record at index {i}") from exc
        if p.shape != (3,) or q.shape != (4,):
            raise ConfigInvalid(f"sample record {i} has wrong p/q arity")
        out.append((theta, p, q))
    return out
