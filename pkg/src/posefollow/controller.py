"""Pose-following control law and pose-parameter speed laws.

The wrench command is assembled from two dual-vector pieces: a feedforward
term that cancels every state- and reference-dependent term of the error
acceleration, and a PD feedback term on the pose error log and the error
twist. With both applied, the error twist dynamics collapse to exactly the
feedback term, which is what makes the gain-based stability argument go
through.

The pose parameter theta is a virtual double integrator driven by a scalar
input. Three laws are provided: velocity assignment (regulate theta_dot to
a profile in theta, exact exponential decay of the mismatch), distance
feedback (slow the target down when the body strays from the path), and a
tracking baseline where theta advances as a fixed-rate clock.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from ._accel import njit
from .dq_algebra import adjoint_twist, dq_log, dual_cross, gain_apply
from .error_dynamics import pose_error, twist_error_adjoint
from .errors import ConfigInvalid, InvalidGains, UnknownVariant
from .reference import GeometricReference, eval_desired
from .rigid_body import P, BodyParams, Wrench, drift_term, to_dual_state, wrench_from_control
from .tolerances import THETA_DDOT_LIMIT


def _gain_vector(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(6, float(arr))
    if arr.shape != (6,):
        raise InvalidGains(f"{name} must be a scalar or 6 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidGains(f"{name} has non-finite components")
    if np.any(arr <= 0.0):
        raise InvalidGains(f"{name} components must be strictly positive")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ControlGains:
    """PD gains for the dual feedback plus the pose-parameter gain.

    kp and kv accept a scalar (same gain on all six channels) or a
    6-vector ordered (rotational triplet, translational triplet). The
    translational (dual-part) components of kp must be equal; the energy
    argument for convergence needs that symmetry.
    """

    kp: np.ndarray
    kv: np.ndarray
    k_theta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kp", _gain_vector(self.kp, "kp"))
        object.__setattr__(self, "kv", _gain_vector(self.kv, "kv"))
        if not (self.kp[3] == self.kp[4] == self.kp[5]):
            raise InvalidGains("kp translational components must be equal")
        kth = float(self.k_theta)
        if not math.isfinite(kth) or kth <= 0.0:
            raise InvalidGains("k_theta must be finite and strictly positive")
        object.__setattr__(self, "k_theta", kth)


@dataclass(frozen=True)
class VelocityProfile:
    """Desired pose-parameter speed as a function of theta.

    kinds: "constant" (base only) and "sinusoidal"
    (base + amplitude*sin(frequency*theta)). Must stay strictly positive.
    """

    kind: str
    base: float
    amplitude: float = 0.0
    frequency: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoidal"):
            raise UnknownVariant(f"unknown velocity profile kind: {self.kind!r}")
        vals = (self.base, self.amplitude, self.frequency)
        if not all(math.isfinite(v) for v in vals):
            raise ConfigInvalid("velocity profile parameters must be finite")
        if self.kind == "constant":
            if self.amplitude != 0.0:
                raise ConfigInvalid("constant profile cannot carry an amplitude")
            if self.base <= 0.0:
                raise ConfigInvalid("profile speed must be strictly positive")
        else:
            if self.amplitude < 0.0 or self.frequency <= 0.0:
                raise ConfigInvalid("sinusoidal profile needs amplitude >= 0, frequency > 0")
            if self.base - self.amplitude <= 0.0:
                raise ConfigInvalid("profile dips to zero; base must exceed amplitude")

    def value(self, theta: float) -> float:
        if self.kind == "constant":
            return self.base
        return self.base + self.amplitude * math.sin(self.frequency * theta)

    def slope(self, theta: float) -> float:
        if self.kind == "constant":
            return 0.0
        return self.amplitude * self.frequency * math.cos(self.frequency * theta)


@dataclass(frozen=True)
class DistanceMap:
    """Target pose-parameter speed as a function of transverse distance.

    Smooth saturating family v_min + (v_nom - v_min)*exp(-(d/d_scale)^2):
    full speed on the path, easing toward the floor v_min as the body
    strays. Monotone non-increasing in d by construction.
    """

    v_nom: float
    v_min: float
    d_scale: float

    def __post_init__(self):
        vals = (self.v_nom, self.v_min, self.d_scale)
        if not all(math.isfinite(v) for v in vals):
            raise ConfigInvalid("distance map parameters must be finite")
        if not (0.0 < self.v_min <= self.v_nom):
            raise ConfigInvalid("distance map needs 0 < v_min <= v_nom")
        if self.d_scale <= 0.0:
            raise ConfigInvalid("distance map needs d_scale > 0")

    def value(self, d: float) -> float:
        r = d / self.d_scale
        return self.v_min + (self.v_nom - self.v_min) * math.exp(-r * r)


# wider d_scale tolerates more deviation before slowing the target down
_DISTANCE_MAP_SCALES = {"progressive": 0.45, "medium": 0.25, "conservative": 0.12}


def distance_map_preset(name: str, v_nom: float = 0.35, v_min: float = 0.02) -> DistanceMap:
    if name not in _DISTANCE_MAP_SCALES:
        known = ", ".join(sorted(_DISTANCE_MAP_SCALES))
        raise UnknownVariant(f"unknown distance map {name!r} (expected one of: {known})")
    return DistanceMap(v_nom=v_nom, v_min=v_min, d_scale=_DISTANCE_MAP_SCALES[name])


class AugmentedState(NamedTuple):
    """Body state vector plus the pose-parameter pair (theta, theta_dot)."""

    x: np.ndarray
    theta: float
    theta_dot: float


@njit
def lambda_switch(qhat_e):
    """Sign selector for the nearer of the two error-space equilibria.

    +1 when the scalar real part is >= 0 (boundary inclusive), else -1.
    """
    if qhat_e[0] >= 0.0:
        return 1.0
    return -1.0


def feedback(qhat_e, what_e, gains: ControlGains, lambda_enabled: bool = True):
    """PD feedback -2 kp (.) log(lambda qhat_e) - kv (.) what_e."""
    qhat_e = np.asarray(qhat_e, dtype=float)
    lam = lambda_switch(qhat_e) if lambda_enabled else 1.0
    y = dq_log(lam * qhat_e)
    return -2.0 * gain_apply(gains.kp, y) - gain_apply(gains.kv, np.asarray(what_e, dtype=float))


def feedforward(x, desired, theta_dot: float, theta_ddot: float, params: BodyParams):
    """Cancellation term: minus every non-feedback piece of the error
    acceleration, so the closed loop sees only the feedback.

    theta_ddot is the scalar virtual input chosen by the active
    pose-parameter law; it scales the carried reference-twist term.
    """
    x = np.asarray(x, dtype=float)
    qhat, what = to_dual_state(x)
    qhat_e = pose_error(qhat, desired.qhat_d)
    what_e = twist_error_adjoint(what, theta_dot, qhat_e, desired.what_d)
    # adjoint of the conjugated reference twist; conjugating a pure dual
    # vector just flips its sign
    carried = -adjoint_twist(qhat_e, desired.what_d)
    carried_dot = -adjoint_twist(qhat_e, desired.what_d_dot)
    coupling = dual_cross(what_e, carried)
    return -(
        drift_term(x, params)
        + theta_ddot * carried
        + theta_dot * (coupling + theta_dot * carried_dot)
    )


def pose_param_velocity_assignment(
    theta: float, theta_dot: float, profile: VelocityProfile, k_theta: float
) -> float:
    """Virtual input regulating theta_dot onto the profile.

    The slope term makes the mismatch theta_dot - v(theta) obey a pure
    first-order decay at rate k_theta along closed-loop solutions.
    """
    return -k_theta * (theta_dot - profile.value(theta)) + theta_dot * profile.slope(theta)


def pose_param_distance_feedback(
    theta_dot: float, d_perp: float, profile_map: DistanceMap, k_theta: float
) -> float:
    """Virtual input steering theta_dot toward a distance-scheduled speed."""
    return -k_theta * (theta_dot - profile_map.value(d_perp))


def perp_distance(p, p_d, tangent) -> float:
    """Position-error component orthogonal to the reference tangent.

    Falls back to the full distance when the tangent degenerates.
    """
    r = np.asarray(p, dtype=float) - np.asarray(p_d, dtype=float)
    tangent = np.asarray(tangent, dtype=float)
    n = np.linalg.norm(tangent)
    if n < 1e-12:
        return float(np.linalg.norm(r))
    t = tangent / n
    return float(np.linalg.norm(r - (r @ t) * t))


_MODES = ("velocity", "distance", "tracking")

Profile = Union[VelocityProfile, DistanceMap, None]


def compute_control(
    aug: AugmentedState,
    reference: GeometricReference,
    gains: ControlGains,
    params: BodyParams,
    mode: str,
    profile: Profile = None,
    lambda_enabled: bool = True,
) -> tuple:
    """One control step: wrench for the body, virtual input for theta.

    theta outside the reference span is clamped to it (the simulator holds
    the endpoint once the run completes). The virtual input is saturated
    to +-THETA_DDOT_LIMIT. Tracking mode leaves theta as an externally
    advanced clock and always returns zero virtual input.
    """
    if mode not in _MODES:
        raise UnknownVariant(f"unknown control mode {mode!r} (expected one of: {', '.join(_MODES)})")
    theta = min(max(float(aug.theta), reference.theta0), reference.theta_f)
    theta_dot = float(aug.theta_dot)
    x = np.asarray(aug.x, dtype=float)
    desired = eval_desired(reference, theta)

    if mode == "velocity":
        if not isinstance(profile, VelocityProfile):
            raise ConfigInvalid("velocity mode requires a VelocityProfile")
        theta_ddot = pose_param_velocity_assignment(theta, theta_dot, profile, gains.k_theta)
    elif mode == "distance":
        if not isinstance(profile, DistanceMap):
            raise ConfigInvalid("distance mode requires a DistanceMap")
        sample = reference.evaluate(theta)
        d = perp_distance(x[P], sample.p, sample.p1)
        theta_ddot = pose_param_distance_feedback(theta_dot, d, profile, gains.k_theta)
    else:
        theta_ddot = 0.0
    if theta_ddot > THETA_DDOT_LIMIT:
        theta_ddot = THETA_DDOT_LIMIT
    elif theta_ddot < -THETA_DDOT_LIMIT:
        theta_ddot = -THETA_DDOT_LIMIT

    qhat, what = to_dual_state(x)
    qhat_e = pose_error(qhat, desired.qhat_d)
    what_e = twist_error_adjoint(what, theta_dot, qhat_e, desired.what_d)
    u_fb = feedback(qhat_e, what_e, gains, lambda_enabled)
    u_ff = feedforward(x, desired, theta_dot, theta_ddot, params)
    return wrench_from_control(u_ff + u_fb, x, params), theta_ddot
