"""Closed-loop simulation engine, metrics, and trajectory export.

The whole run lives in one jitted kernel: reference evaluation, error
computation, control, and the RK4 stages all work on scalar tuples, so a
step allocates nothing beyond a few fixed stage buffers. The control law
is evaluated inside every integrator stage, the attitude quaternion is
renormalized once per step, and theta latches at the end of the span
(terminal hold: theta frozen, theta_dot zeroed, the controller keeps
regulating toward the endpoint pose).

Exported rows are sampled every `export_stride` steps. Alongside the
state, each row carries the control and the diagnostics evaluated at that
instant, so the CSV is self-contained.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import _quatmath as tm
from ._accel import njit
from .config import Disturbance, RunConfig
from .controller import AugmentedState, ControlGains, DistanceMap, VelocityProfile
from .errors import NonFiniteState
from .reference import GeometricReference, ref_eval_tuples
from .rigid_body import STATE_SIZE, deriv_tuples, drift_tuples
from .tolerances import THETA_DDOT_LIMIT

__all__ = [
    "AugmentedState",
    "Disturbance",
    "RunRecord",
    "CSV_COLUMNS",
    "run_closed_loop",
    "inject_disturbance",
    "matched_initial_state",
    "metrics",
    "write_run_csv",
    "write_summary",
    "export_run",
]

# normative CSV column order
CSV_COLUMNS = [
    "t", "theta", "theta_dot",
    "px", "py", "pz",
    "qw", "qx", "qy", "qz",
    "pdx", "pdy", "pdz",
    "qdw", "qdx", "qdy", "qdz",
    "d_perp", "err_log_norm", "lambda",
    "fx", "fy", "fz",
    "taux", "tauy", "tauz",
    "theta_ddot",
]

# extras matrix layout filled by the run kernel
_X_DPERP, _X_ERRLOG, _X_LAMBDA = 0, 1, 2
_X_F, _X_TAU, _X_THDD, _X_V = 3, 6, 9, 10
_X_PD, _X_QD = 11, 14
_X_WIDTH = 18

# pose-parameter law codes for the kernel
_LAW_CONSTANT, _LAW_SINUSOID, _LAW_DISTANCE, _LAW_TRACKING = 0, 1, 2, 3


@njit
def _control_core(
    p, v, q, w, th, thd, hold,
    ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
    law_code, law_par, kp, kv, k_theta, lam_on,
    m, J, Jinv,
):
    """Control and diagnostics at one state.  Returns the wrench, the
    saturated virtual input, and the exported observables."""
    th_c = th
    if th_c < th_lo:
        th_c = th_lo
    elif th_c > th_hi:
        th_c = th_hi
    pd3, qd4, p1d, p2d, wd3, w1d = ref_eval_tuples(
        ref_code, ref_par, breaks, pos_c, quat_c, th_c
    )
    qhat_d = tm.dq_of_pose(pd3, qd4)
    dual = tm.add3(p1d, tm.cross(pd3, wd3))
    wd6 = (wd3[0], wd3[1], wd3[2], dual[0], dual[1], dual[2])
    duald = tm.add3(p2d, tm.add3(tm.cross(p1d, wd3), tm.cross(pd3, w1d)))
    wdo6 = (w1d[0], w1d[1], w1d[2], duald[0], duald[1], duald[2])

    qhat = tm.dq_of_pose(p, q)
    what = tm.twist_of(p, v, w)
    qhat_e = tm.dqmul(qhat, tm.dqconj(qhat_d))
    what_e = tm.sub6(what, tm.scale6(thd, tm.adj6(qhat_e, wd6)))

    # transverse distance to the reference point at the current theta
    r3 = tm.sub3(p, pd3)
    tn = math.sqrt(tm.dot3(p1d, p1d))
    if tn < 1e-12:
        d_perp = math.sqrt(tm.dot3(r3, r3))
    else:
        t3 = tm.scale3(1.0 / tn, p1d)
        rp = tm.sub3(r3, tm.scale3(tm.dot3(r3, t3), t3))
        d_perp = math.sqrt(tm.dot3(rp, rp))

    # pose-parameter law (virtual input); frozen under terminal hold
    thdd = 0.0
    if hold == 0:
        if law_code == 0:
            thdd = -k_theta * (thd - law_par[0])
        elif law_code == 1:
            vv = law_par[0] + law_par[1] * math.sin(law_par[2] * th_c)
            sl = law_par[1] * law_par[2] * math.cos(law_par[2] * th_c)
            thdd = -k_theta * (thd - vv) + thd * sl
        elif law_code == 2:
            rr = d_perp / law_par[2]
            vv = law_par[1] + (law_par[0] - law_par[1]) * math.exp(-rr * rr)
            thdd = -k_theta * (thd - vv)
    sat = 0
    if thdd > THETA_DDOT_LIMIT:
        thdd = THETA_DDOT_LIMIT
        sat = 1
    elif thdd < -THETA_DDOT_LIMIT:
        thdd = -THETA_DDOT_LIMIT
        sat = 1

    lam = 1.0
    if lam_on == 1 and qhat_e[0][0] < 0.0:
        lam = -1.0
    y6 = tm.dqlog((tm.qscale(lam, qhat_e[0]), tm.qscale(lam, qhat_e[1])))
    u_fb = tm.sub6(tm.scale6(-2.0, tm.gain6(kp, y6)), tm.gain6(kv, what_e))

    F6 = drift_tuples(p, v, w, J, Jinv)
    A6 = tm.scale6(-1.0, tm.adj6(qhat_e, wd6))
    Ado6 = tm.scale6(-1.0, tm.adj6(qhat_e, wdo6))
    coup = tm.cross6(what_e, A6)
    ff_sum = tm.add6(
        F6, tm.add6(tm.scale6(thdd, A6), tm.scale6(thd, tm.add6(coup, tm.scale6(thd, Ado6))))
    )
    u6 = tm.sub6(u_fb, ff_sum)
    ur = (u6[0], u6[1], u6[2])
    tau = tm.matvec3(J, ur)
    f = tm.scale3(m, tm.sub3((u6[3], u6[4], u6[5]), tm.cross(p, ur)))

    err_log = tm.norm6(y6)
    # energy-like diagnostic: twist error plus gain-weighted squared log
    vlyap = 0.5 * (
        what_e[0] * what_e[0] + what_e[1] * what_e[1] + what_e[2] * what_e[2]
        + what_e[3] * what_e[3] + what_e[4] * what_e[4] + what_e[5] * what_e[5]
    ) + 2.0 * (
        kp[0] * y6[0] * y6[0] + kp[1] * y6[1] * y6[1] + kp[2] * y6[2] * y6[2]
        + kp[3] * y6[3] * y6[3] + kp[4] * y6[4] * y6[4] + kp[5] * y6[5] * y6[5]
    )
    return f, tau, thdd, lam, sat, d_perp, err_log, vlyap, pd3, qd4


@njit
def _rhs_into(
    s, out, hold,
    ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
    law_code, law_par, kp, kv, k_theta, lam_on,
    m, J, Jinv,
):
    p = (s[0], s[1], s[2])
    v = (s[3], s[4], s[5])
    q = (s[6], s[7], s[8], s[9])
    w = (s[10], s[11], s[12])
    f, tau, thdd, lam, sat, d_perp, err_log, vlyap, pd3, qd4 = _control_core(
        p, v, q, w, s[13], s[14], hold,
        ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
        law_code, law_par, kp, kv, k_theta, lam_on,
        m, J, Jinv,
    )
    dp, dv, dq, dw = deriv_tuples(p, v, q, w, f, tau, m, J, Jinv)
    out[0], out[1], out[2] = dp[0], dp[1], dp[2]
    out[3], out[4], out[5] = dv[0], dv[1], dv[2]
    out[6], out[7], out[8], out[9] = dq[0], dq[1], dq[2], dq[3]
    out[10], out[11], out[12] = dw[0], dw[1], dw[2]
    out[13] = s[14]
    out[14] = thdd
    return f, tau, thdd, lam, sat, d_perp, err_log, vlyap, pd3, qd4


@njit
def _run_kernel(
    s, n_steps, dt, stride,
    ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
    law_code, law_par, kp, kv, k_theta, lam_on,
    m, J, Jinv,
    dist_kind, dist_trig, dist_dv, dist_dw,
    out_state, out_extra, out_counts,
):
    """March the augmented state, filling export rows in place.

    Returns -1 on success, or the export row index where a non-finite
    component was first seen.
    """
    k1 = np.empty(15)
    k2 = np.empty(15)
    k3 = np.empty(15)
    k4 = np.empty(15)
    tmp = np.empty(15)
    hold = 0
    applied = 0
    switch_count = 0
    sat_count = 0
    completed_step = -1
    dist_step = -1
    prev_lam = 0.0
    row = 0
    for step in range(n_steps + 1):
        f, tau, thdd, lam, sat, d_perp, err_log, vlyap, pd3, qd4 = _rhs_into(
            s, k1, hold,
            ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
            law_code, law_par, kp, kv, k_theta, lam_on,
            m, J, Jinv,
        )
        if step > 0 and lam != prev_lam:
            switch_count += 1
        prev_lam = lam
        sat_count += sat
        if step % stride == 0:
            for j in range(15):
                out_state[row, j] = s[j]
            out_extra[row, 0] = d_perp
            out_extra[row, 1] = err_log
            out_extra[row, 2] = lam
            out_extra[row, 3] = f[0]
            out_extra[row, 4] = f[1]
            out_extra[row, 5] = f[2]
            out_extra[row, 6] = tau[0]
            out_extra[row, 7] = tau[1]
            out_extra[row, 8] = tau[2]
            out_extra[row, 9] = thdd
            out_extra[row, 10] = vlyap
            out_extra[row, 11] = pd3[0]
            out_extra[row, 12] = pd3[1]
            out_extra[row, 13] = pd3[2]
            out_extra[row, 14] = qd4[0]
            out_extra[row, 15] = qd4[1]
            out_extra[row, 16] = qd4[2]
            out_extra[row, 17] = qd4[3]
            ok = True
            for j in range(15):
                if not math.isfinite(s[j]):
                    ok = False
            if not ok:
                out_counts[0] = switch_count
                out_counts[1] = sat_count
                out_counts[2] = completed_step
                out_counts[3] = dist_step
                return row
            row += 1
        if step == n_steps:
            break
        # RK4 with the control evaluated in every stage (k1 is already done)
        for j in range(15):
            tmp[j] = s[j] + 0.5 * dt * k1[j]
        _rhs_into(tmp, k2, hold, ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
                  law_code, law_par, kp, kv, k_theta, lam_on, m, J, Jinv)
        for j in range(15):
            tmp[j] = s[j] + 0.5 * dt * k2[j]
        _rhs_into(tmp, k3, hold, ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
                  law_code, law_par, kp, kv, k_theta, lam_on, m, J, Jinv)
        for j in range(15):
            tmp[j] = s[j] + dt * k3[j]
        _rhs_into(tmp, k4, hold, ref_code, ref_par, breaks, pos_c, quat_c, th_lo, th_hi,
                  law_code, law_par, kp, kv, k_theta, lam_on, m, J, Jinv)
        for j in range(15):
            s[j] = s[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        qn = math.sqrt(s[6] * s[6] + s[7] * s[7] + s[8] * s[8] + s[9] * s[9])
        if qn > 0.0:
            s[6] /= qn
            s[7] /= qn
            s[8] /= qn
            s[9] /= qn
        # terminal hold: freeze theta at the end of the span
        if hold == 0 and s[13] >= th_hi:
            s[13] = th_hi
            s[14] = 0.0
            hold = 1
            completed_step = step + 1
        # one-shot disturbance
        if applied == 0 and dist_kind != 0:
            hit = False
            if dist_kind == 1:
                hit = s[13] >= dist_trig
            else:
                hit = (step + 1) * dt >= dist_trig - 1e-12
            if hit:
                s[3] += dist_dv[0]
                s[4] += dist_dv[1]
                s[5] += dist_dv[2]
                s[10] += dist_dw[0]
                s[11] += dist_dw[1]
                s[12] += dist_dw[2]
                applied = 1
                dist_step = step + 1
    out_counts[0] = switch_count
    out_counts[1] = sat_count
    out_counts[2] = completed_step
    out_counts[3] = dist_step
    return -1


@dataclass
class RunRecord:
    """Uniformly sampled trajectory of one closed-loop run."""

    label: str
    config_hash: str
    mode: str
    t: np.ndarray
    states: np.ndarray
    extras: np.ndarray
    switch_count: int
    sat_count: int
    completion_time: float
    disturbance_time: float
    dt: float
    convergence_tol: float
    convergence_sustain: float
    profile: Union[VelocityProfile, DistanceMap, None]
    gains: ControlGains
    reference: GeometricReference

    @property
    def theta(self):
        return self.states[:, 13]

    @property
    def theta_dot(self):
        return self.states[:, 14]

    @property
    def p(self):
        return self.states[:, 0:3]

    @property
    def v(self):
        return self.states[:, 3:6]

    @property
    def q(self):
        return self.states[:, 6:10]

    @property
    def w(self):
        return self.states[:, 10:13]

    @property
    def d_perp(self):
        return self.extras[:, _X_DPERP]

    @property
    def err_log_norm(self):
        return self.extras[:, _X_ERRLOG]

    @property
    def lam(self):
        return self.extras[:, _X_LAMBDA]

    @property
    def f(self):
        return self.extras[:, _X_F:_X_F + 3]

    @property
    def tau(self):
        return self.extras[:, _X_TAU:_X_TAU + 3]

    @property
    def theta_ddot(self):
        return self.extras[:, _X_THDD]

    @property
    def v_lyap(self):
        return self.extras[:, _X_V]

    @property
    def p_d(self):
        return self.extras[:, _X_PD:_X_PD + 3]

    @property
    def q_d(self):
        return self.extras[:, _X_QD:_X_QD + 4]

    @property
    def completed(self) -> bool:
        return math.isfinite(self.completion_time)


def _encode_law(mode: str, profile) -> tuple:
    if mode == "velocity":
        if profile.kind == "constant":
            return _LAW_CONSTANT, np.array([profile.base, 0.0, 0.0])
        return _LAW_SINUSOID, np.array([profile.base, profile.amplitude, profile.frequency])
    if mode == "distance":
        return _LAW_DISTANCE, np.array([profile.v_nom, profile.v_min, profile.d_scale])
    return _LAW_TRACKING, np.zeros(3)


def _encode_disturbance(d: Optional[Disturbance]) -> tuple:
    if d is None:
        return 0, 0.0, np.zeros(3), np.zeros(3)
    if d.theta_trigger is not None:
        return 1, float(d.theta_trigger), np.asarray(d.dv), np.asarray(d.dw)
    return 2, float(d.time_trigger), np.asarray(d.dv), np.asarray(d.dw)


def run_closed_loop(cfg: RunConfig) -> RunRecord:
    """Integrate the closed loop described by cfg and record the run."""
    ref = cfg.reference
    stride = cfg.export_stride
    n_steps = math.ceil(round(cfg.duration / cfg.dt, 9))
    n_steps = ((n_steps + stride - 1) // stride) * stride
    rows = n_steps // stride + 1
    out_state = np.empty((rows, 15))
    out_extra = np.empty((rows, _X_WIDTH))
    out_counts = np.full(4, -1, dtype=np.int64)

    s = np.empty(15)
    s[:STATE_SIZE] = cfg.x0
    s[13] = cfg.theta0
    s[14] = cfg.theta_dot0
    law_code, law_par = _encode_law(cfg.mode, cfg.profile)
    dist_kind, dist_trig, dist_dv, dist_dw = _encode_disturbance(cfg.disturbance)

    fail = _run_kernel(
        s, n_steps, cfg.dt, stride,
        ref.code, ref.params, ref.breaks, ref.pos_coefs, ref.quat_coefs,
        ref.theta0, ref.theta_f,
        law_code, law_par, cfg.gains.kp, cfg.gains.kv, cfg.gains.k_theta,
        1 if cfg.lambda_enabled else 0,
        cfg.params.mass, cfg.params.inertia, cfg.params.inertia_inv,
        dist_kind, dist_trig, dist_dv, dist_dw,
        out_state, out_extra, out_counts,
    )
    if fail >= 0:
        t_fail = fail * stride * cfg.dt
        raise NonFiniteState(f"simulation diverged: non-finite state at t={t_fail:.6g} s")

    t = np.arange(rows) * (stride * cfg.dt)
    completed_step = int(out_counts[2])
    dist_step = int(out_counts[3])
    return RunRecord(
        label=cfg.label,
        config_hash=cfg.config_hash,
        mode=cfg.mode,
        t=t,
        states=out_state,
        extras=out_extra,
        switch_count=int(out_counts[0]),
        sat_count=int(out_counts[1]),
        completion_time=completed_step * cfg.dt if completed_step >= 0 else math.nan,
        disturbance_time=dist_step * cfg.dt if dist_step >= 0 else math.nan,
        dt=cfg.dt,
        convergence_tol=cfg.convergence_tol,
        convergence_sustain=cfg.convergence_sustain,
        profile=cfg.profile,
        gains=cfg.gains,
        reference=ref,
    )


def inject_disturbance(x, d: Disturbance):
    """Apply the velocity impulse to a body state (pure, returns a copy)."""
    out = np.asarray(x, dtype=float).copy()
    out[3:6] += d.dv
    out[10:13] += d.dw
    return out


def matched_initial_state(ref: GeometricReference, theta: float, theta_dot: float):
    """Body state sitting on the reference with a twist matched to the
    reference rate, so the tracking errors start at exactly zero."""
    s = ref.evaluate(theta)
    x = np.empty(STATE_SIZE)
    x[0:3] = s.p
    x[3:6] = theta_dot * s.p1
    x[6:10] = s.q
    x[10:13] = theta_dot * s.w
    return x


def _first_sustained_below(t, series, tol, sustain) -> int:
    """Index of the first sample below tol that stays below for the whole
    sustain interval, or -1."""
    n = len(t)
    if n == 0:
        return -1
    if n == 1:
        return 0 if series[0] < tol else -1
    dt_row = t[1] - t[0]
    win = max(1, int(round(sustain / dt_row)) + 1)
    below = (series < tol).astype(np.int64)
    if win > n:
        return -1
    hits = np.convolve(below, np.ones(win, dtype=np.int64), mode="valid") == win
    idx = np.flatnonzero(hits)
    if idx.size == 0:
        return -1
    return int(idx[0])


def metrics(record: RunRecord) -> dict:
    """Scalar summary of one run."""
    t = record.t
    n = len(t)
    if n == 0:
        raise ValueError("empty run record")
    el = record.err_log_norm
    conv_i = _first_sustained_below(t, el, record.convergence_tol, record.convergence_sustain)
    conv_t = float(t[conv_i]) if conv_i >= 0 else math.nan
    theta_at_conv = float(record.theta[conv_i]) if conv_i >= 0 else math.nan

    max_d_post = math.nan
    if math.isfinite(record.disturbance_time):
        mask = t >= record.disturbance_time
        if np.any(mask):
            max_d_post = float(np.max(record.d_perp[mask]))

    final_mismatch = math.nan
    if isinstance(record.profile, VelocityProfile):
        final_mismatch = abs(
            float(record.theta_dot[-1]) - record.profile.value(float(record.theta[-1]))
        )
    elif isinstance(record.profile, DistanceMap):
        final_mismatch = abs(
            float(record.theta_dot[-1]) - record.profile.value(float(record.d_perp[-1]))
        )

    w_norm = np.linalg.norm(record.w, axis=1)
    rot_path = float(np.trapezoid(w_norm, t)) if n > 1 else 0.0

    dtheta = np.diff(record.theta)
    theta_monotone = bool(dtheta.size == 0 or float(np.min(dtheta)) >= -1e-12)

    post = t >= 5.0
    min_thd_post = float(np.min(record.theta_dot[post])) if np.any(post) else math.nan

    # energy diagnostic at 10 Hz after the switch activity settles; the
    # sign convention jumps at a lambda switch and the state jumps at the
    # disturbance, so sampling starts after both
    v_increase = math.nan
    if n > 1:
        dt_row = t[1] - t[0]
        lam = record.lam
        changes = np.flatnonzero(np.diff(lam) != 0.0)
        settle = t[changes[-1] + 1] + 1.0 if changes.size else t[0]
        settle = max(settle, 2.0)
        if math.isfinite(record.disturbance_time):
            settle = max(settle, record.disturbance_time + dt_row)
        k = max(1, int(round(0.1 / dt_row)))
        sub = np.flatnonzero(t >= settle)[::k]
        if sub.size >= 2:
            dv = np.diff(record.v_lyap[sub])
            v_increase = float(np.max(dv)) if dv.size else math.nan

    # declarative copy of the progress law so downstream consumers can
    # draw the assigned speed curve without touching the controller
    if record.mode == "tracking":
        law = {"kind": "tracking", "rate": float(record.theta_dot[0])}
    elif isinstance(record.profile, DistanceMap):
        law = {
            "kind": "distance",
            "v_nom": record.profile.v_nom,
            "v_min": record.profile.v_min,
            "d_scale": record.profile.d_scale,
        }
    else:
        law = {
            "kind": record.profile.kind,
            "base": record.profile.base,
            "amplitude": record.profile.amplitude,
            "frequency": record.profile.frequency,
        }

    return {
        "label": record.label,
        "config_hash": record.config_hash,
        "mode": record.mode,
        "progress_law": law,
        "duration": float(t[-1]),
        "completed": record.completed,
        "completion_time": record.completion_time,
        "convergence_time": conv_t,
        "theta_at_convergence": theta_at_conv,
        "final_err_log_norm": float(el[-1]),
        "final_theta": float(record.theta[-1]),
        "final_theta_dot": float(record.theta_dot[-1]),
        "final_profile_mismatch": final_mismatch,
        "max_d_perp_post_disturbance": max_d_post,
        "disturbance_time": record.disturbance_time,
        "lambda_switch_count": record.switch_count,
        "saturation_count": record.sat_count,
        "rotation_path_length": rot_path,
        "theta_monotone": theta_monotone,
        "min_theta_dot_after_5s": min_thd_post,
        "lyapunov_max_increase": v_increase,
    }


def _csv_matrix(record: RunRecord) -> np.ndarray:
    n = len(record.t)
    out = np.empty((n, len(CSV_COLUMNS)))
    out[:, 0] = record.t
    out[:, 1] = record.theta
    out[:, 2] = record.theta_dot
    out[:, 3:6] = record.p
    out[:, 6:10] = record.q
    out[:, 10:13] = record.p_d
    out[:, 13:17] = record.q_d
    out[:, 17] = record.d_perp
    out[:, 18] = record.err_log_norm
    out[:, 19] = record.lam
    out[:, 20:23] = record.f
    out[:, 23:26] = record.tau
    out[:, 26] = record.theta_ddot
    return out


def write_run_csv(record: RunRecord, path: Union[str, Path]) -> Path:
    path = Path(path)
    mat = _csv_matrix(record)
    lines = [",".join(CSV_COLUMNS)]
    for row in mat:
        lines.append(",".join(f"{x:.17g}" for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_summary(record: RunRecord, path: Union[str, Path]) -> Path:
    path = Path(path)
    m = {k: _jsonable(v) for k, v in metrics(record).items()}
    path.write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")
    return path


def export_run(record: RunRecord, outdir: Union[str, Path]) -> tuple:
    """Write <label>.csv and <label>.json under outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = write_run_csv(record, outdir / f"{record.label}.csv")
    json_path = write_summary(record, outdir / f"{record.label}.json")
    return csv_path, json_path
