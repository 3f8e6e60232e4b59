import numpy as np
import pytest

from posefollow import controller as ctl
from posefollow import error_dynamics as ed
from posefollow import reference as ref
from posefollow import rigid_body as rb
from posefollow.dq_algebra import dq_from_pose, dq_log, dual_cross
from posefollow.errors import ConfigInvalid, InvalidGains, UnknownVariant
from posefollow.tolerances import THETA_DDOT_LIMIT

from helpers import random_unit_quat
from sampling import random_error_tuple

PARAMS = rb.BodyParams(mass=1.0, inertia=np.diag([0.01, 0.01, 0.01]))
GAINS = ctl.ControlGains(kp=3.0, kv=3.0, k_theta=1.0)


def test_gains_accept_scalar_and_vector_forms():
    g = ctl.ControlGains(kp=3.0, kv=3.0, k_theta=1.0)
    np.testing.assert_array_equal(g.kp, 3.0 * np.ones(6))
    np.testing.assert_array_equal(g.kv, 3.0 * np.ones(6))
    g2 = ctl.ControlGains(kp=[1, 2, 3, 5, 5, 5], kv=[1, 1, 1, 2, 2, 2])
    np.testing.assert_array_equal(g2.kp, [1, 2, 3, 5, 5, 5])
    assert not g2.kp.flags.writeable


@pytest.mark.parametrize(
    "kp,kv,kth",
    [
        ([0, 1, 1, 1, 1, 1], 3.0, 1.0),
        ([1, 1, 1, 1, 1, -1], 3.0, 1.0),
        (3.0, [1, 1, 1, 0, 1, 1], 1.0),
        (3.0, 3.0, 0.0),
        (3.0, 3.0, -2.0),
        (np.nan, 3.0, 1.0),
        (3.0, [1, 1, 1, 1, 1, np.inf], 1.0),
    ],
)
def test_gains_reject_nonpositive_or_nonfinite(kp, kv, kth):
    with pytest.raises(InvalidGains):
        ctl.ControlGains(kp=kp, kv=kv, k_theta=kth)


def test_gains_reject_unequal_kp_dual_parts():
    with pytest.raises(InvalidGains):
        ctl.ControlGains(kp=[3, 3, 3, 3, 3, 2.9], kv=3.0)
    # only k_p carries the constraint, k_v dual parts may differ
    g = ctl.ControlGains(kp=3.0, kv=[3, 3, 3, 1, 2, 3])
    np.testing.assert_array_equal(g.kv, [3, 3, 3, 1, 2, 3])


def test_gains_reject_bad_shape():
    with pytest.raises(InvalidGains):
        ctl.ControlGains(kp=[1, 2, 3], kv=3.0)


def test_lambda_switch_cases():
    ident = np.zeros(8)
    ident[0] = 1.0
    assert ctl.lambda_switch(ident) == 1.0
    assert ctl.lambda_switch(-ident) == -1.0
    boundary = np.zeros(8)
    boundary[3] = 1.0
    assert ctl.lambda_switch(boundary) == 1.0


def test_feedback_zero_at_both_equilibria():
    ident = np.zeros(8)
    ident[0] = 1.0
    zero6 = np.zeros(6)
    np.testing.assert_allclose(ctl.feedback(ident, zero6, GAINS), zero6, atol=0)
    np.testing.assert_allclose(ctl.feedback(-ident, zero6, GAINS), zero6, atol=1e-15)


def test_feedback_pure_translation_error():
    d = 0.37
    qhat_e = dq_from_pose(np.array([d, 0.0, 0.0]), np.array([1.0, 0, 0, 0]))
    u = ctl.feedback(qhat_e, np.zeros(6), GAINS)
    np.testing.assert_allclose(u[:3], np.zeros(3), atol=1e-15)
    np.testing.assert_allclose(u[3:], [-3.0 * d, 0.0, 0.0], atol=1e-12)


def test_feedback_rate_term():
    ident = np.zeros(8)
    ident[0] = 1.0
    w = np.array([0.1, -0.2, 0.3, 0.4, -0.5, 0.6])
    u = ctl.feedback(ident, w, GAINS)
    np.testing.assert_allclose(u, -3.0 * w, atol=1e-15)


def test_feedback_lambda_symmetry_and_ablation():
    rng = np.random.default_rng(70)
    half = 2.0  # rotation angle 4 rad, scalar part negative
    q = np.array([np.cos(half), 0.0, 0.0, np.sin(half)])
    qhat_e = dq_from_pose(rng.normal(size=3), q)
    w = rng.normal(size=6)
    with_switch = ctl.feedback(qhat_e, w, GAINS)
    mirrored = ctl.feedback(-qhat_e, w, GAINS)
    np.testing.assert_allclose(with_switch, mirrored, atol=1e-12)
    # switch off: the same raw error is driven the long way around
    ablated = ctl.feedback(qhat_e, w, GAINS, lambda_enabled=False)
    assert np.linalg.norm(ablated - with_switch) > 0.1


def test_feedback_antipode_is_finite():
    anti = np.zeros(8)
    anti[0] = -1.0
    u = ctl.feedback(anti, np.zeros(6), GAINS, lambda_enabled=False)
    assert np.all(np.isfinite(u))
    np.testing.assert_allclose(u[:3], np.zeros(3), atol=0)


def test_feedforward_static_reference():
    rng = np.random.default_rng(71)
    p, q = rng.normal(size=3), random_unit_quat(rng)
    desired = ref.DesiredDualState(
        qhat_d=dq_from_pose(p, q), what_d=np.zeros(6), what_d_dot=np.zeros(6)
    )
    x = rb.make_state(rng.normal(size=3), np.zeros(3), random_unit_quat(rng), np.zeros(3))
    u_ff = ctl.feedforward(x, desired, 0.7, -0.3, PARAMS)
    np.testing.assert_allclose(u_ff, np.zeros(6), atol=1e-15)


def test_feedforward_regulation_case_is_minus_drift():
    rng = np.random.default_rng(72)
    for _ in range(20):
        x, _, desired, _ = random_error_tuple(rng)
        u_ff = ctl.feedforward(x, desired, 0.0, 0.0, PARAMS)
        np.testing.assert_allclose(u_ff, -rb.drift_term(x, PARAMS), atol=1e-12)


def test_cancellation_identity_random_tuples():
    # closing the loop with feedforward + feedback must leave exactly the
    # feedback term as the error acceleration
    rng = np.random.default_rng(73)
    worst = 0.0
    for _ in range(10_000):
        x, _, desired, theta_dot = random_error_tuple(rng)
        theta_ddot = rng.normal()
        qhat, what = rb.to_dual_state(x)
        qhat_e = ed.pose_error(qhat, desired.qhat_d)
        what_e = ed.twist_error_adjoint(what, theta_dot, qhat_e, desired.what_d)
        u_fb = ctl.feedback(qhat_e, what_e, GAINS)
        u_ff = ctl.feedforward(x, desired, theta_dot, theta_ddot, PARAMS)
        out = ed.error_accel(x, theta_dot, theta_ddot, u_ff + u_fb, desired, PARAMS)
        worst = max(worst, np.max(np.abs(out - u_fb)))
    assert worst < 1e-10


def test_velocity_profile_validation():
    with pytest.raises(UnknownVariant):
        ctl.VelocityProfile(kind="quadratic", base=0.1)
    with pytest.raises(ConfigInvalid):
        ctl.VelocityProfile(kind="constant", base=0.0)
    with pytest.raises(ConfigInvalid):
        ctl.VelocityProfile(kind="constant", base=0.1, amplitude=0.05)
    with pytest.raises(ConfigInvalid):
        # profile must stay positive
        ctl.VelocityProfile(kind="sinusoidal", base=0.05, amplitude=0.05, frequency=1.0)
    with pytest.raises(ConfigInvalid):
        ctl.VelocityProfile(kind="sinusoidal", base=0.05, amplitude=0.01, frequency=0.0)


def test_velocity_profile_values():
    p = ctl.VelocityProfile(kind="constant", base=0.075)
    assert p.value(3.0) == 0.075
    assert p.slope(3.0) == 0.0
    s = ctl.VelocityProfile(kind="sinusoidal", base=0.047, amplitude=0.028, frequency=1.0)
    assert s.value(0.0) == pytest.approx(0.047)
    assert s.value(np.pi / 2) == pytest.approx(0.075)
    assert s.slope(0.0) == pytest.approx(0.028)


def test_velocity_assignment_trivial_cases():
    fast = ctl.VelocityProfile(kind="constant", base=0.075)
    assert ctl.pose_param_velocity_assignment(1.0, 0.075, fast, 1.0) == 0.0
    assert ctl.pose_param_velocity_assignment(1.0, 0.0, fast, 1.0) == pytest.approx(0.075)


def test_velocity_assignment_exact_decay():
    # the mismatch theta_dot - v(theta) obeys a pure linear decay; RK4 at
    # dt=1e-3 holds it to far better than 1e-6
    profile = ctl.VelocityProfile(kind="sinusoidal", base=0.047, amplitude=0.028, frequency=1.0)
    k_theta = 1.0
    dt = 1e-3
    theta, theta_dot = 0.3, 0.9
    delta0 = theta_dot - profile.value(theta)

    def rhs(y):
        th, thd = y
        return np.array(
            [thd, ctl.pose_param_velocity_assignment(th, thd, profile, k_theta)]
        )

    y = np.array([theta, theta_dot])
    t = 0.0
    worst = 0.0
    for i in range(8000):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
        if i % 500 == 0:
            delta = y[1] - profile.value(y[0])
            worst = max(worst, abs(delta - delta0 * np.exp(-k_theta * t)))
    assert worst < 1e-6


def test_distance_map_validation_and_values():
    with pytest.raises(ConfigInvalid):
        ctl.DistanceMap(v_nom=0.1, v_min=0.2, d_scale=1.0)
    with pytest.raises(ConfigInvalid):
        ctl.DistanceMap(v_nom=0.1, v_min=0.0, d_scale=1.0)
    with pytest.raises(ConfigInvalid):
        ctl.DistanceMap(v_nom=0.1, v_min=0.05, d_scale=0.0)
    m = ctl.DistanceMap(v_nom=0.35, v_min=0.02, d_scale=0.8)
    assert m.value(0.0) == pytest.approx(0.35)
    assert m.value(50.0) == pytest.approx(0.02)
    assert m.value(0.8) == pytest.approx(0.02 + 0.33 * np.exp(-1.0))


def test_distance_maps_ordered():
    prog = ctl.distance_map_preset("progressive")
    med = ctl.distance_map_preset("medium")
    cons = ctl.distance_map_preset("conservative")
    ds = np.linspace(0.0, 5.0, 200)
    vp = np.array([prog.value(d) for d in ds])
    vm = np.array([med.value(d) for d in ds])
    vc = np.array([cons.value(d) for d in ds])
    assert np.all(vp >= vm) and np.all(vm >= vc)
    assert np.any(vp > vm) and np.any(vm > vc)
    with pytest.raises(UnknownVariant):
        ctl.distance_map_preset("aggressive")


def test_distance_feedback_values():
    m = ctl.distance_map_preset("medium")
    out = ctl.pose_param_distance_feedback(0.1, 0.0, m, 1.0)
    assert out == pytest.approx(-(0.1 - m.value(0.0)))
    far = ctl.pose_param_distance_feedback(0.5, 100.0, m, 2.0)
    assert far == pytest.approx(-2.0 * (0.5 - m.v_min))


def test_perp_distance():
    p_d = np.array([1.0, 2.0, 3.0])
    tangent = np.array([2.0, 0.0, 0.0])
    assert ctl.perp_distance(p_d, p_d, tangent) == 0.0
    assert ctl.perp_distance(p_d + [5.0, 0, 0], p_d, tangent) == pytest.approx(0.0)
    assert ctl.perp_distance(p_d + [3.0, 0.4, 0], p_d, tangent) == pytest.approx(0.4)
    # degenerate tangent falls back to the full distance
    assert ctl.perp_distance(p_d + [0, 3, 4], p_d, np.zeros(3)) == pytest.approx(5.0)


def _matched_state(r, theta, theta_dot):
    s = r.evaluate(theta)
    return rb.make_state(s.p, theta_dot * s.p1, s.q, theta_dot * s.w)


def test_compute_control_equilibrium_feedback_free():
    r = ref.build_helix3d()
    theta, theta_dot = 1.2, 0.5
    x = _matched_state(r, theta, theta_dot)
    aug = ctl.AugmentedState(x=x, theta=theta, theta_dot=theta_dot)
    profile = ctl.VelocityProfile(kind="constant", base=theta_dot)
    wrench, theta_ddot = ctl.compute_control(
        aug, r, GAINS, PARAMS, mode="velocity", profile=profile
    )
    assert theta_ddot == pytest.approx(0.0, abs=1e-12)
    d = ref.eval_desired(r, theta)
    u_ff = ctl.feedforward(x, d, theta_dot, theta_ddot, PARAMS)
    expect = rb.wrench_from_control(u_ff, x, PARAMS)
    np.testing.assert_allclose(wrench.f, expect.f, atol=1e-9)
    np.testing.assert_allclose(wrench.tau, expect.tau, atol=1e-9)


def test_compute_control_tracking_mode_zero_virtual_input():
    r = ref.build_helix3d()
    x = _matched_state(r, 2.0, 0.3)
    aug = ctl.AugmentedState(x=x, theta=2.0, theta_dot=0.3)
    _, theta_ddot = ctl.compute_control(aug, r, GAINS, PARAMS, mode="tracking")
    assert theta_ddot == 0.0


def test_compute_control_mode_validation():
    r = ref.build_helix3d()
    x = _matched_state(r, 2.0, 0.3)
    aug = ctl.AugmentedState(x=x, theta=2.0, theta_dot=0.3)
    with pytest.raises(UnknownVariant):
        ctl.compute_control(aug, r, GAINS, PARAMS, mode="warp")
    with pytest.raises(ConfigInvalid):
        ctl.compute_control(aug, r, GAINS, PARAMS, mode="velocity")
    with pytest.raises(ConfigInvalid):
        ctl.compute_control(
            aug, r, GAINS, PARAMS, mode="distance",
            profile=ctl.VelocityProfile(kind="constant", base=0.1),
        )


def test_compute_control_saturates_virtual_input():
    r = ref.build_helix3d()
    x = _matched_state(r, 2.0, 0.0)
    aug = ctl.AugmentedState(x=x, theta=2.0, theta_dot=-50.0)
    hot = ctl.ControlGains(kp=3.0, kv=3.0, k_theta=100.0)
    profile = ctl.VelocityProfile(kind="constant", base=0.075)
    _, theta_ddot = ctl.compute_control(
        aug, r, hot, PARAMS, mode="velocity", profile=profile
    )
    assert theta_ddot == THETA_DDOT_LIMIT


def test_compute_control_clamps_theta_to_span():
    r = ref.build_helix3d()
    x = _matched_state(r, r.theta_f, 0.0)
    beyond = ctl.AugmentedState(x=x, theta=r.theta_f + 0.5, theta_dot=0.0)
    at_end = ctl.AugmentedState(x=x, theta=r.theta_f, theta_dot=0.0)
    profile = ctl.VelocityProfile(kind="constant", base=0.075)
    w1, a1 = ctl.compute_control(beyond, r, GAINS, PARAMS, mode="velocity", profile=profile)
    w2, a2 = ctl.compute_control(at_end, r, GAINS, PARAMS, mode="velocity", profile=profile)
    np.testing.assert_array_equal(w1.f, w2.f)
    np.testing.assert_array_equal(w1.tau, w2.tau)
    assert a1 == a2


def test_dual_cross_matches_block_form():
    rng = np.random.default_rng(74)
    for _ in range(50):
        a, b = rng.normal(size=6), rng.normal(size=6)
        out = dual_cross(a, b)
        np.testing.assert_allclose(out[:3], np.cross(a[:3], b[:3]), atol=1e-14)
        np.testing.assert_allclose(
            out[3:], np.cross(a[:3], b[3:]) + np.cross(a[3:], b[:3]), atol=1e-14
        )


def test_log_antipode_finite():
    anti = np.zeros(8)
    anti[0] = -1.0
    anti[5] = 0.25  # dual part encoding a translation
    y = dq_log(anti)
    assert np.all(np.isfinite(y))
    np.testing.assert_allclose(y[:3], np.zeros(3), atol=0)
