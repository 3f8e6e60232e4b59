import numpy as np
import pytest

from posefollow import dq_algebra as dq
from posefollow.errors import AngleOutOfRange, NonUnitDualQuaternion, NonUnitRotation

from helpers import (
    dq_from_pose_oracle,
    dq_log_series_oracle,
    dq_mul_oracle,
    dq_sandwich_oracle,
    htm_from_pose,
    qmul_oracle,
    quat_to_rotmat,
    random_dq_with_angle,
    random_pose,
    random_unit_dq,
    random_unit_quat,
)

IDENTITY_DQ = np.array([1.0, 0, 0, 0, 0, 0, 0, 0])


def test_q_mul_identity():
    rng = np.random.default_rng(1)
    e = np.array([1.0, 0, 0, 0])
    for _ in range(20):
        q = random_unit_quat(rng)
        np.testing.assert_allclose(dq.q_mul(e, q), q, atol=0)
        np.testing.assert_allclose(dq.q_mul(q, e), q, atol=0)


def test_q_mul_basis_products():
    i = np.array([0.0, 1, 0, 0])
    j = np.array([0.0, 0, 1, 0])
    k = np.array([0.0, 0, 0, 1])
    np.testing.assert_array_equal(dq.q_mul(i, j), k)
    np.testing.assert_array_equal(dq.q_mul(j, k), i)
    np.testing.assert_array_equal(dq.q_mul(k, i), j)


def test_q_mul_conjugate_inverse():
    rng = np.random.default_rng(2)
    for _ in range(100):
        q = random_unit_quat(rng)
        r = dq.q_mul(q, dq.q_conj(q))
        np.testing.assert_allclose(r, [1, 0, 0, 0], atol=1e-12)


def test_q_mul_matches_matrix_oracle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = rng.normal(size=4)
        b = rng.normal(size=4)
        np.testing.assert_allclose(dq.q_mul(a, b), qmul_oracle(a, b), atol=1e-12)


def test_q_rotate_matches_rotation_matrix():
    rng = np.random.default_rng(4)
    for _ in range(100):
        q = random_unit_quat(rng)
        v = rng.normal(size=3)
        np.testing.assert_allclose(dq.q_rotate(q, v), quat_to_rotmat(q) @ v, atol=1e-12)


def test_q_normalize():
    rng = np.random.default_rng(5)
    q = 3.7 * random_unit_quat(rng)
    n = dq.q_normalize(q)
    assert abs(np.linalg.norm(n) - 1.0) < 1e-15
    np.testing.assert_allclose(n * 3.7, q, atol=1e-12)


def test_dq_mul_identity():
    rng = np.random.default_rng(6)
    a = random_unit_dq(rng)
    np.testing.assert_allclose(dq.dq_mul(IDENTITY_DQ, a), a, atol=0)
    np.testing.assert_allclose(dq.dq_mul(a, IDENTITY_DQ), a, atol=0)


def test_dq_mul_matches_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = rng.normal(size=8)
        b = rng.normal(size=8)
        np.testing.assert_allclose(dq.dq_mul(a, b), dq_mul_oracle(a, b), atol=1e-12)


def test_dq_conj_product_rule():
    rng = np.random.default_rng(8)
    for _ in range(100):
        a = random_unit_dq(rng)
        b = random_unit_dq(rng)
        lhs = dq.dq_conj(dq.dq_mul(a, b))
        rhs = dq.dq_mul(dq.dq_conj(b), dq.dq_conj(a))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_dq_conj_involution_and_identity():
    rng = np.random.default_rng(9)
    a = random_unit_dq(rng)
    np.testing.assert_array_equal(dq.dq_conj(dq.dq_conj(a)), a)
    np.testing.assert_array_equal(dq.dq_conj(IDENTITY_DQ), IDENTITY_DQ)


def test_dq_unit_inverse_and_preservation():
    rng = np.random.default_rng(10)
    for _ in range(200):
        a = random_unit_dq(rng)
        b = random_unit_dq(rng)
        np.testing.assert_allclose(dq.dq_mul(a, dq.dq_conj(a)), IDENTITY_DQ, atol=1e-12)
        ab = dq.dq_mul(a, b)
        unit_defect = dq.dq_mul(ab, dq.dq_conj(ab)) - IDENTITY_DQ
        assert np.max(np.abs(unit_defect)) < 1e-9


def test_pose_composition_matches_homogeneous_transforms():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        pa, qa = random_pose(rng)
        pb, qb = random_pose(rng)
        composed = dq.dq_mul(dq.dq_from_pose(pa, qa), dq.dq_from_pose(pb, qb))
        p, q = dq.dq_to_pose(composed)
        T = htm_from_pose(pa, qa) @ htm_from_pose(pb, qb)
        worst = max(worst, np.max(np.abs(p - T[:3, 3])))
        worst = max(worst, np.max(np.abs(quat_to_rotmat(q) - T[:3, :3])))
    assert worst < 1e-10


def test_dq_from_pose_trivial_cases():
    e = np.array([1.0, 0, 0, 0])
    np.testing.assert_array_equal(dq.dq_from_pose(np.zeros(3), e), IDENTITY_DQ)
    a = dq.dq_from_pose(np.array([1.0, 0, 0]), e)
    np.testing.assert_allclose(a, [1, 0, 0, 0, 0, 0.5, 0, 0], atol=0)


def test_dq_from_pose_rejects_non_unit_rotation():
    with pytest.raises(NonUnitRotation):
        dq.dq_from_pose(np.zeros(3), np.array([1.0, 0.01, 0, 0]))


def test_dq_to_pose_roundtrip():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        p, q = random_pose(rng)
        p2, q2 = dq.dq_to_pose(dq.dq_from_pose(p, q))
        np.testing.assert_allclose(p2, p, atol=1e-12)
        np.testing.assert_allclose(q2, q, atol=1e-12)


def test_dq_to_pose_trivial_cases():
    p, q = dq.dq_to_pose(IDENTITY_DQ)
    np.testing.assert_array_equal(p, np.zeros(3))
    np.testing.assert_array_equal(q, [1, 0, 0, 0])
    p, q = dq.dq_to_pose(np.array([1.0, 0, 0, 0, 0, 0.5, 0, 0]))
    np.testing.assert_allclose(p, [1, 0, 0], atol=0)
    np.testing.assert_array_equal(q, [1, 0, 0, 0])


def test_dq_to_pose_rejects_non_unit():
    rng = np.random.default_rng(13)
    a = 1.001 * random_unit_dq(rng)
    with pytest.raises(NonUnitDualQuaternion):
        dq.dq_to_pose(a)
    # orthogonality defect (real unit but real . dual != 0)
    b = random_unit_dq(rng)
    b[4:] += 0.01 * b[:4]
    with pytest.raises(NonUnitDualQuaternion):
        dq.dq_to_pose(b)


def test_dq_log_trivial_cases():
    np.testing.assert_array_equal(dq.dq_log(IDENTITY_DQ), np.zeros(6))
    # quarter turn about z, no translation
    qz = np.array([np.cos(np.pi / 4), 0, 0, np.sin(np.pi / 4)])
    a = dq.dq_from_pose(np.zeros(3), qz)
    np.testing.assert_allclose(dq.dq_log(a), [0, 0, np.pi / 4, 0, 0, 0], atol=1e-15)
    # pure translation
    b = dq.dq_from_pose(np.array([1.0, 2.0, 3.0]), np.array([1.0, 0, 0, 0]))
    np.testing.assert_allclose(dq.dq_log(b), [0, 0, 0, 0.5, 1.0, 1.5], atol=1e-15)


def test_dq_exp_zero_is_identity():
    np.testing.assert_array_equal(dq.dq_exp(np.zeros(6)), IDENTITY_DQ)


def test_exp_log_roundtrip_random():
    rng = np.random.default_rng(14)
    for _ in range(1000):
        angle = rng.uniform(1e-4, np.pi - 1e-4)
        a = random_dq_with_angle(rng, angle)
        np.testing.assert_allclose(dq.dq_exp(dq.dq_log(a)), a, atol=1e-9)


def test_exp_log_roundtrip_large_angles():
    # rotation magnitudes up to the 2*pi branch limit minus the documented margin
    rng = np.random.default_rng(15)
    for _ in range(200):
        angle = rng.uniform(np.pi, 2 * np.pi - 1e-3)
        a = random_dq_with_angle(rng, angle)
        np.testing.assert_allclose(dq.dq_exp(dq.dq_log(a)), a, atol=1e-9)


def test_log_exp_roundtrip_dual_vectors():
    rng = np.random.default_rng(16)
    for _ in range(500):
        v = rng.normal(size=6)
        n = np.linalg.norm(v[:3])
        limit = rng.uniform(1e-4, np.pi - 1e-4)
        v[:3] *= limit / n
        np.testing.assert_allclose(dq.dq_log(dq.dq_exp(v)), v, atol=1e-9)


def test_series_branch_near_identity():
    rng = np.random.default_rng(17)
    for _ in range(100):
        a = random_dq_with_angle(rng, 1e-8, scale=0.5)
        got = dq.dq_log(a)
        expect = dq_log_series_oracle(a)
        assert np.max(np.abs(got - expect)) < 1e-12
        back = dq.dq_exp(got)
        assert np.max(np.abs(back - a)) < 1e-12


def test_dq_exp_rejects_angle_out_of_range():
    v = np.zeros(6)
    v[0] = np.pi
    with pytest.raises(AngleOutOfRange):
        dq.dq_exp(v)
    v[0] = np.pi - 1e-9
    dq.dq_exp(v)  # just inside the domain


def test_adjoint_identity():
    rng = np.random.default_rng(18)
    v = rng.normal(size=8)
    np.testing.assert_allclose(dq.dq_adjoint(IDENTITY_DQ, v), v, atol=0)


def test_adjoint_pure_rotation_matches_matrix():
    rng = np.random.default_rng(19)
    for _ in range(100):
        q = random_unit_quat(rng)
        g = dq.dq_from_pose(np.zeros(3), q)
        x = rng.normal(size=3)
        v = np.array([0.0, x[0], x[1], x[2], 0, 0, 0, 0])
        out = dq.dq_adjoint(g, v)
        np.testing.assert_allclose(out[1:4], quat_to_rotmat(q) @ x, atol=1e-12)
        assert abs(out[0]) < 1e-12 and np.max(np.abs(out[4:])) < 1e-12


def test_adjoint_scalar_parts_stay_zero():
    rng = np.random.default_rng(20)
    for _ in range(200):
        g = random_unit_dq(rng)
        w = rng.normal(size=6)
        v = np.array([0.0, w[0], w[1], w[2], 0.0, w[3], w[4], w[5]])
        out = dq.dq_adjoint(g, v)
        assert abs(out[0]) < 1e-12
        assert abs(out[4]) < 1e-12


def test_adjoint_group_action():
    rng = np.random.default_rng(21)
    for _ in range(200):
        g1 = random_unit_dq(rng)
        g2 = random_unit_dq(rng)
        v = rng.normal(size=8)
        lhs = dq.dq_adjoint(dq.dq_mul(g1, g2), v)
        rhs = dq.dq_adjoint(g1, dq.dq_adjoint(g2, v))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_adjoint_twist_matches_sandwich():
    rng = np.random.default_rng(22)
    for _ in range(300):
        g = random_unit_dq(rng)
        w = rng.normal(size=6)
        fast = dq.adjoint_twist(g, w)
        v = np.array([0.0, w[0], w[1], w[2], 0.0, w[3], w[4], w[5]])
        sandwich = dq_sandwich_oracle(g, v)
        np.testing.assert_allclose(fast, np.concatenate([sandwich[1:4], sandwich[5:]]), atol=1e-12)


def test_gain_apply():
    rng = np.random.default_rng(23)
    v = rng.normal(size=6)
    np.testing.assert_array_equal(dq.gain_apply(np.ones(6), v), v)
    k = np.array([1.0, 2, 3, 4, 5, 6])
    np.testing.assert_array_equal(
        dq.gain_apply(k, np.ones(6)), np.array([1.0, 2, 3, 4, 5, 6])
    )
    np.testing.assert_allclose(dq.gain_apply(3.0 * np.ones(6), v), 3.0 * v, atol=0)


def test_double_cover_same_pose():
    rng = np.random.default_rng(24)
    for _ in range(100):
        p, q = random_pose(rng)
        a = dq.dq_from_pose(p, q)
        b = dq.dq_from_pose(p, -q)
        pa, qa = dq.dq_to_pose(a)
        pb, qb = dq.dq_to_pose(b)
        np.testing.assert_allclose(pa, pb, atol=1e-10)
        np.testing.assert_allclose(quat_to_rotmat(qa), quat_to_rotmat(qb), atol=1e-10)


def test_dq_normalize_projects_to_unit():
    rng = np.random.default_rng(25)
    for _ in range(100):
        a = random_unit_dq(rng)
        noisy = a + 1e-6 * rng.normal(size=8)
        n = dq.dq_normalize(noisy)
        defect = dq.dq_mul(n, dq.dq_conj(n)) - IDENTITY_DQ
        assert np.max(np.abs(defect)) < 1e-12
        assert np.max(np.abs(n - a)) < 1e-5
