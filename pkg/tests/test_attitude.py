"""Attitude representation and rigid-body dynamics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from cislunar_rvd import (dcm_to_mrp, euler_dynamics, mrp_kinematics,
                          mrp_shadow, mrp_to_dcm, vee)
from cislunar_rvd.attitude import assert_dcm, tilde, validate_inertia

INERTIA = np.diag([4500.0, 4500.0, 1500.0])


def quat_to_dcm(q):
    """Independent oracle: DCM from a unit quaternion (scalar first)."""
    b0, b1, b2, b3 = q
    return np.array([
        [b0**2 + b1**2 - b2**2 - b3**2, 2 * (b1 * b2 + b0 * b3),
         2 * (b1 * b3 - b0 * b2)],
        [2 * (b1 * b2 - b0 * b3), b0**2 - b1**2 + b2**2 - b3**2,
         2 * (b2 * b3 + b0 * b1)],
        [2 * (b1 * b3 + b0 * b2), 2 * (b2 * b3 - b0 * b1),
         b0**2 - b1**2 - b2**2 + b3**2],
    ])


def axis_angle_quat(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate(([np.cos(angle / 2)], np.sin(angle / 2) * axis))


class TestMrpDcm:
    @pytest.mark.parametrize("axis,angle", [
        ([1, 0, 0], 0.3), ([0, 1, 0], 1.2), ([0, 0, 1], 2.5),
        ([1, 1, 1], 3.0), ([1, -2, 0.5], 0.01), ([0.3, 0.1, -0.9], np.pi),
    ])
    def test_against_quaternion_oracle(self, axis, angle):
        q = axis_angle_quat(axis, angle)
        sigma = q[1:] / (1.0 + q[0])
        assert np.allclose(mrp_to_dcm(sigma), quat_to_dcm(q), atol=1e-13)

    def test_identity(self):
        assert np.allclose(mrp_to_dcm(np.zeros(3)), np.eye(3), atol=0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
    def test_round_trip(self, a, b, c):
        sigma = np.array([a, b, c])
        if np.linalg.norm(sigma) > 1.0:  # keep the short-rotation branch
            sigma = 0.99 * sigma / np.linalg.norm(sigma)
        C = mrp_to_dcm(sigma)
        assert_dcm(C)
        assert np.allclose(dcm_to_mrp(C), sigma, atol=1e-10)

    def test_shepperd_all_branches(self):
        # rotations near pi about each axis force each extraction branch
        for axis in np.eye(3):
            q = axis_angle_quat(axis, np.pi - 1e-3)
            C = quat_to_dcm(q)
            sigma = dcm_to_mrp(C)
            assert np.allclose(mrp_to_dcm(sigma), C, atol=1e-10)

    def test_long_rotation_returns_shadow_value(self):
        # dcm_to_mrp always returns the short rotation, ||sigma|| <= 1
        q = axis_angle_quat([0, 0, 1], 3.5)
        sigma = dcm_to_mrp(quat_to_dcm(q))
        assert np.linalg.norm(sigma) <= 1.0 + 1e-12


class TestShadow:
    def test_switch_preserves_attitude(self):
        sigma = np.array([0.9, 0.7, 0.4])  # norm > 1
        shadow = mrp_shadow(sigma)
        assert np.linalg.norm(shadow) < 1.0
        assert np.allclose(mrp_to_dcm(shadow), mrp_to_dcm(sigma), atol=1e-12)

    def test_inside_unit_ball_untouched(self):
        sigma = np.array([0.2, -0.3, 0.1])
        assert np.array_equal(mrp_shadow(sigma), sigma)


class TestKinematics:
    def test_matches_dcm_derivative(self):
        # sigma_dot must reproduce Cdot = -tilde(omega_B) C
        sigma = np.array([0.1, -0.2, 0.3])
        omega = np.array([0.02, 0.05, -0.01])
        h = 1e-7
        sdot = mrp_kinematics(sigma, omega)
        c_plus = mrp_to_dcm(sigma + h * sdot)
        c_minus = mrp_to_dcm(sigma - h * sdot)
        cdot_fd = (c_plus - c_minus) / (2.0 * h)
        cdot = -tilde(omega) @ mrp_to_dcm(sigma)
        assert np.allclose(cdot_fd, cdot, atol=1e-6)

    def test_zero_rate(self):
        assert np.array_equal(
            mrp_kinematics(np.array([0.3, 0.1, -0.2]), np.zeros(3)),
            np.zeros(3))


class TestEulerDynamics:
    def test_torque_free_conserves_energy_and_momentum(self):
        omega0 = np.array([0.3, -0.2, 0.5])

        def rhs(_, w):
            return euler_dynamics(w, np.zeros(3), INERTIA)

        sol = solve_ivp(rhs, (0.0, 50.0), omega0, method="DOP853",
                        rtol=1e-12, atol=1e-12)
        w = sol.y[:, -1]
        e0 = 0.5 * omega0 @ INERTIA @ omega0
        e1 = 0.5 * w @ INERTIA @ w
        h0 = np.linalg.norm(INERTIA @ omega0)
        h1 = np.linalg.norm(INERTIA @ w)
        assert e1 == pytest.approx(e0, rel=1e-10)
        assert h1 == pytest.approx(h0, rel=1e-10)

    def test_principal_axis_spin_is_steady(self):
        omega = np.array([0.0, 0.0, 0.7])
        assert np.allclose(euler_dynamics(omega, np.zeros(3), INERTIA),
                           np.zeros(3), atol=1e-15)

    def test_applied_moment_about_principal_axis(self):
        m = np.array([0.0, 0.0, 3.0])
        wdot = euler_dynamics(np.zeros(3), m, INERTIA)
        assert np.allclose(wdot, m / np.diag(INERTIA), atol=1e-15)


class TestHelpers:
    def test_tilde_vee_round_trip(self):
        w = np.array([0.3, -1.2, 0.7])
        assert np.allclose(vee(tilde(w)), w, atol=0)
        assert np.allclose(tilde(w) @ np.array([1.0, 2.0, 3.0]),
                           np.cross(w, [1.0, 2.0, 3.0]), atol=0)

    def test_vee_rejects_symmetric_input(self):
        with pytest.raises(ValueError):
            vee(np.eye(3))

    def test_validate_inertia(self):
        validate_inertia(INERTIA)
        with pytest.raises(ValueError):
            validate_inertia(np.diag([1.0, 1.0, -1.0]))
        with pytest.raises(ValueError):
            validate_inertia(np.diag([1.0, 1.0, 5.0]))  # triangle inequality
        bad = INERTIA.copy()
        bad[0, 1] = 100.0
        with pytest.raises(ValueError):
            validate_inertia(bad)

    def test_assert_dcm(self):
        assert_dcm(np.eye(3))
        with pytest.raises(ValueError):
            assert_dcm(2.0 * np.eye(3))
        with pytest.raises(ValueError):
            assert_dcm(np.diag([1.0, 1.0, -1.0]))  # reflection
