"""Translational dynamics: equilibria, conservation, Jacobians, Sun terms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cislunar_rvd import (SingularityError, SystemParams, jacobi_constant,
                          linearize_translational, pseudo_potentials,
                          sun_position, translational_derivative)

MU = 0.01215


def collinear_equilibrium_x(mu, bracket):
    """Independent oracle: root of the collinear equilibrium equation
    x - (1-mu)(x+mu)/|x+mu|^3 - mu(x+mu-1)/|x+mu-1|^3 = 0 by bisection."""
    def f(x):
        return (x - (1.0 - mu) * (x + mu) / abs(x + mu) ** 3
                - mu * (x + mu - 1.0) / abs(x + mu - 1.0) ** 3)
    lo, hi = bracket
    assert f(lo) * f(hi) < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestEquilibria:
    def test_l1_is_an_equilibrium(self, em_params):
        x_l1 = collinear_equilibrium_x(MU, (0.5, 1.0 - MU - 1e-6))
        state = np.array([x_l1, 0.0, 0.0, 0.0, 0.0, 0.0])
        ds = translational_derivative(0.0, state, np.zeros(3), em_params)
        assert np.max(np.abs(ds)) < 1e-12

    def test_l2_is_an_equilibrium(self, em_params):
        x_l2 = collinear_equilibrium_x(MU, (1.0 - MU + 1e-6, 1.5))
        state = np.array([x_l2, 0.0, 0.0, 0.0, 0.0, 0.0])
        ds = translational_derivative(0.0, state, np.zeros(3), em_params)
        assert np.max(np.abs(ds)) < 1e-12
        # L2 lies beyond the Moon
        assert x_l2 > 1.0 - MU


class TestDerivative:
    def test_matches_pseudo_potential_gradient(self, em_params):
        # acceleration = grad U + Coriolis; check grad U by central FD on U
        state = np.array([0.8, 0.15, -0.1, 0.02, -0.01, 0.03])
        ds = translational_derivative(0.0, state, np.zeros(3), em_params)
        h = 1e-6
        grad = np.zeros(3)
        for i in range(3):
            sp = state.copy()
            sm = state.copy()
            sp[i] += h
            sm[i] -= h
            up, _ = pseudo_potentials(sp, 0.0, em_params)
            um, _ = pseudo_potentials(sm, 0.0, em_params)
            grad[i] = (up - um) / (2.0 * h)
        coriolis = np.array([2.0 * state[4], -2.0 * state[3], 0.0])
        assert np.allclose(ds[3:], grad + coriolis, atol=5e-9)

    def test_thrust_enters_additively(self, em_params):
        state = np.array([0.9, 0.05, -0.15, 0.01, 0.02, -0.01])
        u = np.array([1e-3, -2e-3, 5e-4])
        d0 = translational_derivative(0.0, state, np.zeros(3), em_params)
        d1 = translational_derivative(0.0, state, u, em_params)
        assert np.array_equal(d1[:3], d0[:3])
        assert np.allclose(d1[3:] - d0[3:], u, rtol=1e-12, atol=1e-18)

    def test_sun_free_limit_bit_identical(self, em_params, full_params):
        """mu_sun = 0 must recover the three-body field exactly (the Sun
        terms contribute an exact +0.0), so governed runs in either system
        share code paths bit-for-bit."""
        zero_sun = SystemParams(mu=full_params.mu, mu_sun=0.0)
        rng = np.random.default_rng(7)
        for _ in range(20):
            state = np.array([0.9, 0.0, -0.15, 0.0, -0.1, 0.0])
            state += rng.normal(0.0, 0.05, 6)
            a = translational_derivative(1.23, state, np.zeros(3), em_params)
            b = translational_derivative(1.23, state, np.zeros(3), zero_sun)
            assert np.array_equal(a, b)

    def test_singularity_floor_raises(self, em_params):
        state = np.array([1.0 - MU, 0.0, 0.0, 0.0, 0.0, 0.0])  # at the Moon
        with pytest.raises(SingularityError):
            translational_derivative(0.0, state, np.zeros(3), em_params)


class TestSun:
    def test_sun_circles_the_barycenter(self, full_params):
        p = full_params
        for tau in (0.0, 0.7, 2.3):
            xs = sun_position(tau, p)
            assert np.isclose(np.linalg.norm(xs), p.a_sun)
            theta = p.omega_sun * tau + p.theta0
            assert np.allclose(
                xs, p.a_sun * np.array([np.cos(theta), np.sin(theta), 0.0]))

    def test_sun_gravity_pulls_toward_sun(self, em_params, full_params):
        state = np.array([0.9, 0.1, -0.1, 0.0, 0.0, 0.0])
        d3 = translational_derivative(0.0, state, np.zeros(3), em_params)
        d4 = translational_derivative(0.0, state, np.zeros(3), full_params)
        diff = d4[3:] - d3[3:]
        # tidal acceleration: toward the Sun relative to the barycenter pull
        xs = sun_position(0.0, full_params)
        direct = full_params.mu_sun * (xs - state[:3]) / \
            np.linalg.norm(xs - state[:3]) ** 3
        indirect = full_params.mu_sun * xs / full_params.a_sun ** 3
        assert np.allclose(diff, direct - indirect, rtol=1e-12)

    def test_gamma_potential_gradient(self, full_params):
        state = np.array([0.85, -0.1, 0.05, 0.0, 0.0, 0.0])
        tau = 0.37
        h = 1e-6
        grad = np.zeros(3)
        for i in range(3):
            sp, sm = state.copy(), state.copy()
            sp[i] += h
            sm[i] -= h
            _, gp = pseudo_potentials(sp, tau, full_params)
            _, gm = pseudo_potentials(sm, tau, full_params)
            grad[i] = (gp - gm) / (2.0 * h)
        zero_sun = SystemParams(mu=full_params.mu, mu_sun=0.0)
        d_sun = translational_derivative(tau, state, np.zeros(3), full_params)
        d_nosun = translational_derivative(tau, state, np.zeros(3), zero_sun)
        assert np.allclose(d_sun[3:] - d_nosun[3:], grad, atol=5e-8)


class TestJacobian:
    @pytest.mark.parametrize("sun", [False, True])
    def test_matches_central_differences(self, em_params, full_params, sun):
        params = full_params if sun else em_params
        rng = np.random.default_rng(42)
        tau = 0.9
        for _ in range(10):
            state = np.array([0.95, 0.0, -0.12, 0.0, -0.1, 0.0])
            state += rng.normal(0.0, 0.05, 6)
            A, B = linearize_translational(tau, state, params)
            h = 1e-6
            for j in range(6):
                sp, sm = state.copy(), state.copy()
                sp[j] += h
                sm[j] -= h
                col = (translational_derivative(tau, sp, np.zeros(3), params)
                       - translational_derivative(tau, sm, np.zeros(3),
                                                  params)) / (2.0 * h)
                scale = np.maximum(np.abs(A[:, j]), 1.0)
                assert np.max(np.abs(A[:, j] - col) / scale) < 1e-5
            assert np.array_equal(B[3:], np.eye(3))
            assert np.array_equal(B[:3], np.zeros((3, 3)))

    def test_gravity_hessian_is_traceless(self, em_params):
        # Laplace: the spatial Hessian of the gravitational part has zero
        # trace, so diag(A) over the acceleration block sums to the
        # centrifugal 2.
        state = np.array([0.9, 0.2, -0.1, 0.0, 0.0, 0.0])
        A, _ = linearize_translational(0.0, state, em_params)
        assert np.isclose(A[3, 0] + A[4, 1] + A[5, 2], 2.0, atol=1e-12)

    def test_hessian_symmetry(self, full_params):
        state = np.array([0.85, 0.1, 0.05, 0.0, 0.0, 0.0])
        A, _ = linearize_translational(0.4, state, full_params)
        H = A[3:, :3]
        assert np.allclose(H, H.T, atol=0)


class TestJacobi:
    def test_formula_against_manual_evaluation(self, em_params):
        state = np.array([0.5, 0.3, 0.1, 0.01, -0.02, 0.005])
        x, y, z = state[:3]
        r1 = np.hypot(np.hypot(x + MU, y), z)
        r2 = np.hypot(np.hypot(x + MU - 1.0, y), z)
        expected = (x * x + y * y + 2.0 * (1.0 - MU) / r1 + 2.0 * MU / r2
                    - state[3] ** 2 - state[4] ** 2 - state[5] ** 2)
        assert jacobi_constant(state, em_params) == pytest.approx(
            expected, rel=1e-15)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
    def test_velocity_direction_invariance(self, vx, vy, vz):
        """C depends on speed only, not on velocity direction."""
        params = SystemParams(mu=MU)
        pos = np.array([0.8, 0.1, -0.05])
        v = np.array([vx, vy, vz])
        speed = np.linalg.norm(v)
        s1 = np.concatenate((pos, v))
        s2 = np.concatenate((pos, [speed, 0.0, 0.0]))
        assert jacobi_constant(s1, params) == pytest.approx(
            jacobi_constant(s2, params), abs=1e-12)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            SystemParams(mu=0.0)
        with pytest.raises(ValueError):
            SystemParams(mu=0.7)
        with pytest.raises(ValueError):
            SystemParams(mu=MU, mu_sun=-1.0)
        with pytest.raises(ValueError):
            SystemParams(mu=MU, a_sun=0.5)

    def test_primary_positions(self, em_params):
        assert np.allclose(em_params.earth_position, [-MU, 0.0, 0.0])
        assert np.allclose(em_params.moon_position, [1.0 - MU, 0.0, 0.0])
