"""Translational dynamics of the bicircular restricted four-body problem.

Everything is expressed in the nondimensional Earth-Moon rotating barycentric
frame: length unit LU = Earth-Moon distance, time unit TU = inverse lunar mean
motion.  The Earth sits at (-mu, 0, 0), the Moon at (1-mu, 0, 0), and the Sun
moves on a circle of radius ``a_sun`` about the barycenter.  Setting
``mu_sun = 0`` recovers the circular restricted three-body problem.

Translational states are plain ``(6,)`` float arrays ``[x, y, z, vx, vy, vz]``.
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import SingularityError

DEFAULT_SINGULARITY_FLOOR = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Constants of the Earth-Moon-Sun system and nondimensionalization scales.

    mu             Moon / (Earth + Moon) mass ratio
    mu_sun         Sun / (Earth + Moon) mass ratio; 0 disables the Sun
    a_sun          Sun distance from the Earth-Moon barycenter [LU]
    omega_sun      Sun angular rate in the rotating frame [rad/TU]
    theta0         initial Sun angle from the Earth-Moon line [rad]
    length_unit_km LU -> km
    time_unit_s    TU -> s
    """

    mu: float
    mu_sun: float = 0.0
    a_sun: float = 388.811143
    omega_sun: float = -0.9252
    theta0: float = 0.0
    length_unit_km: float = 384399.0
    time_unit_s: float = 375200.0
    singularity_floor: float = DEFAULT_SINGULARITY_FLOOR

    def __post_init__(self):
        if not 0.0 < self.mu < 0.5:
            raise ValueError(f"mu must be in (0, 0.5), got {self.mu}")
        if self.mu_sun < 0.0:
            raise ValueError(f"mu_sun must be >= 0, got {self.mu_sun}")
        if self.a_sun <= 1.0:
            raise ValueError(f"a_sun must exceed 1 LU, got {self.a_sun}")
        if self.length_unit_km <= 0.0 or self.time_unit_s <= 0.0:
            raise ValueError("length_unit_km and time_unit_s must be positive")
        if self.singularity_floor <= 0.0:
            raise ValueError("singularity_floor must be positive")

    def as_array(self):
        """Pack the dynamics constants for the jitted kernels."""
        return np.array(
            [self.mu, self.mu_sun, self.a_sun, self.omega_sun, self.theta0,
             self.singularity_floor]
        )

    @property
    def earth_position(self):
        return np.array([-self.mu, 0.0, 0.0])

    @property
    def moon_position(self):
        return np.array([1.0 - self.mu, 0.0, 0.0])


# Index meanings for the packed parameter array used by the kernels:
# 0 mu, 1 mu_sun, 2 a_sun, 3 omega_sun, 4 theta0, 5 singularity floor.


@njit(cache=True)
def _sun_xy(tau, p):
    theta = p[3] * tau + p[4]
    return p[2] * np.cos(theta), p[2] * np.sin(theta)


@njit(cache=True)
def _separations(tau, x, y, z, p):
    mu = p[0]
    r1 = np.sqrt((x + mu) * (x + mu) + y * y + z * z)
    r2 = np.sqrt((x + mu - 1.0) * (x + mu - 1.0) + y * y + z * z)
    xs, ys = _sun_xy(tau, p)
    rs = np.sqrt((x - xs) * (x - xs) + (y - ys) * (y - ys) + z * z)
    return r1, r2, rs


@njit(cache=True)
def _deriv(tau, s, u, p):
    """BCR4BP state derivative; no floor check (callers guard)."""
    mu, mu_sun = p[0], p[1]
    x, y, z, vx, vy, vz = s[0], s[1], s[2], s[3], s[4], s[5]
    r1 = np.sqrt((x + mu) * (x + mu) + y * y + z * z)
    r2 = np.sqrt((x + mu - 1.0) * (x + mu - 1.0) + y * y + z * z)
    r13 = r1 * r1 * r1
    r23 = r2 * r2 * r2
    ux = x - (1.0 - mu) * (x + mu) / r13 - mu * (x + mu - 1.0) / r23
    uy = y - (1.0 - mu) * y / r13 - mu * y / r23
    uz = -(1.0 - mu) * z / r13 - mu * z / r23

    xs, ys = _sun_xy(tau, p)
    rs = np.sqrt((x - xs) * (x - xs) + (y - ys) * (y - ys) + z * z)
    rs3 = rs * rs * rs
    a3 = p[2] * p[2] * p[2]
    gx = -mu_sun * (x - xs) / rs3 - mu_sun * xs / a3
    gy = -mu_sun * (y - ys) / rs3 - mu_sun * ys / a3
    gz = -mu_sun * z / rs3

    out = np.empty(6)
    out[0] = vx
    out[1] = vy
    out[2] = vz
    out[3] = 2.0 * vy + ux + gx + u[0]
    out[4] = -2.0 * vx + uy + gy + u[1]
    out[5] = uz + gz + u[2]
    return out


@njit(cache=True)
def _jacobian(tau, s, p):
    """6x6 Jacobian of ``_deriv`` with respect to the state at u = 0."""
    mu, mu_sun = p[0], p[1]
    x, y, z = s[0], s[1], s[2]
    A = np.zeros((6, 6))
    A[0, 3] = 1.0
    A[1, 4] = 1.0
    A[2, 5] = 1.0
    A[3, 4] = 2.0
    A[4, 3] = -2.0

    # Gravity Hessians: body of parameter m at b contributes
    # 3 m d_i d_j / r^5 - m delta_ij / r^3 with d = pos - b.
    xs, ys = _sun_xy(tau, p)
    bodies_x = (-mu, 1.0 - mu, xs)
    bodies_y = (0.0, 0.0, ys)
    masses = (1.0 - mu, mu, mu_sun)
    for k in range(3):
        m = masses[k]
        if m == 0.0:
            continue
        dx = x - bodies_x[k]
        dy = y - bodies_y[k]
        dz = z
        r2 = dx * dx + dy * dy + dz * dz
        r = np.sqrt(r2)
        r3 = r * r2
        r5 = r3 * r2
        A[3, 0] += 3.0 * m * dx * dx / r5 - m / r3
        A[4, 1] += 3.0 * m * dy * dy / r5 - m / r3
        A[5, 2] += 3.0 * m * dz * dz / r5 - m / r3
        A[3, 1] += 3.0 * m * dx * dy / r5
        A[3, 2] += 3.0 * m * dx * dz / r5
        A[4, 2] += 3.0 * m * dy * dz / r5
    # centrifugal part of the Earth-Moon pseudo-potential
    A[3, 0] += 1.0
    A[4, 1] += 1.0
    A[4, 0] = A[3, 1]
    A[5, 0] = A[3, 2]
    A[5, 1] = A[4, 2]
    return A


def _check_floor(tau, state, params):
    r1, r2, rs = _separations(tau, state[0], state[1], state[2],
                              params.as_array())
    floor = params.singularity_floor
    if r1 < floor or r2 < floor or (params.mu_sun > 0.0 and rs < floor):
        raise SingularityError(
            f"separation below singularity floor {floor:g} LU "
            f"(r_earth={r1:.3e}, r_moon={r2:.3e}, r_sun={rs:.3e})"
        )


def sun_position(tau, params):
    """Sun position in the rotating barycentric frame [LU]."""
    xs, ys = _sun_xy(tau, params.as_array())
    return np.array([xs, ys, 0.0])


def pseudo_potentials(state, tau, params):
    """Earth-Moon pseudo-potential U and Sun pseudo-potential Gamma."""
    state = np.asarray(state, dtype=float)
    _check_floor(tau, state, params)
    p = params.as_array()
    x, y, z = state[0], state[1], state[2]
    r1, r2, rs = _separations(tau, x, y, z, p)
    u_val = 0.5 * (x * x + y * y) + (1.0 - params.mu) / r1 + params.mu / r2
    if params.mu_sun == 0.0:
        return u_val, 0.0
    xs, ys = _sun_xy(tau, p)
    gamma = params.mu_sun / rs - (params.mu_sun / params.a_sun**3) * (
        xs * x + ys * y
    )
    return u_val, gamma


def translational_derivative(tau, state, u, params):
    """Time derivative of the 6-vector translational state under thrust u."""
    state = np.asarray(state, dtype=float)
    _check_floor(tau, state, params)
    return _deriv(tau, state, np.asarray(u, dtype=float), params.as_array())


def linearize_translational(tau, state, params):
    """Jacobian pair (A, B) of the translational dynamics at (tau, state, 0)."""
    state = np.asarray(state, dtype=float)
    _check_floor(tau, state, params)
    A = _jacobian(tau, state, params.as_array())
    B = np.zeros((6, 3))
    B[3:, :] = np.eye(3)
    return A, B


def jacobi_constant(state, params):
    """CR3BP Jacobi constant C = 2U - v^2 (meaningful for mu_sun = 0)."""
    state = np.asarray(state, dtype=float)
    mu = params.mu
    x, y, z = state[0], state[1], state[2]
    r1 = np.sqrt((x + mu) ** 2 + y * y + z * z)
    r2 = np.sqrt((x + mu - 1.0) ** 2 + y * y + z * z)
    v2 = state[3] ** 2 + state[4] ** 2 + state[5] ** 2
    return x * x + y * y + 2.0 * (1.0 - mu) / r1 + 2.0 * mu / r2 - v2
