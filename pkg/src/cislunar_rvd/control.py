"""Nominal controllers: averaged-in-time LQR and geometric attitude tracking.

The translational controller feeds back the deviation from the virtual target
through a constant gain computed from the Riccati solution of the orbit-
averaged linearized dynamics, then saturates the commanded magnitude.  The
attitude controller aligns the single thruster axis (-k_B) with the desired
thrust direction via a geometric tracking law on the DCM, and an on/off gate
suppresses thrust while the pointing error exceeds the allowed deviation.

Attitude gain units: kP and kD are nondimensional (moments scaled by TU^2,
rates in rad/TU) while the inertia tensor stays in kg m^2; dynamics and
feedforward terms use the same convention so no conversion appears here.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import solve_continuous_are

from .attitude import mrp_to_dcm, tilde, _vee_antisym, validate_inertia
from .dynamics import linearize_translational
from .errors import DegenerateGeometryError, RiccatiError
from .reference import chief_state

DEGENERATE_CROSS_TOL = 1e-6
RICCATI_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class GainSet:
    """Translational Riccati gain plus attitude PD gains and inertia."""

    K: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    Rw: np.ndarray
    kP: float
    kD: float
    inertia: np.ndarray

    def __post_init__(self):
        if self.kP <= 0.0 or self.kD <= 0.0:
            raise ValueError("attitude gains must be positive")
        validate_inertia(self.inertia)
        for name in ("Q", "Rw"):
            m = getattr(self, name)
            if np.max(np.abs(m - m.T)) > 1e-9 * np.max(np.abs(m)):
                raise ValueError(f"{name} must be symmetric")
            if np.any(np.linalg.eigvalsh(m) <= 0.0):
                raise ValueError(f"{name} must be positive definite")
        if np.any(np.linalg.eigvalsh(0.5 * (self.P + self.P.T)) < -1e-9 * np.linalg.norm(self.P)):
            raise ValueError("P must be positive semi-definite")

    @property
    def inertia_inv(self):
        return np.linalg.inv(self.inertia)


@dataclass(frozen=True)
class ThrustCommand:
    """Desired thrust, its direction, and the gated thrust actually applied."""

    desired: np.ndarray
    desired_unit: np.ndarray
    applied: np.ndarray
    gated_off: bool


def averaged_pair(orbit, n_samples, params):
    """Average the linearized (A, B) over equidistant points of one period."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    A = np.zeros((6, 6))
    taus = orbit.period * np.arange(n_samples) / n_samples
    for tau in taus:
        a_k, _ = linearize_translational(tau, chief_state(tau, orbit), params)
        A += a_k
    A /= n_samples
    B = np.zeros((6, 3))
    B[3:, :] = np.eye(3)
    return A, B


def solve_care(A, B, Q, Rw):
    """Stabilizing Riccati solution and feedback gain K = -R^-1 B^T P.

    Accepts the solution on a residual basis: the Riccati residual must be
    below ``RICCATI_RESIDUAL_TOL * ||P||`` and the closed loop strictly
    stable, whatever method produced P.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    Rw = np.asarray(Rw, dtype=float)
    try:
        P = solve_continuous_are(A, B, Q, Rw)
    except np.linalg.LinAlgError as exc:
        raise RiccatiError(f"CARE solve failed: {exc}") from exc
    res = A.T @ P + P @ A - P @ B @ np.linalg.solve(Rw, B.T @ P) + Q
    rel = np.linalg.norm(res) / np.linalg.norm(P)
    if rel > RICCATI_RESIDUAL_TOL:
        raise RiccatiError(f"Riccati residual {rel:.3e} above tolerance")
    K = -np.linalg.solve(Rw, B.T @ P)
    eig = np.linalg.eigvals(A + B @ K)
    if np.max(eig.real) >= 0.0:
        raise RiccatiError("closed-loop averaged system is not strictly stable")
    return P, K


@njit(cache=True)
def _saturate(u, u_max):
    n = np.sqrt(u[0] ** 2 + u[1] ** 2 + u[2] ** 2)
    if n > u_max:
        return u * (u_max / n)
    return u


def alqr_thrust(x_deputy, x_virtual, gains, u_max):
    """Desired thrust u_d = K (X_d - X_v), magnitude-saturated to u_max."""
    u = gains.K @ (np.asarray(x_deputy, dtype=float)
                   - np.asarray(x_virtual, dtype=float))
    return _saturate(u, u_max)


@njit(cache=True)
def _unit_deriv(v, vdot):
    """Derivative of v/||v||: vdot/||v|| - v (v.vdot)/||v||^3."""
    n = np.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    return vdot / n - v * (np.dot(v, vdot) / (n * n * n))


@njit(cache=True)
def _desired_attitude(r_earth, u_d):
    """Rows of [Rb] from the Earth line and the desired thrust direction.

    Returns (R, ok); ok = False flags the degenerate thrust-toward-Earth
    geometry.  Row 1 is normalized so the result is a proper DCM with
    row 3 = -u_d_hat.
    """
    un = np.sqrt(u_d[0] ** 2 + u_d[1] ** 2 + u_d[2] ** 2)
    rn = np.sqrt(r_earth[0] ** 2 + r_earth[1] ** 2 + r_earth[2] ** 2)
    R = np.zeros((3, 3))
    if un == 0.0 or rn == 0.0:
        return R, False
    uhat = u_d / un
    rhat = r_earth / rn
    w = np.cross(rhat, uhat)
    wn = np.sqrt(w[0] ** 2 + w[1] ** 2 + w[2] ** 2)
    if wn < DEGENERATE_CROSS_TOL:
        return R, False
    row1 = w / wn
    row2 = -np.cross(uhat, row1)
    R[0] = row1
    R[1] = row2
    R[2] = -uhat
    return R, True


def desired_attitude(x_deputy, u_d, earth_pos):
    """Desired DCM [Rb]: thruster axis opposite u_d, roll fixed by the Earth line."""
    r_earth = np.asarray(earth_pos, dtype=float) - np.asarray(
        x_deputy, dtype=float
    )[:3]
    u_d = np.asarray(u_d, dtype=float)
    if np.linalg.norm(u_d) == 0.0:
        raise DegenerateGeometryError("desired thrust is zero")
    R, ok = _desired_attitude(r_earth, u_d)
    if not ok:
        raise DegenerateGeometryError(
            "desired thrust is (nearly) parallel to the Earth line"
        )
    return R


@njit(cache=True)
def _desired_attitude_rate(r_earth, r_earth_dot, u_raw, u_raw_dot):
    """Analytic d[Rb]/dtau from the (unnormalized) factors and their rates."""
    rhat = r_earth / np.linalg.norm(r_earth)
    rhat_dot = _unit_deriv(r_earth, r_earth_dot)
    uhat = u_raw / np.linalg.norm(u_raw)
    uhat_dot = _unit_deriv(u_raw, u_raw_dot)
    w = np.cross(rhat, uhat)
    w_dot = np.cross(rhat_dot, uhat) + np.cross(rhat, uhat_dot)
    row1 = w / np.linalg.norm(w)
    row1_dot = _unit_deriv(w, w_dot)
    row2_dot = -np.cross(uhat_dot, row1) - np.cross(uhat, row1_dot)
    Rdot = np.zeros((3, 3))
    Rdot[0] = row1_dot
    Rdot[1] = row2_dot
    Rdot[2] = -uhat_dot
    return Rdot


@njit(cache=True)
def _omega_ref(Rb, Rb_dot):
    """Reference angular velocity in R: omega = -(Rb_dot Rb^T)^vee."""
    return -_vee_antisym(Rb_dot @ Rb.T)


def reference_angular_velocity(Rb, Rb_dot, tol=1e-6):
    """Angular velocity of the reference frame from [Rb] and its rate."""
    Rb = np.asarray(Rb, dtype=float)
    Rb_dot = np.asarray(Rb_dot, dtype=float)
    m = Rb_dot @ Rb.T
    sym = 0.5 * (m + m.T)
    scale = max(1.0, np.max(np.abs(m)))
    if np.max(np.abs(sym)) > tol * scale:
        raise ValueError(
            f"Rb_dot Rb^T symmetric residual {np.max(np.abs(sym)):.3e} "
            "exceeds tolerance; inputs are not a consistent rotation/rate pair"
        )
    return _omega_ref(Rb, Rb_dot)


@njit(cache=True)
def _attitude_errors(Rb, Bb, omega_B, omega_R):
    """Tracking errors: eC on the DCM, eW on the angular velocity."""
    RB = Rb @ Bb.T
    eC = _vee_antisym(RB)  # = (1/2) (RB - RB^T)^vee
    BR = Bb @ Rb.T
    eW = omega_B - BR @ omega_R
    return eC, eW


def attitude_errors(Rb, Bb, omega_B, omega_R):
    """Attitude and rate tracking errors of body frame B against reference R."""
    return _attitude_errors(
        np.asarray(Rb, dtype=float),
        np.asarray(Bb, dtype=float),
        np.asarray(omega_B, dtype=float),
        np.asarray(omega_R, dtype=float),
    )


@njit(cache=True)
def _control_moment(eC, eW, omega_B, Rb, Bb, omega_R, omega_R_dot, kP, kD,
                    inertia, include_ref_accel):
    iw = inertia @ omega_B
    gyro = np.array(
        [
            omega_B[1] * iw[2] - omega_B[2] * iw[1],
            omega_B[2] * iw[0] - omega_B[0] * iw[2],
            omega_B[0] * iw[1] - omega_B[1] * iw[0],
        ]
    )
    BR = Bb @ Rb.T
    wr_b = BR @ omega_R
    coupling = np.cross(omega_B, wr_b)
    if include_ref_accel:
        coupling = coupling - BR @ omega_R_dot
    return -kP * eC - kD * eW + gyro - inertia @ coupling


def control_moment(eC, eW, omega_B, Rb, Bb, omega_R, omega_R_dot, gains,
                   include_ref_accel=False):
    """Geometric tracking feedback moment (PD + gyroscopic feedforward).

    ``include_ref_accel=False`` applies the slow-reference simplification and
    drops the reference angular acceleration term.
    """
    return _control_moment(
        np.asarray(eC, dtype=float),
        np.asarray(eW, dtype=float),
        np.asarray(omega_B, dtype=float),
        np.asarray(Rb, dtype=float),
        np.asarray(Bb, dtype=float),
        np.asarray(omega_R, dtype=float),
        np.asarray(omega_R_dot, dtype=float),
        gains.kP,
        gains.kD,
        np.asarray(gains.inertia, dtype=float),
        include_ref_accel,
    )


@njit(cache=True)
def _thrust_gate(u_d, Bb, cos_eta):
    """Gate the single-thruster output on pointing alignment.

    Returns (applied, gated_off).  Thrust fires along -k_B with magnitude
    ||u_d|| iff the angle between u_d and -k_B is <= eta (boundary fires).
    """
    un = np.sqrt(u_d[0] ** 2 + u_d[1] ** 2 + u_d[2] ** 2)
    if un == 0.0:
        return np.zeros(3), False
    khat_b = Bb[2].copy()  # rows of [Bb] are B basis vectors in b components
    cos_mis = -(u_d[0] * khat_b[0] + u_d[1] * khat_b[1]
                + u_d[2] * khat_b[2]) / un
    if cos_mis >= cos_eta:
        return -un * khat_b, False
    return np.zeros(3), True


def thrust_gate(u_d, Bb, eta):
    """On/off thrust: fire -||u_d|| k_B when misalignment is within eta."""
    u_d = np.asarray(u_d, dtype=float)
    Bb = np.asarray(Bb, dtype=float)
    applied, gated_off = _thrust_gate(u_d, Bb, np.cos(eta))
    n = np.linalg.norm(u_d)
    unit = u_d / n if n > 0.0 else np.zeros(3)
    return ThrustCommand(desired=u_d, desired_unit=unit, applied=applied,
                         gated_off=gated_off)


def build_gain_set(orbit, params, q_weights, r_weights, kP, kD, inertia,
                   n_average=240):
    """Assemble the full gain set from the averaged pair and attitude gains."""
    A, B = averaged_pair(orbit, n_average, params)
    Q = np.diag(np.asarray(q_weights, dtype=float))
    Rw = np.diag(np.asarray(r_weights, dtype=float))
    P, K = solve_care(A, B, Q, Rw)
    return GainSet(K=K, P=P, Q=Q, Rw=Rw, kP=kP, kD=kD,
                   inertia=np.asarray(inertia, dtype=float))
