"""Rigid-body attitude: MRP representation, DCM algebra, kinematics, dynamics.

Attitude is carried as modified Rodrigues parameters sigma (a ``(3,)`` array)
of the body frame B with respect to the rotating barycentric frame b, together
with the body-frame angular velocity omega [rad/TU].  DCMs follow the
"left frame <- right frame" convention: ``[Bb]`` maps b-frame components into
B-frame components, and rows of ``[Bb]`` are the B basis vectors expressed
in b.

The frame rate of b with respect to inertial is constant, so propagating
attitude with respect to b needs no extra terms.
"""

import numpy as np
from numba import njit

DCM_TOL = 1e-9


@njit(cache=True)
def tilde(omega):
    """Skew-symmetric cross-product matrix: tilde(w) @ v == cross(w, v)."""
    m = np.zeros((3, 3))
    m[0, 1] = -omega[2]
    m[0, 2] = omega[1]
    m[1, 0] = omega[2]
    m[1, 2] = -omega[0]
    m[2, 0] = -omega[1]
    m[2, 1] = omega[0]
    return m


@njit(cache=True)
def _vee_antisym(m):
    """Extract the vector of the antisymmetric part of m (no tolerance check)."""
    return np.array(
        [
            0.5 * (m[2, 1] - m[1, 2]),
            0.5 * (m[0, 2] - m[2, 0]),
            0.5 * (m[1, 0] - m[0, 1]),
        ]
    )


def vee(m, tol=DCM_TOL):
    """Inverse of tilde.  Antisymmetrizes first; rejects non-skew input."""
    m = np.asarray(m, dtype=float)
    sym = 0.5 * (m + m.T)
    if np.max(np.abs(sym)) > tol:
        raise ValueError(
            f"vee: symmetric part {np.max(np.abs(sym)):.3e} exceeds tol {tol:g}"
        )
    return _vee_antisym(m)


@njit(cache=True)
def mrp_to_dcm(sigma):
    """DCM [Bb] from the MRP of B relative to b."""
    s2 = sigma[0] ** 2 + sigma[1] ** 2 + sigma[2] ** 2
    st = tilde(sigma)
    st2 = st @ st
    denom = (1.0 + s2) ** 2
    return np.eye(3) + (8.0 * st2 - 4.0 * (1.0 - s2) * st) / denom


def dcm_to_mrp(dcm):
    """MRP (short rotation, ||sigma|| <= 1) from a DCM.

    Goes through the Euler parameters using Shepperd's method so the
    extraction is well conditioned for every rotation angle short of 2*pi.
    """
    C = np.asarray(dcm, dtype=float)
    tr = np.trace(C)
    b2 = np.array(
        [
            (1.0 + tr) / 4.0,
            (1.0 + 2.0 * C[0, 0] - tr) / 4.0,
            (1.0 + 2.0 * C[1, 1] - tr) / 4.0,
            (1.0 + 2.0 * C[2, 2] - tr) / 4.0,
        ]
    )
    case = int(np.argmax(b2))
    b = np.zeros(4)
    if case == 0:
        b[0] = np.sqrt(b2[0])
        b[1] = (C[1, 2] - C[2, 1]) / (4.0 * b[0])
        b[2] = (C[2, 0] - C[0, 2]) / (4.0 * b[0])
        b[3] = (C[0, 1] - C[1, 0]) / (4.0 * b[0])
    elif case == 1:
        b[1] = np.sqrt(b2[1])
        b[0] = (C[1, 2] - C[2, 1]) / (4.0 * b[1])
        b[2] = (C[0, 1] + C[1, 0]) / (4.0 * b[1])
        b[3] = (C[2, 0] + C[0, 2]) / (4.0 * b[1])
    elif case == 2:
        b[2] = np.sqrt(b2[2])
        b[0] = (C[2, 0] - C[0, 2]) / (4.0 * b[2])
        b[1] = (C[0, 1] + C[1, 0]) / (4.0 * b[2])
        b[3] = (C[1, 2] + C[2, 1]) / (4.0 * b[2])
    else:
        b[3] = np.sqrt(b2[3])
        b[0] = (C[0, 1] - C[1, 0]) / (4.0 * b[3])
        b[1] = (C[2, 0] + C[0, 2]) / (4.0 * b[3])
        b[2] = (C[1, 2] + C[2, 1]) / (4.0 * b[3])
    if b[0] < 0.0:
        b = -b
    if 1.0 + b[0] < 1e-8:
        raise ValueError("dcm_to_mrp: rotation angle too close to 2*pi")
    return b[1:] / (1.0 + b[0])


@njit(cache=True)
def mrp_kinematics(sigma, omega):
    """MRP rate: sigma_dot = 1/4 [(1 - s.s) I + 2 tilde(s) + 2 s s^T] omega."""
    s2 = sigma[0] ** 2 + sigma[1] ** 2 + sigma[2] ** 2
    B = (1.0 - s2) * np.eye(3) + 2.0 * tilde(sigma) + 2.0 * np.outer(sigma, sigma)
    return 0.25 * (B @ omega)


@njit(cache=True)
def mrp_shadow(sigma):
    """Switch to the shadow set when ||sigma|| > 1, keeping the set bounded."""
    s2 = sigma[0] ** 2 + sigma[1] ** 2 + sigma[2] ** 2
    if s2 > 1.0:
        return -sigma / s2
    return sigma


@njit(cache=True)
def _euler_dyn(omega, moment, inertia, inertia_inv):
    """omega_dot = I^-1 (-omega x I omega + M)."""
    iw = inertia @ omega
    gyro = np.array(
        [
            omega[1] * iw[2] - omega[2] * iw[1],
            omega[2] * iw[0] - omega[0] * iw[2],
            omega[0] * iw[1] - omega[1] * iw[0],
        ]
    )
    return inertia_inv @ (moment - gyro)


def euler_dynamics(omega, moment, inertia):
    """Euler rotational dynamics for a rigid body with inertia tensor I."""
    inertia = np.asarray(inertia, dtype=float)
    validate_inertia(inertia)
    return _euler_dyn(
        np.asarray(omega, dtype=float),
        np.asarray(moment, dtype=float),
        inertia,
        np.linalg.inv(inertia),
    )


def validate_inertia(inertia):
    """Check symmetry, positive-definiteness and the triangle inequality."""
    inertia = np.asarray(inertia, dtype=float)
    if inertia.shape != (3, 3):
        raise ValueError("inertia must be 3x3")
    if np.max(np.abs(inertia - inertia.T)) > 1e-9 * max(1.0, np.max(np.abs(inertia))):
        raise ValueError("inertia must be symmetric")
    eig = np.linalg.eigvalsh(inertia)
    if np.any(eig <= 0.0):
        raise ValueError("inertia must be positive definite")
    a, b, c = np.sort(eig)
    if a + b < c:
        raise ValueError("principal moments violate the triangle inequality")
    return inertia


def assert_dcm(dcm, tol=DCM_TOL):
    """Validate orthonormality and det = +1 of a DCM."""
    dcm = np.asarray(dcm, dtype=float)
    err = np.max(np.abs(dcm.T @ dcm - np.eye(3)))
    if err > tol:
        raise ValueError(f"DCM orthonormality error {err:.3e} exceeds {tol:g}")
    if abs(np.linalg.det(dcm) - 1.0) > tol:
        raise ValueError("DCM determinant is not +1")
    return dcm
