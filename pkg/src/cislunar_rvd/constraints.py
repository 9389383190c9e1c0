"""Mission constraint evaluators h1..h5 (h <= 0 means satisfied).

h1  line-of-sight cone about the Chief's velocity direction
h2  thrust magnitude limit (enforced upstream by saturation)
h3  thrust direction deviation (enforced upstream by the on/off gate)
h4  approach-velocity limit, active within gamma1 of the Chief
h5  terminal proximity to the virtual target at the prediction horizon end

All quantities are nondimensional; SI ingestion happens at config load.
The boundary h = 0 counts as satisfied everywhere.

The LoS cone has its apex at the Chief, so once the Deputy is inside the
terminal tracking ball the direction of the relative position is set by
meter-level jitter and the cone verdict flips sign at magnitudes ~1e-9.
Admissibility therefore treats h1 as satisfied within ``apex_radius`` of the
Chief (default 0: disabled); the h1 value itself is always reported raw.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class ConstraintParams:
    """Constraint coefficients, nondimensional (see module docstring)."""

    alpha: float          # LoS half-cone angle [rad]
    u_max: float          # max thrust acceleration [LU/TU^2]
    eta: float            # max thrust direction deviation [rad]
    gamma1: float         # approach-velocity activation radius [LU]
    gamma2: float         # velocity-slope coefficient [1/TU]
    gamma3: float         # velocity offset [LU/TU]
    epsilon: float = 1e-4  # terminal-ball radius [nondim state norm]
    tau_pred: float = 1.5  # prediction horizon [TU]
    h5_enabled: bool = False
    apex_radius: float = 0.0  # LoS apex guard radius [LU]; 0 disables

    def __post_init__(self):
        for name in ("alpha", "u_max", "eta", "gamma1", "gamma2", "gamma3",
                     "epsilon", "tau_pred"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.apex_radius < 0.0:
            raise ValueError("apex_radius must be nonnegative")
        if self.apex_radius >= self.gamma1:
            raise ValueError("apex_radius must lie inside gamma1")
        if self.alpha >= np.pi / 2:
            raise ValueError("alpha must be below pi/2")
        if self.eta >= np.pi / 2:
            raise ValueError("eta must be below pi/2")


@dataclass(frozen=True)
class ConstraintReport:
    """Constraint values at one instant plus the admissibility verdict."""

    h1: float
    h2: float
    h3: float
    h4: float
    h5: float
    h4_active: bool
    admissible: bool


@njit(cache=True)
def _h1(x_deputy, x_chief, cos_alpha):
    vx, vy, vz = x_chief[3], x_chief[4], x_chief[5]
    px = x_deputy[0] - x_chief[0]
    py = x_deputy[1] - x_chief[1]
    pz = x_deputy[2] - x_chief[2]
    vn = np.sqrt(vx * vx + vy * vy + vz * vz)
    pn = np.sqrt(px * px + py * py + pz * pz)
    return -(vx * px + vy * py + vz * pz) + cos_alpha * vn * pn


@njit(cache=True)
def _h3(u_d, u, cos_eta):
    un_d = np.sqrt(u_d[0] ** 2 + u_d[1] ** 2 + u_d[2] ** 2)
    un = np.sqrt(u[0] ** 2 + u[1] ** 2 + u[2] ** 2)
    dot = u_d[0] * u[0] + u_d[1] * u[1] + u_d[2] * u[2]
    return -dot + cos_eta * un_d * un


@njit(cache=True)
def _h4(x_deputy, x_chief, gamma1, gamma2, gamma3):
    px = x_deputy[0] - x_chief[0]
    py = x_deputy[1] - x_chief[1]
    pz = x_deputy[2] - x_chief[2]
    wx = x_deputy[3] - x_chief[3]
    wy = x_deputy[4] - x_chief[4]
    wz = x_deputy[5] - x_chief[5]
    pn = np.sqrt(px * px + py * py + pz * pz)
    wn = np.sqrt(wx * wx + wy * wy + wz * wz)
    return wn - gamma2 * pn - gamma3, pn <= gamma1


def los_cone(x_deputy, x_chief, alpha):
    """LoS cone value: <= 0 iff the Deputy is inside the half-cone of angle
    alpha about the Chief's velocity direction."""
    return float(
        _h1(np.asarray(x_deputy, dtype=float),
            np.asarray(x_chief, dtype=float), np.cos(alpha))
    )


def thrust_limit(u_d, u_max):
    """Thrust magnitude margin ||u_d|| - u_max."""
    return float(np.linalg.norm(u_d) - u_max)


def thrust_direction(u_d, u, eta):
    """Thrust pointing margin; zero vectors count as compliant (value 0)."""
    return float(
        _h3(np.asarray(u_d, dtype=float), np.asarray(u, dtype=float),
            np.cos(eta))
    )


def approach_velocity(x_deputy, x_chief, params):
    """Approach-velocity margin and its activation flag (range <= gamma1)."""
    h4, active = _h4(
        np.asarray(x_deputy, dtype=float),
        np.asarray(x_chief, dtype=float),
        params.gamma1, params.gamma2, params.gamma3,
    )
    return float(h4), bool(active)


def terminal_stability(x_deputy_end, x_virtual_end, epsilon):
    """Terminal-ball margin on the stacked 6-vector difference."""
    diff = np.asarray(x_deputy_end, dtype=float) - np.asarray(
        x_virtual_end, dtype=float
    )
    return float(np.linalg.norm(diff) - epsilon)


def evaluate(x_deputy, x_chief, u_d, u_applied, params, h5=-np.inf):
    """Full constraint report at one instant.

    ``h5`` is only meaningful at a prediction-horizon endpoint; by default it
    does not participate.  Admissibility requires h1, h3 and (when active) h4;
    h2 is guaranteed by saturation and reported for logging.
    """
    h1 = los_cone(x_deputy, x_chief, params.alpha)
    h2 = thrust_limit(u_d, params.u_max)
    h3 = thrust_direction(u_d, u_applied, params.eta)
    h4, active = approach_velocity(x_deputy, x_chief, params)
    range_ = np.linalg.norm(np.asarray(x_deputy, dtype=float)[:3]
                            - np.asarray(x_chief, dtype=float)[:3])
    h1_ok = h1 <= 0.0 or range_ <= params.apex_radius
    admissible = h1_ok and h3 <= 0.0 and (h4 <= 0.0 or not active)
    if params.h5_enabled and h5 > 0.0:
        admissible = False
    return ConstraintReport(h1=h1, h2=h2, h3=h3, h4=h4,
                            h5=h5 if np.isfinite(h5) else -np.inf,
                            h4_active=active, admissible=admissible)
