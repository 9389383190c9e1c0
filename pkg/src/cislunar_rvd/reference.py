"""Periodic reference orbit construction, dense lookup, and virtual targets.

The 9:2 southern L2 NRHO is corrected in the CR3BP (``mu_sun`` forced to zero)
by single shooting over half a period, exploiting the orbit's x-z plane
symmetry: start on a perpendicular plane crossing, drive the half-period state
back onto one.  The corrected orbit is stored as a dense uniform table of
states and derivatives and interpolated with cubic Hermite polynomials.

For full BCR4BP scenarios the (unforced) Chief trajectory is propagated from
the corrected initial condition and cached the same way over the simulation
window; that cache stands in for the Chief wherever its state is needed.
"""

from dataclasses import dataclass, replace

import numpy as np
from numba import njit
from scipy.integrate import solve_ivp

from .dynamics import SystemParams, _deriv, _jacobian
from .errors import ConvergenceError

DEFAULT_NODES_PER_PERIOD = 4000
_CORRECTION_RTOL = 1e-12
_CORRECTION_ATOL = 1e-12


@dataclass(frozen=True)
class TimeShiftState:
    """Governor time-shift parameter with its update schedule and bounds [TU]."""

    shift: float
    update_period: float
    bounds: tuple = (0.0, np.inf)

    def __post_init__(self):
        lo, hi = self.bounds
        if not lo <= self.shift <= hi:
            raise ValueError(f"shift {self.shift} outside bounds {self.bounds}")
        if self.update_period <= 0.0:
            raise ValueError("update_period must be positive")


@njit(cache=True)
def _hermite_eval(theta, dt, x0, f0, x1, f1):
    """Cubic Hermite interpolation on one interval, theta in [0, 1]."""
    h00 = (1.0 + 2.0 * theta) * (1.0 - theta) ** 2
    h10 = theta * (1.0 - theta) ** 2
    h01 = theta * theta * (3.0 - 2.0 * theta)
    h11 = theta * theta * (theta - 1.0)
    return h00 * x0 + h10 * dt * f0 + h01 * x1 + h11 * dt * f1


@njit(cache=True)
def _interp_table(tau, tau0, dt, states, derivs, period):
    """Interpolate a uniform dense table; period > 0 wraps periodically."""
    n = states.shape[0]
    t = tau - tau0
    if period > 0.0:
        t = t % period
        idx = int(t / dt)
        if idx >= n:
            idx = n - 1
        theta = t / dt - idx
        j = idx + 1
        if j == n:
            j = 0
        return _hermite_eval(theta, dt, states[idx], derivs[idx],
                             states[j], derivs[j])
    if t <= 0.0:
        idx, theta = 0, 0.0
    else:
        idx = int(t / dt)
        if idx >= n - 1:
            idx, theta = n - 2, 1.0
        else:
            theta = t / dt - idx
    return _hermite_eval(theta, dt, states[idx], derivs[idx],
                         states[idx + 1], derivs[idx + 1])


@dataclass(frozen=True)
class DenseTrajectory:
    """Uniformly sampled trajectory with stored derivatives for interpolation.

    ``period > 0`` marks the table as periodic (one full period, endpoint
    excluded); ``period == 0`` marks a plain finite window.
    """

    tau0: float
    dt: float
    states: np.ndarray
    derivs: np.ndarray
    period: float = 0.0

    def at(self, tau):
        return _interp_table(tau, self.tau0, self.dt, self.states,
                             self.derivs, self.period)

    @property
    def tau_end(self):
        return self.tau0 + self.dt * (self.states.shape[0] - 1)


@dataclass(frozen=True)
class ReferenceOrbit:
    """Corrected periodic reference orbit with a dense lookup table."""

    initial_state: np.ndarray
    period: float
    table: DenseTrajectory
    params: SystemParams
    residual: float


def _cr3bp(params):
    if params.mu_sun == 0.0:
        return params
    return replace(params, mu_sun=0.0)


def _state_stm_rhs(tau, y, p):
    s = y[:6]
    phi = y[6:].reshape(6, 6)
    ds = _deriv(tau, s, np.zeros(3), p)
    dphi = _jacobian(tau, s, p) @ phi
    return np.concatenate((ds, dphi.ravel()))


def stm_propagate(x0, tau0, tau1, params, rtol=_CORRECTION_RTOL,
                  atol=_CORRECTION_ATOL):
    """Propagate state and state-transition matrix jointly from tau0 to tau1."""
    x0 = np.asarray(x0, dtype=float)
    if tau1 == tau0:
        return x0.copy(), np.eye(6)
    p = params.as_array()
    y0 = np.concatenate((x0, np.eye(6).ravel()))
    sol = solve_ivp(_state_stm_rhs, (tau0, tau1), y0, args=(p,),
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise ConvergenceError(f"STM propagation failed: {sol.message}")
    yf = sol.y[:, -1]
    return yf[:6], yf[6:].reshape(6, 6)


def _propagate(x0, tau0, tau1, params, rtol=_CORRECTION_RTOL,
               atol=_CORRECTION_ATOL, t_eval=None):
    p = params.as_array()
    sol = solve_ivp(lambda t, s: _deriv(t, s, np.zeros(3), p), (tau0, tau1),
                    np.asarray(x0, dtype=float), method="DOP853",
                    rtol=rtol, atol=atol, t_eval=t_eval)
    if not sol.success:
        raise ConvergenceError(f"propagation failed: {sol.message}")
    return sol


def periodicity_residual(x0, period, params):
    sol = _propagate(x0, 0.0, period, params)
    return float(np.linalg.norm(sol.y[:, -1] - np.asarray(x0, dtype=float)))


def correct_periodic_orbit(guess, period_guess, params, tol=1e-10,
                           max_iter=50, nodes_per_period=DEFAULT_NODES_PER_PERIOD):
    """Differentially correct a symmetric periodic orbit from a catalog guess.

    The guess must lie (approximately) on a perpendicular x-z plane crossing:
    y, vx, vz near zero.  Unknowns are (x0, vy0, T/2) with z0 held fixed to
    pin the orbit within its family; the half-period constraint is
    (y, vx, vz)(T/2) = 0.  Correction always runs in the CR3BP.
    """
    cr = _cr3bp(params)
    x0 = np.asarray(guess, dtype=float).copy()
    x0[1] = 0.0
    x0[3] = 0.0
    x0[5] = 0.0
    half = 0.5 * period_guess
    residual = np.inf
    for _ in range(max_iter):
        if half <= tol:
            # the trivial "orbit" of zero period satisfies the residual
            # check vacuously; reject it
            raise ConvergenceError(
                "shooting collapsed to a zero-period solution",
                residual=residual,
            )
        residual = periodicity_residual(x0, 2.0 * half, cr)
        if residual < tol:
            return _build_orbit(x0, 2.0 * half, cr, residual, nodes_per_period)
        xf, phi = stm_propagate(x0, 0.0, half, cr)
        f = _deriv(half, xf, np.zeros(3), cr.as_array())
        res = np.array([xf[1], xf[3], xf[5]])
        jac = np.array(
            [
                [phi[1, 0], phi[1, 4], f[1]],
                [phi[3, 0], phi[3, 4], f[3]],
                [phi[5, 0], phi[5, 4], f[5]],
            ]
        )
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular shooting Jacobian (residual {residual:.3e})",
                residual=residual,
            ) from exc
        x0[0] -= step[0]
        x0[4] -= step[1]
        half -= step[2]
    raise ConvergenceError(
        f"shooting did not converge in {max_iter} iterations "
        f"(residual {residual:.3e})",
        residual=residual,
    )


def _build_orbit(x0, period, params, residual, nodes_per_period):
    table = build_dense_trajectory(x0, 0.0, period, params,
                                   n_nodes=nodes_per_period, periodic=True)
    return ReferenceOrbit(initial_state=x0.copy(), period=period,
                          table=table, params=params, residual=residual)


def build_dense_trajectory(x0, tau0, tau1, params, n_nodes, periodic=False):
    """Integrate and tabulate a trajectory for Hermite interpolation."""
    if periodic:
        # exclude the endpoint; the wrap reuses node 0
        taus = tau0 + (tau1 - tau0) * np.arange(n_nodes) / n_nodes
        dt = (tau1 - tau0) / n_nodes
        period = tau1 - tau0
    else:
        taus = np.linspace(tau0, tau1, n_nodes)
        dt = taus[1] - taus[0]
        period = 0.0
    sol = _propagate(x0, tau0, tau1, params, t_eval=taus)
    states = sol.y.T.copy()
    p = params.as_array()
    derivs = np.empty_like(states)
    for i in range(states.shape[0]):
        derivs[i] = _deriv(taus[i], states[i], np.zeros(3), p)
    return DenseTrajectory(tau0=tau0, dt=dt, states=states, derivs=derivs,
                           period=period)


def chief_state(tau, orbit, exact=False):
    """Periodic reference state at tau (mod period).

    ``exact=True`` re-integrates from the nearest stored node instead of
    interpolating, for callers needing integrator-level accuracy.
    """
    if not exact:
        return orbit.table.at(tau)
    t = tau % orbit.period
    idx = int(round(t / orbit.table.dt))
    idx = min(idx, orbit.table.states.shape[0] - 1)
    t_node = idx * orbit.table.dt
    x_node = orbit.table.states[idx]
    if t == t_node:
        return x_node.copy()
    sol = _propagate(x_node, t_node, t, orbit.params)
    return sol.y[:, -1]


def virtual_target(tau, shift, orbit):
    """Time-shifted reference state X_v(tau) = X_c(tau + shift)."""
    s = shift.shift if isinstance(shift, TimeShiftState) else float(shift)
    return chief_state(tau + s, orbit)


def build_chief_trajectory(orbit, params, tau0, tau1,
                           nodes_per_period=DEFAULT_NODES_PER_PERIOD):
    """Cache the unforced Chief trajectory in the full system over a window.

    With ``mu_sun = 0`` this reproduces the periodic table; with the Sun on,
    the Chief drifts from the corrected CR3BP orbit and the cache captures it.
    """
    n = max(int(np.ceil((tau1 - tau0) / orbit.period * nodes_per_period)), 2)
    return build_dense_trajectory(orbit.initial_state, tau0, tau1, params,
                                  n_nodes=n, periodic=False)
