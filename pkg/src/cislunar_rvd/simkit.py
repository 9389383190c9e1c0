"""Scenario execution: integration helpers, closed-loop runs, Monte Carlo.

``run_scenario`` wires the whole pipeline: orbit correction, gain synthesis,
Deputy initialization, then the main loop alternating hourly governor updates
with zero-order-hold closed-loop propagation.  Logs serialize to CSV (one row
per sample, units documented in a header comment) and JSON (summary and
metadata).
"""

import csv
import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from . import engine
from .attitude import dcm_to_mrp, mrp_to_dcm
from .constraints import ConstraintParams, evaluate
from .control import GainSet, build_gain_set, desired_attitude, alqr_thrust
from .dynamics import SystemParams
from .errors import ConfigError, DegenerateGeometryError
from .governor import PredictionModels, update_time_shift
from .reference import (TimeShiftState, build_chief_trajectory,
                        correct_periodic_orbit)


@dataclass(frozen=True)
class IntegratorSettings:
    """Adaptive RK 5(4) by default; fixed-step RK4 for determinism studies."""

    method: str = "rk45"        # rk45 | dop853 | rk4
    rtol: float = 1e-10
    atol: float = 1e-12
    fixed_step: float = 1e-3    # rk4 only

    def __post_init__(self):
        if self.method not in ("rk45", "dop853", "rk4"):
            raise ValueError(f"unknown integrator method {self.method!r}")


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray  # (dim, n)


def integrate(deriv, x0, tau0, tau1, settings=IntegratorSettings(),
              t_eval=None):
    """Integrate ``dx/dtau = deriv(tau, x)`` from tau0 to tau1."""
    if tau1 <= tau0:
        raise ValueError("tau1 must exceed tau0")
    x0 = np.asarray(x0, dtype=float)
    if settings.method == "rk4":
        n = max(int(np.ceil((tau1 - tau0) / settings.fixed_step)), 1)
        h = (tau1 - tau0) / n
        ts = tau0 + h * np.arange(n + 1)
        ys = np.empty((x0.size, n + 1))
        ys[:, 0] = x0
        y = x0.copy()
        for i in range(n):
            t = ts[i]
            k1 = deriv(t, y)
            k2 = deriv(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = deriv(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = deriv(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            ys[:, i + 1] = y
        if t_eval is not None:
            # sample by linear index match; RK4 mode is for fixed grids
            idx = np.searchsorted(ts, t_eval)
            idx = np.clip(idx, 0, n)
            return Trajectory(t=ts[idx], y=ys[:, idx])
        return Trajectory(t=ts, y=ys)
    method = "RK45" if settings.method == "rk45" else "DOP853"
    sol = solve_ivp(deriv, (tau0, tau1), x0, method=method,
                    rtol=settings.rtol, atol=settings.atol, t_eval=t_eval,
                    dense_output=t_eval is None)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated, nondimensionalized scenario description.

    Attitude gains kp/kd are already nondimensional (SI values scaled by
    TU^2 and TU at config load); the inertia tensor stays in kg m^2.
    """

    system: SystemParams
    orbit_guess: np.ndarray
    period_guess: float
    correction_tol: float = 1e-10
    q_weights: tuple = (1e6, 1e6, 1e6, 1e3, 1e3, 1e3)
    r_weights: tuple = (10.0, 10.0, 10.0)
    n_average: int = 240
    kp_attitude: float = 0.0
    kd_attitude: float = 0.0
    inertia_diag: tuple = (4500.0, 4500.0, 1500.0)
    alpha: float = 0.0
    eta: float = 0.0
    u_max: float = 0.0          # LU/TU^2
    gamma1: float = 0.0         # LU
    gamma2: float = 0.0         # 1/TU
    gamma3: float = 0.0         # LU/TU
    epsilon: float = 1e-4
    h5_enabled: bool = False
    los_apex_radius: float = 0.0  # LU; LoS verdict guard near the Chief
    tau_pred_periods: float = 1.0
    initial_shift: float = 0.0  # TU
    shift_max: Optional[float] = None
    update_period: float = 0.0  # TU
    bisection_steps: int = 12
    shift_resolution: Optional[float] = None  # TU; default 1 s dimensionalized
    governor_enabled: bool = True
    duration_periods: float = 2.0
    control_period: float = 0.0  # TU
    log_stride: int = 1
    seed: int = 0
    mc_position_scale: float = 0.0  # LU
    mc_velocity_scale: float = 0.0  # LU/TU
    deputy_state: Optional[np.ndarray] = None  # explicit 12-state override

    def __post_init__(self):
        if self.control_period <= 0.0:
            raise ConfigError("control_period must be positive")
        if self.update_period <= 0.0:
            raise ConfigError("update_period must be positive")
        if self.initial_shift < 0.0:
            raise ConfigError("initial_shift must be nonnegative")
        if self.log_stride < 1:
            raise ConfigError("log_stride must be >= 1")


COLUMN_NAMES = (
    ["tau"]
    + [f"d_{c}" for c in ("x", "y", "z", "vx", "vy", "vz",
                          "s1", "s2", "s3", "w1", "w2", "w3")]
    + [f"c_{c}" for c in ("x", "y", "z", "vx", "vy", "vz")]
    + [f"v_{c}" for c in ("x", "y", "z", "vx", "vy", "vz")]
    + ["ud_x", "ud_y", "ud_z", "u_x", "u_y", "u_z", "M_x", "M_y", "M_z",
       "shift", "h1", "h2", "h3", "h4", "h4_active", "admissible",
       "gated_off"]
)

UNITS_COMMENT = (
    "# units: tau,shift [TU]; positions [LU]; velocities [LU/TU]; "
    "s* MRP [-]; w*,M (rad, kg*m^2) per TU; ud_*,u_* [LU/TU^2]; "
    "h1..h5 nondim (<=0 satisfied); flags 0/1"
)


@dataclass
class SimLog:
    """Time series plus summary of one scenario run."""

    data: np.ndarray
    summary: dict
    meta: dict

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(UNITS_COMMENT + "\n")
            fh.write(f"# LU_km={self.meta['length_unit_km']:.6f} "
                     f"TU_s={self.meta['time_unit_s']:.6f}\n")
            writer = csv.writer(fh)
            writer.writerow(COLUMN_NAMES)
            for row in self.data:
                writer.writerow([f"{v:.12g}" for v in row])

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump({"summary": self.summary, "meta": self.meta}, fh,
                      indent=2)

    def column(self, name):
        return self.data[:, COLUMN_NAMES.index(name)]


@dataclass
class PreparedScenario:
    """Shared immutable models reused across Monte Carlo runs."""

    config: ScenarioConfig
    orbit: object
    chief: object
    gains: GainSet
    cparams: ConstraintParams
    models: PredictionModels
    duration: float
    shift_max: float


def prepare(config: ScenarioConfig) -> PreparedScenario:
    """Correct the orbit, cache the Chief, and synthesize the gains."""
    params = config.system
    orbit = correct_periodic_orbit(config.orbit_guess, config.period_guess,
                                   params, tol=config.correction_tol)
    duration = config.duration_periods * orbit.period
    tau_pred = config.tau_pred_periods * orbit.period
    shift_max = (config.shift_max if config.shift_max is not None
                 else config.initial_shift)
    horizon_end = duration + tau_pred + shift_max + 0.05 * orbit.period
    chief = build_chief_trajectory(orbit, params, 0.0, horizon_end)
    gains = build_gain_set(
        orbit, params, config.q_weights, config.r_weights,
        kP=config.kp_attitude, kD=config.kd_attitude,
        inertia=np.diag(config.inertia_diag), n_average=config.n_average)
    cparams = ConstraintParams(
        alpha=config.alpha, u_max=config.u_max, eta=config.eta,
        gamma1=config.gamma1, gamma2=config.gamma2, gamma3=config.gamma3,
        epsilon=config.epsilon, tau_pred=tau_pred,
        h5_enabled=config.h5_enabled, apex_radius=config.los_apex_radius)
    models = PredictionModels(params=params, chief=chief, gains=gains,
                              cparams=cparams,
                              control_dt=config.control_period)
    return PreparedScenario(config=config, orbit=orbit, chief=chief,
                            gains=gains, cparams=cparams, models=models,
                            duration=duration, shift_max=shift_max)


def initial_deputy_state(prep: PreparedScenario, perturbation=None,
                         config=None):
    """Deputy 12-state at tau = 0.

    Translation sits on the Chief's track at the initial time shift (plus an
    optional Monte Carlo perturbation); attitude is aligned with the initial
    desired attitude with zero body rates.  ``config`` overrides the prepared
    scenario's own config (they may differ in non-model fields).
    """
    if config is None:
        config = prep.config
    if config.deputy_state is not None:
        return np.asarray(config.deputy_state, dtype=float).copy()
    x = prep.chief.at(config.initial_shift).copy()
    if perturbation is not None:
        x[:3] += perturbation[:3]
        x[3:] += perturbation[3:]
    xv0 = prep.chief.at(config.initial_shift)
    u_d = alqr_thrust(x, xv0, prep.gains, prep.cparams.u_max)
    try:
        Rb = desired_attitude(x, u_d, prep.config.system.earth_position)
        sigma = dcm_to_mrp(Rb)
    except DegenerateGeometryError:
        sigma = np.zeros(3)  # on-target start: no thrust demand yet
    return np.concatenate((x, sigma, np.zeros(3)))


def run_scenario(config: ScenarioConfig, prepared: PreparedScenario = None,
                 initial_state=None) -> SimLog:
    """Execute one governed (or nominal-only) rendezvous scenario."""
    prep = prepared if prepared is not None else prepare(config)
    models = prep.models
    dt = config.control_period
    n_total = int(round(prep.duration / dt))
    n_upd = max(int(round(config.update_period / dt)), 1)

    # Governor off = nominal-only mode: the controller tracks the Chief
    # directly (zero shift) with no virtual target, for comparison runs.
    shift_state = TimeShiftState(
        shift=config.initial_shift if config.governor_enabled else 0.0,
        update_period=config.update_period,
        bounds=(0.0, prep.shift_max))
    resolution = (config.shift_resolution if config.shift_resolution
                  is not None else 1.0 / config.system.time_unit_s)

    s = (np.asarray(initial_state, dtype=float).copy()
         if initial_state is not None
         else initial_deputy_state(prep, config=config))
    prev_R = mrp_to_dcm(s[6:9])
    u_prev = np.zeros(3)

    rows = []
    shift_history = []
    viol_count = 0
    viol_count_h1 = 0
    k = 0
    while k < n_total:
        n_seg = min(n_upd, n_total - k)
        (status, nrec, rec, s, prev_R, u_prev, _vt, _vid, vc,
         vch1) = engine.run_closed_loop(
            k * dt, n_seg, dt, s, shift_state.shift,
            *models.table_args,
            record_stride=config.log_stride,
            stop_on_violation=False,
            prev_R=prev_R, u_prev=u_prev,
            **models.engine_args,
        )
        if status != engine.STATUS_OK:
            raise RuntimeError(
                f"propagation aborted (phase: main loop, status {status}) "
                f"near tau={k * dt:.6f}")
        viol_count += vc
        viol_count_h1 += vch1
        seg = rec[:nrec]
        # the final row of each segment duplicates the next segment's first
        rows.append(seg if k + n_seg == n_total else seg[:-1])
        shift_history.append((k * dt, shift_state.shift))
        k += n_seg
        if config.governor_enabled and k < n_total:
            shift_state = update_time_shift(
                shift_state, s, k * dt, models, resolution=resolution,
                max_bisections=config.bisection_steps, u_prev=u_prev)

    data = np.vstack(rows)
    return _finalize_log(config, prep, data, shift_history, viol_count,
                         viol_count_h1)


def _finalize_log(config, prep, data, shift_history, viol_count,
                  viol_count_h1):
    lu = config.system.length_unit_km
    tu = config.system.time_unit_s
    sep = data[:, engine.COL_STATE:engine.COL_STATE + 3] - \
        data[:, engine.COL_CHIEF:engine.COL_CHIEF + 3]
    relv = data[:, engine.COL_STATE + 3:engine.COL_STATE + 6] - \
        data[:, engine.COL_CHIEF + 3:engine.COL_CHIEF + 6]
    sep_n = np.linalg.norm(sep, axis=1)
    relv_n = np.linalg.norm(relv, axis=1)
    shifts = data[:, engine.COL_SHIFT]
    zero_idx = np.flatnonzero(shifts == 0.0)
    shift_zero_tau = float(data[zero_idx[0], engine.COL_TAU]) \
        if zero_idx.size else None
    summary = {
        "initial_separation_km": float(sep_n[0] * lu),
        "final_separation_km": float(sep_n[-1] * lu),
        "final_relative_speed_km_s": float(relv_n[-1] * lu / tu),
        "final_shift_tu": float(shifts[-1]),
        "shift_zero_time_hr": (shift_zero_tau * tu / 3600.0
                               if shift_zero_tau is not None else None),
        "violation_count": int(viol_count),
        "h1_violation_count": int(viol_count_h1),
        "logged_violation_count": int(np.sum(
            data[:, engine.COL_ADM] == 0.0)),
        "duration_tu": float(data[-1, engine.COL_TAU]),
        "orbit_period_tu": float(prep.orbit.period),
        "governor_enabled": bool(config.governor_enabled),
    }
    meta = {
        "length_unit_km": lu,
        "time_unit_s": tu,
        "mu": config.system.mu,
        "mu_sun": config.system.mu_sun,
        "columns": COLUMN_NAMES,
        "control_period_tu": config.control_period,
        "update_period_tu": config.update_period,
        "initial_shift_tu": config.initial_shift,
        "shift_history": [[t, s] for t, s in shift_history],
    }
    return SimLog(data=data, summary=summary, meta=meta)


def monte_carlo(config: ScenarioConfig, n: int, seed: int,
                prepared: PreparedScenario = None, max_draws=10_000):
    """Run ``n`` scenarios from randomly perturbed initial Deputy states.

    Perturbations are rejection-sampled until the initial state satisfies the
    constraints.  Deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    prep = prepared if prepared is not None else prepare(config)
    rng = np.random.default_rng(seed)
    logs = []
    for _ in range(n):
        perturbation = _draw_admissible(config, prep, rng, max_draws)
        x0 = initial_deputy_state(prep, perturbation, config=config)
        logs.append(run_scenario(config, prepared=prep, initial_state=x0))
    return logs


def _draw_admissible(config, prep, rng, max_draws):
    xc0 = prep.chief.at(0.0)
    for _ in range(max_draws):
        perturbation = np.concatenate((
            rng.normal(0.0, 1.0, 3) * config.mc_position_scale,
            rng.normal(0.0, 1.0, 3) * config.mc_velocity_scale,
        ))
        x = prep.chief.at(config.initial_shift) + perturbation
        u_d = alqr_thrust(x, prep.chief.at(config.initial_shift),
                          prep.gains, prep.cparams.u_max)
        report = evaluate(x, xc0, u_d, u_d, prep.cparams)
        if report.admissible:
            return perturbation
    raise RuntimeError(
        f"no admissible initial perturbation in {max_draws} draws")


def mc_summary(logs):
    """Aggregate summary across Monte Carlo runs."""
    return {
        "n_runs": len(logs),
        "all_admissible": all(
            log.summary["violation_count"] == 0 for log in logs),
        "max_violation_count": max(
            log.summary["violation_count"] for log in logs),
        "final_separation_km": [
            log.summary["final_separation_km"] for log in logs],
        "final_relative_speed_km_s": [
            log.summary["final_relative_speed_km_s"] for log in logs],
        "shift_zero_time_hr": [
            log.summary["shift_zero_time_hr"] for log in logs],
    }
