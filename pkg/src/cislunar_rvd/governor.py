"""Time-shift governor: prediction of the governed closed loop and the
shift-update search.

At each update instant the governor simulates the nominal closed loop over
the prediction horizon for candidate time shifts and adopts the admissible
shift of smallest magnitude found by bisection on [0, current shift].  If no
candidate (including the current shift) predicts admissible, the current
shift is retained, so the update is total and the shift magnitude is
non-increasing across updates.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import engine
from .constraints import terminal_stability
from .reference import TimeShiftState

DEFAULT_BISECTION_STEPS = 12


@dataclass(frozen=True)
class PredictionModels:
    """Immutable bundle consumed by closed-loop predictions.

    ``chief`` is a DenseTrajectory cache of the Chief in the scenario's
    dynamics; ``table_args`` unpacks it for the jitted engine.
    """

    params: object           # SystemParams
    chief: object            # DenseTrajectory
    gains: object            # GainSet
    cparams: object          # ConstraintParams
    control_dt: float        # ZOH control step [TU]

    @property
    def table_args(self):
        t = self.chief
        return (t.tau0, t.dt, t.states, t.derivs, t.period)

    @property
    def engine_args(self):
        g = self.gains
        c = self.cparams
        return dict(
            K=np.ascontiguousarray(g.K), kP=g.kP, kD=g.kD,
            inertia=np.ascontiguousarray(g.inertia),
            inertia_inv=np.ascontiguousarray(g.inertia_inv),
            u_max=c.u_max, cos_eta=np.cos(c.eta),
            p=self.params.as_array(),
            cos_alpha=np.cos(c.alpha), gamma1=c.gamma1,
            gamma2=c.gamma2, gamma3=c.gamma3,
            apex_radius=c.apex_radius,
        )


@dataclass(frozen=True)
class PredictionResult:
    """Predicted governed trajectory with its admissibility verdict."""

    trajectory: np.ndarray   # engine record rows
    admissible: bool
    first_violation: Optional[tuple]  # (tau, "h1".."h5") or None
    status: int
    final_state: np.ndarray


_VIOLATION_NAMES = {1: "h1", 2: "h2", 3: "h3", 4: "h4", 5: "h5"}


def predict_closed_loop(x0, tau0, shift, horizon, models,
                        stop_on_violation=True, record_stride=None,
                        prev_R=None, u_prev=None):
    """Simulate the governed closed loop over the horizon at a fixed shift.

    ``x0`` is the 12-state (translation, MRP, body rate).  Integrator failure
    (singularity floor) reports as inadmissible with a diagnostic status.
    """
    dt = models.control_dt
    n_steps = max(int(round(horizon / dt)), 0)
    if record_stride is None:
        # constraint checks happen every step; keep the stored trace light
        record_stride = max(n_steps // 200, 1)
    if prev_R is None:
        from .attitude import mrp_to_dcm
        prev_R = mrp_to_dcm(np.asarray(x0, dtype=float)[6:9])
    if u_prev is None:
        u_prev = np.zeros(3)

    (status, nrec, rec, s_final, _R, _u, viol_tau, viol_id,
     _vc, _vch1) = engine.run_closed_loop(
        tau0, n_steps, dt, np.asarray(x0, dtype=float), float(shift),
        *models.table_args,
        record_stride=record_stride,
        stop_on_violation=stop_on_violation,
        prev_R=np.asarray(prev_R, dtype=float),
        u_prev=np.asarray(u_prev, dtype=float),
        **models.engine_args,
    )
    trajectory = rec[:nrec].copy()
    admissible = status == engine.STATUS_OK and viol_id == 0
    first_violation = None
    if viol_id != 0:
        first_violation = (viol_tau, _VIOLATION_NAMES[viol_id])

    if admissible and models.cparams.h5_enabled and n_steps > 0:
        from .reference import _interp_table
        xv_end = _interp_table(tau0 + n_steps * dt + shift,
                               *models.table_args)
        h5 = terminal_stability(s_final[:6], xv_end, models.cparams.epsilon)
        if h5 > 0.0:
            admissible = False
            first_violation = (tau0 + n_steps * dt, "h5")
    return PredictionResult(trajectory=trajectory, admissible=admissible,
                            first_violation=first_violation, status=status,
                            final_state=s_final)


def bisect_shift(is_admissible: Callable[[float], bool], current_shift,
                 resolution, max_steps=DEFAULT_BISECTION_STEPS):
    """Smallest-magnitude admissible shift in [0, current] by bisection.

    Returns (shift, found): the zero shift when admissible, otherwise the
    smallest tested-admissible candidate; ``found=False`` means not even the
    current shift predicts admissible (caller keeps it unchanged).
    """
    if is_admissible(0.0):
        return 0.0, True
    if current_shift == 0.0 or not is_admissible(current_shift):
        return current_shift, False
    lo, hi = 0.0, current_shift
    for _ in range(max_steps):
        if hi - lo <= resolution:
            break
        mid = 0.5 * (lo + hi)
        if is_admissible(mid):
            hi = mid
        else:
            lo = mid
    return hi, True


def update_time_shift(current: TimeShiftState, x0, tau, models,
                      resolution=None,
                      max_bisections=DEFAULT_BISECTION_STEPS,
                      u_prev=None):
    """One governor update: adopt the admissible shift closest to zero.

    Falls back to the unchanged shift when no candidate is admissible, which
    keeps the update total and the shift magnitude non-increasing.
    """
    if resolution is None:
        # 1 s dimensionalized
        resolution = 1.0 / models.params.time_unit_s
    horizon = models.cparams.tau_pred

    def is_admissible(shift):
        return predict_closed_loop(x0, tau, shift, horizon, models,
                                   stop_on_violation=True,
                                   u_prev=u_prev).admissible

    new_shift, found = bisect_shift(is_admissible, current.shift, resolution,
                                    max_bisections)
    if not found:
        return current
    return replace(current, shift=new_shift)
