"""Jitted closed-loop stepping engine.

One control step: look up the virtual target, evaluate the saturated
translational feedback, build the desired attitude and reference rate, run the
geometric attitude law, gate the thruster, evaluate the constraints, then
advance the coupled 12-state (translation + MRP attitude + body rate) one
fixed RK4 step with zero-order-hold inputs.

The same routine serves the main simulation loop and the governor's
closed-loop predictions (which may stop at the first constraint violation).
Everything here is numba-compiled; wrappers live in ``simkit`` and
``governor``.
"""

import numpy as np
from numba import njit

from .attitude import mrp_kinematics, mrp_shadow, mrp_to_dcm, _euler_dyn
from .constraints import _h1, _h3, _h4
from .control import (_attitude_errors, _control_moment, _desired_attitude,
                      _desired_attitude_rate, _omega_ref, _saturate,
                      _thrust_gate)
from .dynamics import _deriv, _separations
from .reference import _interp_table

# Record column layout (one row per logged control step).
COL_TAU = 0
COL_STATE = 1          # 12 entries: pos, vel, sigma, omega
COL_CHIEF = 13         # 6 entries
COL_XV = 19            # 6 entries
COL_UD = 25            # 3 entries
COL_UAPP = 28          # 3 entries
COL_M = 31             # 3 entries
COL_SHIFT = 34
COL_H1 = 35
COL_H2 = 36
COL_H3 = 37
COL_H4 = 38
COL_H4ACT = 39
COL_ADM = 40
COL_GATED = 41
NCOL = 42

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_STOPPED = 2

_TINY_THRUST = 1e-250


@njit(cache=True)
def _coupled_rhs(tau, s, u, moment, inertia, inertia_inv, p):
    out = np.empty(12)
    out[:6] = _deriv(tau, s[:6], u, p)
    out[6:9] = mrp_kinematics(s[6:9], s[9:12])
    out[9:12] = _euler_dyn(s[9:12], moment, inertia, inertia_inv)
    return out


@njit(cache=True)
def _rk4_step(tau, s, dt, u, moment, inertia, inertia_inv, p):
    k1 = _coupled_rhs(tau, s, u, moment, inertia, inertia_inv, p)
    k2 = _coupled_rhs(tau + 0.5 * dt, s + 0.5 * dt * k1, u, moment,
                      inertia, inertia_inv, p)
    k3 = _coupled_rhs(tau + 0.5 * dt, s + 0.5 * dt * k2, u, moment,
                      inertia, inertia_inv, p)
    k4 = _coupled_rhs(tau + dt, s + dt * k3, u, moment,
                      inertia, inertia_inv, p)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def _controller_step(tau, s, xv, K, kP, kD, inertia, inertia_inv,
                     u_max, cos_eta, p, prev_R, u_prev, shift):
    """Full nominal-controller evaluation at one instant.

    Returns (u_d, u_applied, moment, Rb, gated_off, degenerate).
    ``prev_R`` is the fallback desired attitude for degenerate geometry.
    """
    dx = s[:6] - xv
    u_raw = K @ dx
    u_d = _saturate(u_raw, u_max)
    un_raw = np.sqrt(u_raw[0] ** 2 + u_raw[1] ** 2 + u_raw[2] ** 2)

    earth = np.array([-p[0], 0.0, 0.0])
    r_earth = earth - s[:3]

    degenerate = False
    omega_R = np.zeros(3)
    if un_raw < _TINY_THRUST:
        Rb = prev_R.copy()
        u_d = np.zeros(3)
        degenerate = True
    else:
        Rb, ok = _desired_attitude(r_earth, u_d)
        if not ok:
            Rb = prev_R.copy()
            degenerate = True
        else:
            xd_dot = _deriv(tau, s[:6], u_prev, p)
            xv_dot = _deriv(tau + shift, xv, np.zeros(3), p)
            u_raw_dot = K @ (xd_dot - xv_dot)
            r_earth_dot = -s[3:6].copy()
            Rb_dot = _desired_attitude_rate(r_earth, r_earth_dot,
                                            u_raw, u_raw_dot)
            omega_R = _omega_ref(Rb, Rb_dot)

    Bb = mrp_to_dcm(s[6:9])
    eC, eW = _attitude_errors(Rb, Bb, s[9:12], omega_R)
    moment = _control_moment(eC, eW, s[9:12], Rb, Bb, omega_R,
                             np.zeros(3), kP, kD, inertia, False)
    u_app, gated_off = _thrust_gate(u_d, Bb, cos_eta)
    return u_d, u_app, moment, Rb, gated_off, degenerate


@njit(cache=True)
def run_closed_loop(tau0, n_steps, dt, x0, shift,
                    tab_tau0, tab_dt, tab_states, tab_derivs, tab_period,
                    K, kP, kD, inertia, inertia_inv,
                    u_max, cos_eta, p,
                    cos_alpha, gamma1, gamma2, gamma3, apex_radius,
                    record_stride, stop_on_violation,
                    prev_R, u_prev):
    """Run the coupled closed loop for ``n_steps`` control steps.

    Records samples every ``record_stride`` steps (plus the final one) and
    evaluates the constraints at every control step regardless of the
    stride.  Returns::

        (status, n_recorded, records, final_state, final_R, final_u_applied,
         first_violation_tau, first_violation_id, violation_count,
         h1_violation_count)

    ``first_violation_id``: 0 none, 1/3/4 the first violated constraint.
    """
    nrec_max = n_steps // record_stride + 2
    rec = np.zeros((nrec_max, NCOL))
    s = x0.copy()
    prevR = prev_R.copy()
    uprev = u_prev.copy()
    status = STATUS_OK
    viol_tau = -1.0
    viol_id = 0
    viol_count = 0
    viol_count_h1 = 0
    nrec = 0

    for k in range(n_steps + 1):
        tau = tau0 + k * dt
        r1, r2, rs = _separations(tau, s[0], s[1], s[2], p)
        if r1 < p[5] or r2 < p[5] or (p[1] > 0.0 and rs < p[5]):
            status = STATUS_SINGULAR
            break

        xc = _interp_table(tau, tab_tau0, tab_dt, tab_states, tab_derivs,
                           tab_period)
        xv = _interp_table(tau + shift, tab_tau0, tab_dt, tab_states,
                           tab_derivs, tab_period)
        u_d, u_app, moment, Rb, gated_off, _deg = _controller_step(
            tau, s, xv, K, kP, kD, inertia, inertia_inv,
            u_max, cos_eta, p, prevR, uprev, shift)
        prevR = Rb

        h1 = _h1(s[:6], xc, cos_alpha)
        h2 = np.sqrt(u_d[0] ** 2 + u_d[1] ** 2 + u_d[2] ** 2) - u_max
        h3 = _h3(u_d, u_app, cos_eta)
        h4, h4_active = _h4(s[:6], xc, gamma1, gamma2, gamma3)
        range_ = np.sqrt((s[0] - xc[0]) ** 2 + (s[1] - xc[1]) ** 2
                         + (s[2] - xc[2]) ** 2)
        h1_bad = h1 > 0.0 and range_ > apex_radius
        admissible = (not h1_bad) and (h3 <= 0.0) and (
            (not h4_active) or h4 <= 0.0)

        if not admissible:
            viol_count += 1
            if h1_bad:
                viol_count_h1 += 1
            if viol_id == 0:
                viol_tau = tau
                if h1_bad:
                    viol_id = 1
                elif h3 > 0.0:
                    viol_id = 3
                else:
                    viol_id = 4

        if k % record_stride == 0 or k == n_steps or (
                stop_on_violation and not admissible):
            row = rec[nrec]
            row[COL_TAU] = tau
            row[COL_STATE:COL_STATE + 12] = s
            row[COL_CHIEF:COL_CHIEF + 6] = xc
            row[COL_XV:COL_XV + 6] = xv
            row[COL_UD:COL_UD + 3] = u_d
            row[COL_UAPP:COL_UAPP + 3] = u_app
            row[COL_M:COL_M + 3] = moment
            row[COL_SHIFT] = shift
            row[COL_H1] = h1
            row[COL_H2] = h2
            row[COL_H3] = h3
            row[COL_H4] = h4
            row[COL_H4ACT] = 1.0 if h4_active else 0.0
            row[COL_ADM] = 1.0 if admissible else 0.0
            row[COL_GATED] = 1.0 if gated_off else 0.0
            nrec += 1

        if stop_on_violation and not admissible:
            status = STATUS_STOPPED
            break
        if k == n_steps:
            break

        s = _rk4_step(tau, s, dt, u_app, moment, inertia, inertia_inv, p)
        s[6:9] = mrp_shadow(s[6:9])
        uprev = u_app

    return (status, nrec, rec, s, prevR, uprev,
            viol_tau, viol_id, viol_count, viol_count_h1)
