"""Constrained spacecraft rendezvous in cislunar periodic orbits.

Translational dynamics in the Sun-perturbed Earth-Moon rotating frame, an
orbit-averaged LQR thrust law, geometric attitude tracking of the thrust
direction, mission constraints (line-of-sight cone, thrust limits, approach
velocity), and a time-shift governor that phases the rendezvous target along
the reference orbit to keep the predicted closed loop constraint-admissible.
"""

from .attitude import (dcm_to_mrp, euler_dynamics, mrp_kinematics,
                       mrp_shadow, mrp_to_dcm, vee)
from .constraints import ConstraintParams, ConstraintReport, evaluate
from .control import (GainSet, ThrustCommand, alqr_thrust, attitude_errors,
                      build_gain_set, control_moment, desired_attitude,
                      solve_care, thrust_gate)
from .dynamics import (SystemParams, jacobi_constant,
                       linearize_translational, pseudo_potentials,
                       sun_position, translational_derivative)
from .errors import (ConfigError, ConvergenceError, DegenerateGeometryError,
                     RiccatiError, SingularityError)
from .governor import (PredictionModels, PredictionResult, bisect_shift,
                       predict_closed_loop, update_time_shift)
from .reference import (DenseTrajectory, ReferenceOrbit, TimeShiftState,
                        build_chief_trajectory, build_dense_trajectory,
                        chief_state, correct_periodic_orbit, stm_propagate,
                        virtual_target)
from .simkit import (IntegratorSettings, ScenarioConfig, SimLog,
                     initial_deputy_state, integrate, mc_summary,
                     monte_carlo, prepare, run_scenario)
from .config import parse_config, render_normalized

__version__ = "0.1.0"

__all__ = [
    "SystemParams", "sun_position", "pseudo_potentials",
    "translational_derivative", "linearize_translational", "jacobi_constant",
    "mrp_to_dcm", "dcm_to_mrp", "mrp_kinematics", "mrp_shadow",
    "euler_dynamics", "vee",
    "ReferenceOrbit", "DenseTrajectory", "TimeShiftState",
    "correct_periodic_orbit", "stm_propagate", "build_dense_trajectory",
    "build_chief_trajectory", "chief_state", "virtual_target",
    "GainSet", "ThrustCommand", "build_gain_set", "solve_care",
    "alqr_thrust", "desired_attitude", "attitude_errors", "control_moment",
    "thrust_gate",
    "ConstraintParams", "ConstraintReport", "evaluate",
    "PredictionModels", "PredictionResult", "predict_closed_loop",
    "bisect_shift", "update_time_shift",
    "ScenarioConfig", "IntegratorSettings", "SimLog", "integrate",
    "prepare", "initial_deputy_state", "run_scenario", "monte_carlo",
    "mc_summary",
    "parse_config", "render_normalized",
    "ConfigError", "ConvergenceError", "DegenerateGeometryError",
    "RiccatiError", "SingularityError",
]
