"""Scenario configuration: unit-suffixed key/value files.

Format: one ``key.path = value [unit]`` per line, ``#`` comments, lists in
brackets.  Every dimensional quantity carries an explicit unit suffix and is
converted to nondimensional LU/TU at load; the core never sees SI values.

``render_normalized`` emits the nondimensionalized config in the same format
(with the original dimensional value echoed in a comment), so its output can
be re-ingested and reproduces the identical normalized configuration.
"""

import math
import re
from pathlib import Path

import numpy as np

from .dynamics import SystemParams
from .errors import ConfigError
from .simkit import ScenarioConfig

# Conversion kinds: how a raw (value, unit) pair becomes nondimensional.
# lu/tu are length_unit_km and time_unit_s of the system block.
_KIND_FACTORS = {
    "plain": {None: lambda lu, tu: 1.0},
    "length": {None: lambda lu, tu: 1.0, "lu": lambda lu, tu: 1.0,
               "km": lambda lu, tu: 1.0 / lu,
               "m": lambda lu, tu: 1e-3 / lu},
    "time": {None: lambda lu, tu: 1.0, "tu": lambda lu, tu: 1.0,
             "s": lambda lu, tu: 1.0 / tu,
             "min": lambda lu, tu: 60.0 / tu,
             "hour": lambda lu, tu: 3600.0 / tu,
             "day": lambda lu, tu: 86400.0 / tu},
    "speed": {None: lambda lu, tu: 1.0,
              "km/s": lambda lu, tu: tu / lu,
              "m/s": lambda lu, tu: 1e-3 * tu / lu},
    "accel": {None: lambda lu, tu: 1.0,
              "km/s2": lambda lu, tu: tu * tu / lu,
              "m/s2": lambda lu, tu: 1e-3 * tu * tu / lu},
    "angle": {None: lambda lu, tu: 1.0, "rad": lambda lu, tu: 1.0,
              "deg": lambda lu, tu: math.pi / 180.0},
    "rate": {None: lambda lu, tu: 1.0,
             "1/s": lambda lu, tu: tu},
    "torque": {None: lambda lu, tu: 1.0,          # nondim: N*m scaled by TU^2
               "n*m": lambda lu, tu: tu * tu},
    "torque_rate": {None: lambda lu, tu: 1.0,     # N*m*s scaled by TU
                    "n*m*s": lambda lu, tu: tu},
}

# key -> (type, kind); type: float | int | bool | list
_SCHEMA = {
    "system.mu": ("float", "plain"),
    "system.mu_sun": ("float", "plain"),
    "system.a_sun": ("float", "length"),
    "system.omega_sun": ("float", "plain"),
    "system.theta0": ("float", "angle"),
    "system.length_unit": ("float", "plain"),   # km by definition
    "system.time_unit": ("float", "plain"),     # s by definition
    "orbit.initial_state": ("list", "plain"),
    "orbit.period_guess": ("float", "time"),
    "orbit.correction_tol": ("float", "plain"),
    "gains.q_weights": ("list", "plain"),
    "gains.r_weights": ("list", "plain"),
    "gains.n_average": ("int", "plain"),
    "gains.kp_attitude": ("float", "torque"),
    "gains.kd_attitude": ("float", "torque_rate"),
    "gains.inertia": ("list", "plain"),         # kg*m^2, kept dimensional
    "constraints.alpha": ("float", "angle"),
    "constraints.eta": ("float", "angle"),
    "constraints.u_max": ("float", "accel"),
    "constraints.gamma1": ("float", "length"),
    "constraints.gamma2": ("float", "rate"),
    "constraints.gamma3": ("float", "speed"),
    "constraints.epsilon": ("float", "plain"),
    "constraints.los_apex_radius": ("float", "length"),
    "constraints.h5_enabled": ("bool", "plain"),
    "constraints.tau_pred_periods": ("float", "plain"),
    "governor.initial_shift": ("float", "time"),
    "governor.shift_max": ("float", "time"),
    "governor.update_period": ("float", "time"),
    "governor.bisection_steps": ("int", "plain"),
    "governor.resolution": ("float", "time"),
    "governor.enabled": ("bool", "plain"),
    "sim.duration_periods": ("float", "plain"),
    "sim.control_period": ("float", "time"),
    "sim.log_stride": ("int", "plain"),
    "sim.seed": ("int", "plain"),
    "mc.position_scale": ("float", "length"),
    "mc.velocity_scale": ("float", "speed"),
    "deputy.state": ("list", "plain"),
}

_REQUIRED = (
    "system.mu", "orbit.initial_state", "orbit.period_guess",
    "constraints.alpha", "constraints.eta", "constraints.u_max",
    "constraints.gamma1", "constraints.gamma2", "constraints.gamma3",
    "governor.initial_shift", "governor.update_period",
    "sim.control_period",
)

_LINE_RE = re.compile(r"^\s*([A-Za-z0-9_.]+)\s*=\s*(.+?)\s*$")


def _strip_comment(line):
    out = []
    for ch in line:
        if ch == "#":
            break
        out.append(ch)
    return "".join(out)


def _parse_value(key, text):
    text = text.strip()
    if text.startswith("["):
        close = text.index("]")
        body = text[1:close]
        unit = text[close + 1:].strip() or None
        values = [float(tok) for tok in body.replace(",", " ").split()]
        return values, unit
    parts = text.split()
    if len(parts) == 1:
        return parts[0], None
    if len(parts) == 2:
        return parts[0], parts[1]
    raise ConfigError(f"{key}: cannot parse value {text!r}")


def parse_raw(text):
    """Parse the file into {key: (raw_value, unit)} without conversion."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line).strip()
        if not line:
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'key = value', got "
                              f"{line!r}")
        key = m.group(1).lower()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = _parse_value(key, m.group(2))
    return raw


def _convert(key, raw_value, unit, lu, tu):
    typ, kind = _SCHEMA[key]
    factors = _KIND_FACTORS[kind]
    unit_key = unit.lower() if unit is not None else None
    if unit_key not in factors:
        raise ConfigError(f"{key}: unsupported unit {unit!r}")
    factor = factors[unit_key](lu, tu)
    if typ == "list":
        return [float(v) * factor for v in raw_value]
    if typ == "bool":
        if str(raw_value).lower() in ("true", "1", "yes"):
            return True
        if str(raw_value).lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw_value!r}")
    if typ == "int":
        return int(float(raw_value))
    return float(raw_value) * factor


def parse_config(source, overrides=None):
    """Load a ScenarioConfig from a path, or directly from config text."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text()
    else:
        text = str(source)
    raw = parse_raw(text)
    if overrides:
        for key, value in overrides.items():
            key = key.lower()
            if key not in _SCHEMA:
                raise ConfigError(f"override: unknown key {key!r}")
            raw[key] = _parse_value(key, value)
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    lu = float(raw.get("system.length_unit", ("384399", None))[0])
    tu = float(raw.get("system.time_unit", ("375200", None))[0])

    def get(key, default=None):
        if key not in raw:
            return default
        value, unit = raw[key]
        return _convert(key, value, unit, lu, tu)

    try:
        system = SystemParams(
            mu=get("system.mu"),
            mu_sun=get("system.mu_sun", 0.0),
            a_sun=get("system.a_sun", 388.811143),
            omega_sun=get("system.omega_sun", -0.9252),
            theta0=get("system.theta0", 0.0),
            length_unit_km=lu,
            time_unit_s=tu,
        )
        config = ScenarioConfig(
            system=system,
            orbit_guess=np.array(get("orbit.initial_state")),
            period_guess=get("orbit.period_guess"),
            correction_tol=get("orbit.correction_tol", 1e-10),
            q_weights=tuple(get("gains.q_weights",
                                [1e6, 1e6, 1e6, 1e3, 1e3, 1e3])),
            r_weights=tuple(get("gains.r_weights", [10.0, 10.0, 10.0])),
            n_average=get("gains.n_average", 240),
            kp_attitude=get("gains.kp_attitude", 0.1125 * tu * tu),
            kd_attitude=get("gains.kd_attitude", 40.5 * tu),
            inertia_diag=tuple(get("gains.inertia",
                                   [4500.0, 4500.0, 1500.0])),
            alpha=get("constraints.alpha"),
            eta=get("constraints.eta"),
            u_max=get("constraints.u_max"),
            gamma1=get("constraints.gamma1"),
            gamma2=get("constraints.gamma2"),
            gamma3=get("constraints.gamma3"),
            epsilon=get("constraints.epsilon", 1e-4),
            h5_enabled=get("constraints.h5_enabled", False),
            los_apex_radius=get("constraints.los_apex_radius", 0.0),
            tau_pred_periods=get("constraints.tau_pred_periods", 1.0),
            initial_shift=get("governor.initial_shift"),
            shift_max=get("governor.shift_max"),
            update_period=get("governor.update_period"),
            bisection_steps=get("governor.bisection_steps", 12),
            shift_resolution=get("governor.resolution"),
            governor_enabled=get("governor.enabled", True),
            duration_periods=get("sim.duration_periods", 2.0),
            control_period=get("sim.control_period"),
            log_stride=get("sim.log_stride", 1),
            seed=get("sim.seed", 0),
            mc_position_scale=get("mc.position_scale", 0.0),
            mc_velocity_scale=get("mc.velocity_scale", 0.0),
            deputy_state=(np.array(get("deputy.state"))
                          if "deputy.state" in raw else None),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return config


def _fmt(value):
    return repr(float(value))


def render_normalized(config):
    """Emit the nondimensionalized config in re-ingestable form.

    Dimensional echoes appear as trailing comments so a human can check the
    scenario constants at a glance.
    """
    lu = config.system.length_unit_km
    tu = config.system.time_unit_s
    deg = 180.0 / math.pi
    lines = [
        "# normalized scenario configuration (all values nondimensional "
        "LU/TU unless noted)",
        f"system.mu = {_fmt(config.system.mu)}",
        f"system.mu_sun = {_fmt(config.system.mu_sun)}",
        f"system.a_sun = {_fmt(config.system.a_sun)}",
        f"system.omega_sun = {_fmt(config.system.omega_sun)}",
        f"system.theta0 = {_fmt(config.system.theta0)} rad",
        f"system.length_unit = {_fmt(lu)}",
        f"system.time_unit = {_fmt(tu)}",
        "orbit.initial_state = [" + ", ".join(
            repr(float(v)) for v in config.orbit_guess) + "]",
        f"orbit.period_guess = {_fmt(config.period_guess)}",
        f"orbit.correction_tol = {_fmt(config.correction_tol)}",
        "gains.q_weights = [" + ", ".join(
            repr(float(v)) for v in config.q_weights) + "]",
        "gains.r_weights = [" + ", ".join(
            repr(float(v)) for v in config.r_weights) + "]",
        f"gains.n_average = {config.n_average}",
        f"gains.kp_attitude = {_fmt(config.kp_attitude)}"
        f"  # {config.kp_attitude / tu / tu:.6g} N*m",
        f"gains.kd_attitude = {_fmt(config.kd_attitude)}"
        f"  # {config.kd_attitude / tu:.6g} N*m*s",
        "gains.inertia = [" + ", ".join(
            repr(float(v)) for v in config.inertia_diag) + "]  # kg*m^2",
        f"constraints.alpha = {_fmt(config.alpha)} rad"
        f"  # {config.alpha * deg:.6g} deg",
        f"constraints.eta = {_fmt(config.eta)} rad"
        f"  # {config.eta * deg:.6g} deg",
        f"constraints.u_max = {_fmt(config.u_max)}"
        f"  # {config.u_max * lu / tu / tu:.6g} km/s2",
        f"constraints.gamma1 = {_fmt(config.gamma1)}"
        f"  # {config.gamma1 * lu:.6g} km",
        f"constraints.gamma2 = {_fmt(config.gamma2)}"
        f"  # {config.gamma2 / tu:.6g} 1/s",
        f"constraints.gamma3 = {_fmt(config.gamma3)}"
        f"  # {config.gamma3 * lu / tu:.6g} km/s",
        f"constraints.epsilon = {_fmt(config.epsilon)}",
        f"constraints.los_apex_radius = {_fmt(config.los_apex_radius)}"
        f"  # {config.los_apex_radius * lu:.6g} km",
        f"constraints.h5_enabled = {str(config.h5_enabled).lower()}",
        f"constraints.tau_pred_periods = {_fmt(config.tau_pred_periods)}",
        f"governor.initial_shift = {_fmt(config.initial_shift)}"
        f"  # {config.initial_shift * tu / 60.0:.6g} min",
        f"governor.update_period = {_fmt(config.update_period)}"
        f"  # {config.update_period * tu / 3600.0:.6g} hour",
        f"governor.bisection_steps = {config.bisection_steps}",
        f"governor.enabled = {str(config.governor_enabled).lower()}",
        f"sim.duration_periods = {_fmt(config.duration_periods)}",
        f"sim.control_period = {_fmt(config.control_period)}"
        f"  # {config.control_period * tu:.6g} s",
        f"sim.log_stride = {config.log_stride}",
        f"sim.seed = {config.seed}",
        f"mc.position_scale = {_fmt(config.mc_position_scale)}"
        f"  # {config.mc_position_scale * lu:.6g} km",
        f"mc.velocity_scale = {_fmt(config.mc_velocity_scale)}"
        f"  # {config.mc_velocity_scale * lu / tu:.6g} km/s",
    ]
    if config.shift_max is not None:
        lines.append(f"governor.shift_max = {_fmt(config.shift_max)}")
    if config.shift_resolution is not None:
        lines.append(f"governor.resolution = {_fmt(config.shift_resolution)}")
    if config.deputy_state is not None:
        lines.append("deputy.state = [" + ", ".join(
            repr(float(v)) for v in config.deputy_state) + "]")
    return "\n".join(lines) + "\n"
