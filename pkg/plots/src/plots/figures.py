"""Figure builders for simulation logs.

Each public builder takes a parsed :class:`~plots.logdata.LogData` and
returns a matplotlib ``Figure``; :func:`render` dispatches on a
:class:`FigureSpec` and writes the image to disk.  Builders are pure
readers — they never mutate the log and rendering the same spec twice
produces the same figure.

All dimensional quantities are scaled with the length/time units carried in
the log itself (``lu_km``/``tu_s``); with ``dimensional=False`` the raw
nondimensional values are plotted instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .logdata import LogData, load_log  # noqa: E402

__all__ = ["FigureSpec", "FIGURE_KINDS", "render",
           "time_shift_series", "relative_motion_series",
           "constraint_series"]

_SEC_PER_HR = 3600.0
_SEC_PER_MIN = 60.0


@dataclass
class FigureSpec:
    """What to draw, from which files, to which image."""

    kind: str
    log_path: str
    output_path: str
    json_path: Optional[str] = None
    dimensional: bool = True

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; "
                f"expected one of {sorted(FIGURE_KINDS)}")


def render(spec: FigureSpec) -> str:
    """Render one figure and write it to ``spec.output_path``."""
    log = load_log(spec.log_path, spec.json_path)
    fig = FIGURE_KINDS[spec.kind](log, dimensional=spec.dimensional)
    try:
        fig.savefig(spec.output_path, dpi=150)
    finally:
        plt.close(fig)
    return spec.output_path


# --------------------------------------------------------------------------
# series extraction (pure, unit-scaled)

def _time(log, dimensional):
    tau = log.column("tau")
    return (tau * (log.tu_s / _SEC_PER_HR), "time [hr]") if dimensional \
        else (tau, "time [TU]")


def time_shift_series(log: LogData, dimensional=True):
    """Governor time shift versus time.

    The returned shift series is the log's ``shift`` column scaled by a
    single constant, so its endpoints equal the log's first/last shift
    values exactly (up to that shared scale).
    """
    t, tlabel = _time(log, dimensional)
    shift = log.column("shift")
    if dimensional:
        return t, tlabel, shift * (log.tu_s / _SEC_PER_MIN), "time shift [min]"
    return t, tlabel, shift, "time shift [TU]"


def relative_motion_series(log: LogData, dimensional=True):
    """Deputy-Chief separation and relative speed versus time."""
    log.require("d_x", "d_vz", "c_x", "c_vz")
    t, tlabel = _time(log, dimensional)
    i, j = log.columns.index("d_x"), log.columns.index("c_x")
    rel = log.data[:, i:i + 6] - log.data[:, j:j + 6]
    sep = np.linalg.norm(rel[:, :3], axis=1)
    speed = np.linalg.norm(rel[:, 3:], axis=1)
    if dimensional:
        return (t, tlabel, sep * log.lu_km, "separation [km]",
                speed * (log.lu_km / log.tu_s) * 1e6, "relative speed [mm/s]")
    return t, tlabel, sep, "separation [LU]", speed, "speed [LU/TU]"


def constraint_series(log: LogData):
    """The logged constraint values h1..h4 (nondimensional by definition)."""
    return {name: log.column(name) for name in ("h1", "h2", "h3", "h4")}


# --------------------------------------------------------------------------
# figure builders

def _fig_time_shift(log, dimensional=True):
    t, tlabel, shift, slabel = time_shift_series(log, dimensional)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, shift, color="tab:blue")
    ax.set_xlabel(tlabel)
    ax.set_ylabel(slabel)
    ax.set_title("Time shift commanded by the governor")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _fig_constraints(log, dimensional=True):
    t, tlabel = _time(log, dimensional)
    series = constraint_series(log)
    active = log.column("h4_active")
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    titles = {
        "h1": "line-of-sight cone",
        "h2": "thrust magnitude",
        "h3": "thrust direction",
        "h4": "approach velocity",
    }
    for ax, (name, h) in zip(axes.ravel(), series.items()):
        if name == "h4":
            # the approach-velocity bound only participates inside its
            # activation radius; mask the inactive stretch
            h = np.where(active > 0.0, h, np.nan)
        ax.plot(t, h, lw=0.8)
        ax.axhline(0.0, color="k", lw=0.8, ls="--")
        ax.set_title(f"{name}: {titles[name]}")
        ax.grid(True, alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel(tlabel)
    fig.suptitle("Constraint values (h ≤ 0 satisfied)")
    fig.tight_layout()
    return fig


def _fig_relative_motion(log, dimensional=True):
    t, tlabel, sep, seplabel, speed, speedlabel = \
        relative_motion_series(log, dimensional)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.semilogy(t, np.maximum(sep, np.finfo(float).tiny), color="tab:blue")
    ax1.set_ylabel(seplabel)
    ax1.grid(True, alpha=0.3)
    if log.summary is not None and "final_separation_km" in log.summary:
        final = log.summary["final_separation_km"]
        ax1.annotate(f"final: {final:.3g} km", xy=(t[-1], max(sep[-1],
                     np.finfo(float).tiny)),
                     xytext=(0.7, 0.85), textcoords="axes fraction")
    ax2.semilogy(t, np.maximum(speed, np.finfo(float).tiny),
                 color="tab:orange")
    ax2.set_ylabel(speedlabel)
    ax2.set_xlabel(tlabel)
    ax2.grid(True, alpha=0.3)
    fig.suptitle("Deputy-Chief relative motion")
    fig.tight_layout()
    return fig


def _fig_trajectory3d(log, dimensional=True):
    log.require("d_x", "d_z", "c_x", "c_z")
    scale = log.lu_km if dimensional else 1.0
    unit = "km" if dimensional else "LU"
    i, j = log.columns.index("d_x"), log.columns.index("c_x")
    dep = log.data[:, i:i + 3] * scale
    chief = log.data[:, j:j + 3] * scale
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot(*chief.T, color="tab:gray", lw=1.0, label="Chief")
    ax.plot(*dep.T, color="tab:blue", lw=0.8, label="Deputy")
    ax.scatter(*dep[0], color="tab:green", s=25, label="Deputy start")
    ax.scatter(*chief[-1], color="tab:red", s=25, label="end")
    ax.set_xlabel(f"x [{unit}]")
    ax.set_ylabel(f"y [{unit}]")
    ax.set_zlabel(f"z [{unit}]")
    ax.set_title("Rotating-frame trajectories")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    return fig


def _fig_control(log, dimensional=True):
    log.require("ud_x", "u_z", "gated_off")
    t, tlabel = _time(log, dimensional)
    i, j = log.columns.index("ud_x"), log.columns.index("u_x")
    u_d = np.linalg.norm(log.data[:, i:i + 3], axis=1)
    u = np.linalg.norm(log.data[:, j:j + 3], axis=1)
    if dimensional:
        # LU/TU^2 -> mm/s^2
        scale = log.lu_km / log.tu_s ** 2 * 1e6
        ulabel = "acceleration [mm/s$^2$]"
    else:
        scale = 1.0
        ulabel = "acceleration [LU/TU$^2$]"
    gated = log.column("gated_off") > 0.0
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(t, u_d * scale, lw=0.8, label="desired $|u_d|$")
    ax1.plot(t, u * scale, lw=0.8, label="applied $|u|$")
    ax1.set_ylabel(ulabel)
    ax1.legend(loc="upper right", fontsize=8)
    ax1.grid(True, alpha=0.3)
    ax2.step(t, gated.astype(float), where="post", color="tab:red", lw=0.8)
    ax2.set_ylabel("thrust gated off")
    ax2.set_yticks([0.0, 1.0])
    ax2.set_xlabel(tlabel)
    ax2.grid(True, alpha=0.3)
    fig.suptitle("Translational control")
    fig.tight_layout()
    return fig


def _fig_attitude(log, dimensional=True):
    log.require("d_s1", "d_w3")
    t, tlabel = _time(log, dimensional)
    i = log.columns.index("d_s1")
    sigma = log.data[:, i:i + 3]
    omega = log.data[:, i + 3:i + 6]
    if dimensional:
        # rad/TU -> deg/hr
        wscale = np.degrees(1.0) / log.tu_s * _SEC_PER_HR
        wlabel = "body rate [deg/hr]"
    else:
        wscale = 1.0
        wlabel = "body rate [rad/TU]"
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for k in range(3):
        ax1.plot(t, sigma[:, k], lw=0.8, label=f"$\\sigma_{k + 1}$")
        ax2.plot(t, omega[:, k] * wscale, lw=0.8,
                 label=f"$\\omega_{k + 1}$")
    ax1.set_ylabel("attitude (MRP) [-]")
    ax1.legend(loc="upper right", fontsize=8)
    ax1.grid(True, alpha=0.3)
    ax2.set_ylabel(wlabel)
    ax2.set_xlabel(tlabel)
    ax2.legend(loc="upper right", fontsize=8)
    ax2.grid(True, alpha=0.3)
    fig.suptitle("Deputy attitude and body rates")
    fig.tight_layout()
    return fig


FIGURE_KINDS = {
    "trajectory3d": _fig_trajectory3d,
    "time-shift": _fig_time_shift,
    "constraints": _fig_constraints,
    "relative-motion": _fig_relative_motion,
    "control": _fig_control,
    "attitude": _fig_attitude,
}
