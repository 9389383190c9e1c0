"""Figure rendering for cislunar rendezvous simulation logs.

Stateless post-processing: reads the simulator's ``simlog.csv`` /
``simlog.json`` artifacts and writes publication-style figures.  No live coupling
to the simulator — everything flows through the documented log files.
"""

from .figures import (FIGURE_KINDS, FigureSpec, constraint_series,
                      relative_motion_series, render, time_shift_series)
from .logdata import LogData, MissingColumnError, load_log

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "LogData",
    "MissingColumnError",
    "constraint_series",
    "load_log",
    "relative_motion_series",
    "render",
    "time_shift_series",
    "__version__",
]
