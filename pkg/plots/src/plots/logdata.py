"""Reading simulation logs for plotting.

The simulator writes two artifacts per run, documented by its ``simkit``
module:

* ``simlog.csv`` — one row per logged control step.  Two leading comment
  lines record the unit conventions and the length/time units
  (``# LU_km=... TU_s=...``), followed by a CSV header naming every column.
* ``simlog.json`` — run summary plus metadata (units, column names, shift
  history).

Everything here is read-only: logs are parsed into an in-memory table and
the unit scales are taken from the files themselves, never from re-derived
constants.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["LogData", "MissingColumnError", "load_log"]

_UNITS_RE = re.compile(r"LU_km=([0-9.eE+-]+)\s+TU_s=([0-9.eE+-]+)")


class MissingColumnError(KeyError):
    """A figure references a column the log does not provide."""

    def __init__(self, column):
        super().__init__(column)
        self.column = column

    def __str__(self):
        return f"log is missing required column {self.column!r}"


@dataclass
class LogData:
    """One parsed simulation log (time series plus optional JSON sidecar)."""

    data: np.ndarray
    columns: list
    lu_km: float
    tu_s: float
    summary: Optional[dict] = None
    meta: Optional[dict] = None
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {name: i for i, name in enumerate(self.columns)}

    def column(self, name):
        """Return one named column; raise MissingColumnError if absent."""
        if name not in self._index:
            raise MissingColumnError(name)
        return self.data[:, self._index[name]]

    def require(self, *names):
        for name in names:
            if name not in self._index:
                raise MissingColumnError(name)


def load_log(csv_path, json_path=None) -> LogData:
    """Parse a simulation log CSV, optionally joined with its JSON summary.

    Unit scales come from the JSON metadata when a sidecar is given and from
    the CSV's own unit comment otherwise.
    """
    comments = []
    with open(csv_path, newline="") as fh:
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            comments.append(line)
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        columns = next(reader)
    data = np.loadtxt(csv_path, delimiter=",", skiprows=len(comments) + 1,
                      ndmin=2)
    if data.shape[1] != len(columns):
        raise ValueError(
            f"{csv_path}: header names {len(columns)} columns but rows "
            f"have {data.shape[1]}")

    summary = meta = None
    if json_path is not None:
        with open(json_path) as fh:
            payload = json.load(fh)
        summary = payload.get("summary")
        meta = payload.get("meta")

    if meta is not None and "length_unit_km" in meta:
        lu, tu = meta["length_unit_km"], meta["time_unit_s"]
    else:
        match = next((m for m in map(_UNITS_RE.search, comments) if m), None)
        if match is None:
            raise ValueError(
                f"{csv_path}: no unit metadata (expected a "
                "'# LU_km=... TU_s=...' comment or a JSON sidecar)")
        lu, tu = float(match.group(1)), float(match.group(2))
    return LogData(data=data, columns=columns, lu_km=float(lu),
                   tu_s=float(tu), summary=summary, meta=meta)
