"""Plot suite: log parsing, unit scaling, and all six figure kinds."""

import json
from pathlib import Path

import numpy as np
import pytest

from plots import (FIGURE_KINDS, FigureSpec, LogData, MissingColumnError,
                   load_log, relative_motion_series, render,
                   time_shift_series)
from plots.cli import main as cli_main

ARTIFACTS = Path(__file__).resolve().parents[2] / "artifacts"
SIMLOG_CSV = ARTIFACTS / "simlog.csv"
SIMLOG_JSON = ARTIFACTS / "simlog.json"

SEC_PER_MIN = 60.0


@pytest.fixture(scope="session")
def shipped_log():
    return load_log(SIMLOG_CSV, SIMLOG_JSON)


def synthetic_csv(path, columns, rows, lu=1000.0, tu=2000.0):
    with open(path, "w") as fh:
        fh.write("# units: synthetic\n")
        fh.write(f"# LU_km={lu:.6f} TU_s={tu:.6f}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def regulation_columns():
    """Column layout of a minimal but complete log."""
    return (["tau"]
            + [f"d_{c}" for c in ("x", "y", "z", "vx", "vy", "vz",
                                  "s1", "s2", "s3", "w1", "w2", "w3")]
            + [f"c_{c}" for c in ("x", "y", "z", "vx", "vy", "vz")]
            + [f"v_{c}" for c in ("x", "y", "z", "vx", "vy", "vz")]
            + ["ud_x", "ud_y", "ud_z", "u_x", "u_y", "u_z",
               "M_x", "M_y", "M_z", "shift",
               "h1", "h2", "h3", "h4", "h4_active", "admissible",
               "gated_off"])


def regulation_rows(n=5):
    """Rows of a tiny all-satisfied regulation-style log (h <= 0)."""
    cols = regulation_columns()
    rows = []
    for k in range(n):
        row = dict.fromkeys(cols, 0.0)
        row["tau"] = 0.1 * k
        row["d_x"] = 1.0 + 1e-6 * k
        row["c_x"] = 1.0
        row["h1"] = -1e-6
        row["h2"] = -1e-7
        row["h3"] = -1e-8
        row["h4"] = -1e-5
        row["h4_active"] = 1.0
        row["admissible"] = 1.0
        rows.append([row[c] for c in cols])
    return rows


class TestLoadLog:
    def test_shipped_log_parses(self, shipped_log):
        log = shipped_log
        assert log.data.ndim == 2
        assert log.data.shape[1] == len(log.columns)
        assert log.lu_km == pytest.approx(384399.0)
        assert log.tu_s == pytest.approx(375200.0)
        assert log.summary is not None
        assert log.meta["columns"] == log.columns

    def test_units_from_csv_comment_without_sidecar(self, tmp_path):
        path = synthetic_csv(tmp_path / "log.csv", ["tau", "shift"],
                             [[0.0, 0.5], [1.0, 0.25]], lu=1234.5, tu=678.9)
        log = load_log(path)
        assert log.lu_km == 1234.5
        assert log.tu_s == 678.9
        assert log.summary is None

    def test_missing_units_raises(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("tau,shift\n0.0,0.5\n")
        with pytest.raises(ValueError, match="unit metadata"):
            load_log(path)

    def test_missing_column_error_names_column(self, tmp_path):
        path = synthetic_csv(tmp_path / "log.csv", ["tau", "shift"],
                             [[0.0, 0.5]])
        log = load_log(path)
        with pytest.raises(MissingColumnError, match="h1"):
            log.column("h1")

    def test_header_row_mismatch_rejected(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("# LU_km=1.0 TU_s=1.0\ntau,shift\n0.0,0.5,9.9\n")
        with pytest.raises(ValueError, match="columns"):
            load_log(path)


class TestSeries:
    def test_time_shift_endpoints_exact(self, shipped_log):
        log = shipped_log
        _, _, shift_min, _ = time_shift_series(log, dimensional=True)
        scale = log.tu_s / SEC_PER_MIN
        raw = log.column("shift")
        assert shift_min[0] == raw[0] * scale
        assert shift_min[-1] == raw[-1] * scale
        # shipped scenario: starts at 15.828 min, ends at exactly zero
        # (CSV stores 12 significant digits, so rel ~1e-11 round trip)
        assert shift_min[0] == pytest.approx(15.828, rel=1e-10)
        assert shift_min[-1] == 0.0

    def test_time_shift_nondimensional_passthrough(self, shipped_log):
        _, _, shift, label = time_shift_series(shipped_log,
                                               dimensional=False)
        assert np.array_equal(shift, shipped_log.column("shift"))
        assert "TU" in label

    def test_dimensionalization_uses_log_units(self, tmp_path):
        # fake units in the file must drive the scaling
        path = synthetic_csv(tmp_path / "log.csv", ["tau", "shift"],
                             [[0.0, 1.0], [1.0, 0.0]], lu=7.0, tu=120.0)
        t, tlabel, shift, slabel = time_shift_series(load_log(path))
        assert shift[0] == 2.0      # 1 TU * 120 s / 60 s-per-min
        assert t[-1] == 1.0 / 30.0  # 1 TU * 120 s / 3600 s-per-hr
        assert "min" in slabel and "hr" in tlabel

    def test_relative_motion_final_matches_json_summary(self, shipped_log):
        log = shipped_log
        _, _, sep_km, _, speed, _ = relative_motion_series(log)
        # cross-file consistency: the curve's endpoint agrees with the
        # summary written by the simulator to CSV round-trip precision
        # (positions ~1 LU at 12 significant digits => ~1e-6 km in the
        # componentwise difference)
        assert sep_km[-1] == pytest.approx(
            log.summary["final_separation_km"], abs=2e-6)
        assert speed[-1] * 1e-6 == pytest.approx(
            log.summary["final_relative_speed_km_s"], abs=1e-9)
        # the figure's annotation comes straight from the JSON summary,
        # which is exact by construction
        assert isinstance(log.summary["final_separation_km"], float)

    def test_regulation_log_constraints_all_satisfied(self, tmp_path):
        path = synthetic_csv(tmp_path / "log.csv", regulation_columns(),
                             regulation_rows())
        log = load_log(path)
        from plots import constraint_series
        series = constraint_series(log)
        for h in series.values():
            assert np.max(h) <= 0.0


class TestRender:
    @pytest.mark.parametrize("kind", sorted(FIGURE_KINDS))
    def test_all_kinds_render_from_shipped_log(self, kind, tmp_path):
        out = tmp_path / f"{kind}.png"
        spec = FigureSpec(kind=kind, log_path=str(SIMLOG_CSV),
                          json_path=str(SIMLOG_JSON), output_path=str(out))
        assert render(spec) == str(out)
        assert out.stat().st_size > 0

    def test_rerender_is_idempotent(self, tmp_path):
        out = tmp_path / "shift.png"
        spec = FigureSpec(kind="time-shift", log_path=str(SIMLOG_CSV),
                          output_path=str(out))
        render(spec)
        first = out.stat().st_size
        render(spec)
        assert out.stat().st_size == first

    def test_nondimensional_toggle(self, tmp_path):
        out = tmp_path / "shift_nd.png"
        spec = FigureSpec(kind="time-shift", log_path=str(SIMLOG_CSV),
                          output_path=str(out), dimensional=False)
        render(spec)
        assert out.stat().st_size > 0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            FigureSpec(kind="pie", log_path="x.csv", output_path="x.png")

    def test_missing_column_propagates(self, tmp_path):
        path = synthetic_csv(tmp_path / "log.csv", ["tau", "shift"],
                             [[0.0, 0.5], [1.0, 0.0]])
        spec = FigureSpec(kind="constraints", log_path=str(path),
                          output_path=str(tmp_path / "c.png"))
        with pytest.raises(MissingColumnError, match="h1"):
            render(spec)

    def test_synthetic_full_log_renders_constraints(self, tmp_path):
        path = synthetic_csv(tmp_path / "log.csv", regulation_columns(),
                             regulation_rows())
        out = tmp_path / "c.png"
        render(FigureSpec(kind="constraints", log_path=str(path),
                          output_path=str(out)))
        assert out.stat().st_size > 0


class TestCli:
    def test_single_figure(self, tmp_path, capsys):
        out = tmp_path / "shift.png"
        rc = cli_main(["time-shift", "--log", str(SIMLOG_CSV),
                       "--json", str(SIMLOG_JSON), "--out", str(out)])
        assert rc == 0
        assert out.exists()
        assert str(out) in capsys.readouterr().out

    def test_all_figures_into_directory(self, tmp_path):
        outdir = tmp_path / "figs"
        rc = cli_main(["all", "--log", str(SIMLOG_CSV),
                       "--json", str(SIMLOG_JSON), "--out", str(outdir)])
        assert rc == 0
        for kind in FIGURE_KINDS:
            assert (outdir / f"{kind}.png").stat().st_size > 0

    def test_missing_file_exit_code(self, tmp_path, capsys):
        rc = cli_main(["time-shift", "--log", str(tmp_path / "nope.csv"),
                       "--out", str(tmp_path / "x.png")])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_missing_column_exit_code(self, tmp_path, capsys):
        path = synthetic_csv(tmp_path / "log.csv", ["tau", "shift"],
                             [[0.0, 0.5]])
        rc = cli_main(["constraints", "--log", str(path),
                       "--out", str(tmp_path / "c.png")])
        assert rc == 2
        assert "h1" in capsys.readouterr().err


class TestLogData:
    def test_column_lookup(self):
        log = LogData(data=np.array([[0.0, 1.0], [1.0, 2.0]]),
                      columns=["tau", "shift"], lu_km=1.0, tu_s=1.0)
        assert np.array_equal(log.column("shift"), [1.0, 2.0])
        with pytest.raises(MissingColumnError):
            log.require("tau", "h1")
