"""Command-line interface.

Subcommands
-----------
correct-orbit   converge the periodic reference orbit, write orbit.json
simulate        run one governed scenario, write simlog.csv + simlog.json
monte-carlo     run N perturbed scenarios, write mc_summary.json (+ per-run
                logs)
check-config    validate a config and echo the normalized form

Exit codes: 0 success, 2 bad usage / config error, 3 convergence failure,
4 runtime failure during simulation.  All outputs go under --out.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import parse_config, render_normalized
from .errors import ConfigError, ConvergenceError, RiccatiError
from .simkit import mc_summary, monte_carlo, prepare, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_RUNTIME = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cislunar-rvd",
        description="Constrained rendezvous simulation in a cislunar "
                    "periodic orbit with a time-shift governor.",
        epilog="Exit codes: 0 success; 2 bad usage or invalid config; "
               "3 orbit/gain convergence failure; 4 simulation runtime "
               "failure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True,
                       help="scenario config file (key = value [unit])")
        p.add_argument("--out", default=".",
                       help="output directory (created if missing)")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config entry (repeatable); VALUE "
                            "may carry a unit suffix")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--quiet", action="store_true",
                           help="suppress progress output")
        group.add_argument("--verbose", action="store_true",
                           help="extra diagnostics")

    p = sub.add_parser("correct-orbit",
                       help="converge the periodic orbit and write orbit.json")
    common(p)

    p = sub.add_parser("simulate", help="run one governed scenario")
    common(p)
    p.add_argument("--no-governor", action="store_true",
                   help="hold the initial time shift fixed (no updates)")

    p = sub.add_parser("monte-carlo",
                       help="run N scenarios from perturbed initial states")
    common(p)
    p.add_argument("--n", type=int, default=10, help="number of runs")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (defaults to sim.seed from the config)")
    p.add_argument("--no-governor", action="store_true",
                   help="hold the initial time shift fixed (no updates)")

    p = sub.add_parser("check-config",
                       help="validate a config and echo the normalized form")
    common(p)
    return parser


def _load_config(args):
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    config = parse_config(args.config, overrides=overrides)
    if getattr(args, "no_governor", False):
        from dataclasses import replace
        config = replace(config, governor_enabled=False)
    return config


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say(args, message):
    if not args.quiet:
        print(message)


def _cmd_check_config(args):
    config = parse_config(args.config, overrides={
        k.strip(): v.strip() for k, v in
        (item.split("=", 1) for item in args.set)})
    sys.stdout.write(render_normalized(config))
    return EXIT_OK


def _cmd_correct_orbit(args):
    config = _load_config(args)
    out = _outdir(args)
    from .reference import correct_periodic_orbit
    orbit = correct_periodic_orbit(config.orbit_guess, config.period_guess,
                                   config.system, tol=config.correction_tol)
    tu = config.system.time_unit_s
    payload = {
        "initial_state": [float(v) for v in orbit.initial_state],
        "period_tu": float(orbit.period),
        "period_days": float(orbit.period * tu / 86400.0),
        "residual": float(orbit.residual),
        "mu": config.system.mu,
    }
    path = out / "orbit.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    _say(args, f"periodic orbit converged: period "
               f"{payload['period_days']:.4f} days, residual "
               f"{payload['residual']:.3e} -> {path}")
    return EXIT_OK


def _cmd_simulate(args):
    config = _load_config(args)
    out = _outdir(args)
    prep = prepare(config)
    _say(args, f"orbit period {prep.orbit.period:.6f} TU; running "
               f"{config.duration_periods:g} periods "
               f"(governor {'on' if config.governor_enabled else 'off'})")
    log = run_scenario(config, prepared=prep)
    log.write_csv(out / "simlog.csv")
    log.write_json(out / "simlog.json")
    s = log.summary
    _say(args, f"final separation {s['final_separation_km'] * 1e3:.3f} m, "
               f"relative speed "
               f"{s['final_relative_speed_km_s'] * 1e6:.4f} mm/s, "
               f"violations {s['violation_count']}")
    if args.verbose:
        print(json.dumps(s, indent=2))
    return EXIT_OK


def _cmd_monte_carlo(args):
    config = _load_config(args)
    out = _outdir(args)
    seed = args.seed if args.seed is not None else config.seed
    prep = prepare(config)
    _say(args, f"running {args.n} perturbed scenarios (seed {seed})")
    logs = monte_carlo(config, args.n, seed, prepared=prep)
    for i, log in enumerate(logs):
        log.write_json(out / f"simlog_run{i:02d}.json")
    logs[0].write_csv(out / "simlog.csv")
    logs[0].write_json(out / "simlog.json")
    summary = mc_summary(logs)
    summary["seed"] = seed
    (out / "mc_summary.json").write_text(
        json.dumps(summary, indent=2) + "\n")
    worst = max(summary["final_separation_km"])
    _say(args, f"all admissible: {summary['all_admissible']}; worst final "
               f"separation {worst * 1e3:.3f} m -> {out / 'mc_summary.json'}")
    return EXIT_OK


_COMMANDS = {
    "check-config": _cmd_check_config,
    "correct-orbit": _cmd_correct_orbit,
    "simulate": _cmd_simulate,
    "monte-carlo": _cmd_monte_carlo,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, RiccatiError) as exc:
        print(f"error: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
