"""Command-line front end for the insertion experiments.

Subcommands:
  run       execute one scenario, write trace CSV + summary JSON
  compare   run the four controllers on a shared world and rank them
  sweep     misalignment sweep over initial tilts
  validate  check a scenario config file and exit

Exit codes: 0 on success, 1 on a bad config, 2 when a run ended in a
safety stop.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import harness
from .harness import (
    CONTROLLER_NAMES,
    ConfigInvalid,
    IncompatibleScenarios,
    PRESET_NAMES,
    SweepSpec,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SAFETY = 2


def _add_common(p):
    p.add_argument("--config", help="scenario config JSON (overrides --preset)")
    p.add_argument("--out", help="output directory for CSV/JSON artifacts")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--preset", default="nominal", choices=PRESET_NAMES,
                   help="built-in scenario family (default: nominal)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zerowrench",
        description="Zero-wrench insertion experiments: single runs, "
                    "controller comparisons and misalignment sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    _add_common(p_run)
    p_run.add_argument("--controller", default="DWDOB", choices=CONTROLLER_NAMES,
                       help="controller for preset runs (default: DWDOB)")

    p_cmp = sub.add_parser("compare", help="run all controllers on one world")
    _add_common(p_cmp)

    p_swp = sub.add_parser("sweep", help="initial-tilt misalignment sweep")
    _add_common(p_swp)
    p_swp.add_argument("--controller", default="DWDOB", choices=CONTROLLER_NAMES,
                       help="controller to sweep (default: DWDOB)")
    p_swp.add_argument("--trials", type=int, default=15,
                       help="number of uniformly spaced tilts (default: 15)")
    p_swp.add_argument("--workers", type=int, default=None,
                       help="process pool size (default: auto, 1 = serial)")

    p_val = sub.add_parser("validate", help="validate a scenario config file")
    p_val.add_argument("--config", required=True, help="scenario config JSON")
    return parser


def _load_scenario(args, controller=None):
    if args.config:
        scenario = harness.load_config(args.config)
    else:
        scenario = harness.preset_scenario(controller or "DWDOB",
                                           preset=args.preset)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigInvalid("seed: must be a non-negative integer")
        scenario = replace(scenario, seed=args.seed)
    return scenario


def _print_summary(summary):
    print(f"scenario {summary['name']} ({summary['controller']}): "
          f"depth {summary['final_depth_m'] * 1e3:.3f} mm, "
          f"peak force {summary['max_force_N']:.2f} N, "
          f"peak moment {summary['max_moment_Nm']:.3f} N m, "
          f"max rho {summary['max_rho_J']:.3e} J, "
          f"stop: {summary['stop_reason']}")


def cmd_run(args):
    scenario = _load_scenario(args, controller=args.controller)
    result = harness.run_scenario(scenario, out_dir=args.out)
    _print_summary(result.summary)
    return EXIT_SAFETY if result.summary["stopped"] else EXIT_OK


def cmd_compare(args):
    if args.config:
        base = harness.load_config(args.config)
        preset = args.preset
        scenarios = []
        for name in CONTROLLER_NAMES:
            s = harness.preset_scenario(name, preset=preset, seed=base.seed)
            s = replace(s, model=base.model, geom=base.geom,
                        sim=replace(
                            s.sim,
                            initial_pose=tuple(base.sim.initial_pose),
                            duration=base.sim.duration,
                            sensor_noise_std=base.sim.sensor_noise_std))
            scenarios.append(s)
    else:
        scenarios = [harness.preset_scenario(n, preset=args.preset)
                     for n in CONTROLLER_NAMES]
    if args.seed is not None:
        scenarios = [replace(s, seed=args.seed) for s in scenarios]
    report = harness.compare_controllers(scenarios, out_dir=args.out)
    for name in sorted(report.results):
        _print_summary(report.results[name].summary)
    print("ranking by final depth: " + ", ".join(report.ranking_by_depth))
    print("ranking by peak regulated wrench: "
          + ", ".join(report.ranking_by_peak_residual))
    stops = [n for n in report.results if report.results[n].summary["stopped"]]
    if stops:
        print("safety stops: " + ", ".join(sorted(stops)))
    return EXIT_OK


def cmd_sweep(args):
    base = _load_scenario(args, controller=args.controller)
    tilts = harness.default_misalignments(n=args.trials)
    spec = SweepSpec(base=base, misalignments=tilts, trials=len(tilts))
    report = harness.misalignment_sweep(spec, out_dir=args.out,
                                        workers=args.workers)
    for row in report.trials:
        status = "ok" if row["success"] else f"failed ({row['stop_reason']})"
        print(f"tilt {row['tilt_rad']:+.4f} rad: depth "
              f"{row['final_depth_m'] * 1e3:.3f} mm, {status}")
    print(f"successes: {report.success_count}/{len(report.trials)}")
    return EXIT_OK


def cmd_validate(args):
    scenario = harness.load_config(args.config)
    print(f"config ok: scenario {scenario.name!r}, controller "
          f"{scenario.controller}, seed {scenario.seed}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for safety stops
        return EXIT_OK if not exc.code else EXIT_CONFIG
    handlers = {"run": cmd_run, "compare": cmd_compare,
                "sweep": cmd_sweep, "validate": cmd_validate}
    try:
        return handlers[args.command](args)
    except (ConfigInvalid, IncompatibleScenarios) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
