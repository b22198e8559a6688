"""Command line interface.

Subcommands:
  run       serve the sandbox + orchestrator APIs and tick in real time
  bench     headless run at full speed, writing series/summary/figures
  validate  load and check a config without running anything

Every tuning flag can also come from the environment with an EDGESCALE_
prefix (for example EDGESCALE_GAMMA=4). Precedence is flag, then
environment, then config file, then built-in default.

Exit codes: 0 success, 2 configuration or validation error, 3 runtime
failure (for example a port that cannot be bound).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import ValidationError
from .harness import load_run_config, run_headless, run_live, validate_run_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# flag destination -> EDGESCALE_ environment variable suffix
_ENV_KEYS = {
    "config": "CONFIG",
    "gamma": "GAMMA",
    "zone": "ZONE",
    "poll_period": "POLL_PERIOD",
    "window": "WINDOW",
    "seed": "SEED",
    "cooldown": "COOLDOWN",
    "min_replicas": "MIN_REPLICAS",
    "max_replicas": "MAX_REPLICAS",
    "target": "TARGET",
    "ticks": "TICKS",
    "out": "OUT",
    "dashboard_dir": "DASHBOARD_DIR",
    "location_listen": "LOCATION_LISTEN",
    "orchestrator_listen": "ORCHESTRATOR_LISTEN",
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="run config file (YAML)")
    parser.add_argument("--gamma", help="users-per-replica threshold")
    parser.add_argument("--zone", help="zone the decision engine monitors")
    parser.add_argument("--poll-period", dest="poll_period", help="decision engine poll period, seconds")
    parser.add_argument("--window", help="sliding window size, samples")
    parser.add_argument("--seed", help="scenario RNG seed")
    parser.add_argument("--cooldown", help="minimum seconds between scale actions")
    parser.add_argument("--min-replicas", dest="min_replicas", help="decision engine lower replica bound")
    parser.add_argument("--max-replicas", dest="max_replicas", help="decision engine upper replica bound")
    parser.add_argument("--target", help="deployment to scale, as namespace/name")
    parser.add_argument("--ticks", help="number of simulation ticks to run")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--location-listen", dest="location_listen", help="sandbox API bind, host:port")
    parser.add_argument("--orchestrator-listen", dest="orchestrator_listen", help="orchestrator API bind, host:port")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgescale",
        description="Edge microservice autoscaling sandbox: mobility simulator, "
        "zonal location API, orchestrator mock, and threshold decision engine.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="serve the APIs and tick in real time")
    _add_common_flags(run_p)
    run_p.add_argument("--dashboard-dir", dest="dashboard_dir", help="static dashboard directory to serve at /")

    bench_p = sub.add_parser("bench", help="headless full-speed run, writes artifacts")
    _add_common_flags(bench_p)
    bench_p.add_argument("--no-figures", action="store_true", help="skip rendering PNG figures")

    val_p = sub.add_parser("validate", help="check a config file and exit")
    _add_common_flags(val_p)
    return parser


def collect_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    for dest, suffix in _ENV_KEYS.items():
        env_value = os.environ.get(f"EDGESCALE_{suffix}")
        if env_value is not None and env_value != "":
            overrides[dest] = env_value
        flag_value = getattr(args, dest, None)
        if flag_value is not None:
            overrides[dest] = flag_value
    if getattr(args, "no_figures", False):
        overrides["figures"] = False
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    overrides = collect_overrides(args)
    config_path = overrides.pop("config", None)
    if config_path is None:
        print("error: --config is required (or set EDGESCALE_CONFIG)", file=sys.stderr)
        return EXIT_CONFIG

    try:
        config = load_run_config(config_path, overrides)
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        scenario = config.scenario
        print(f"config ok: scenario {scenario.name!r}, {scenario.total_users()} users, "
              f"{len(scenario.zones)} zones, seed {scenario.seed}")
        print(f"engine: zone={config.engine.monitored_zone} gamma={config.engine.gamma:g} "
              f"window={config.engine.window_size} poll={config.engine.poll_period_s:g}s "
              f"replicas=[{config.engine.min_replicas},{config.engine.max_replicas}]")
        print(f"run: {config.duration_ticks} ticks, output {config.output_dir}")
        return EXIT_OK

    try:
        if args.command == "bench":
            report = run_headless(config)
            s = report.summary
            print(f"bench done: {s['ticks']} ticks, {s['samples']} samples, "
                  f"{s['scale_actions']} scale actions "
                  f"({s['scale_ups']} up, {s['scale_downs']} down)")
            print(f"mean replicas (time weighted): {s['time_weighted_mean_replicas']:.3f}")
            print(f"artifacts in {report.out_dir}")
            return EXIT_OK
        # --ticks (or EDGESCALE_TICKS) bounds a live run; default runs
        # until interrupted
        max_ticks = int(overrides["ticks"]) if "ticks" in overrides else None
        run_live(config, max_ticks=max_ticks)
        return EXIT_OK
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
