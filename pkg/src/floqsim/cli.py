"""Command-line interface: one subcommand per task plus figure reproduction.

Exit codes: 0 success, 2 configuration/parse failure, 3 run finished without
converging or certifying, 4 dense-oracle size limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .runner import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_ORACLE_LIMIT,
    TaskError,
    reproduce,
    run,
)

_TASK_COMMANDS = ("adapt", "spectrum", "deflate", "observe", "oracle", "decompose",
                  "build")

_COMMAND_TO_TASK = {
    "adapt": "adapt",
    "spectrum": "spectrum",
    "deflate": "deflation",
    "observe": "observe",
    "oracle": "oracle",
    "decompose": "decompose",
    "build": "build",
}


def _add_common(parser: argparse.ArgumentParser, config_required: bool) -> None:
    parser.add_argument(
        "--config",
        required=config_required,
        help="JSON experiment configuration file",
    )
    parser.add_argument("--out", help="output directory (default: FLOQSIM_OUT_DIR or ./results)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--threads", type=int, help="parallel workers for sweeps")
    parser.add_argument("--tag", help="output file prefix (default: the task name)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floqsim",
        description=(
            "Quasienergy spectra and time-dependent observables of periodically "
            "driven spin chains via adaptive variational statevector simulation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in _TASK_COMMANDS:
        p = sub.add_parser(command, help=f"run the {command} task")
        _add_common(p, config_required=(command != "decompose"))
        if command == "decompose":
            p.add_argument(
                "--kind",
                choices=("diagonal", "shift", "asym", "symmetric", "observable"),
                default="shift",
            )
            p.add_argument("--r", type=int, default=1, help="zone shift index")
            p.add_argument("--n-a", type=int, help="auxiliary qubit count")

    p = sub.add_parser("reproduce", help="run a bundled figure configuration set")
    p.add_argument("figure", choices=("fig2", "fig3", "fig4", "fig5", "figD1"))
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int, default=1)
    return parser


def _decompose_inline_config(args) -> str:
    if args.n_a is None:
        raise ConfigError("--n-a is required without --config")
    payload = {
        "task": "decompose",
        "model": "xyz",
        "model_params": {"L": 2},
        "omega": 1.0,
        "n_a": args.n_a,
        "decompose": {"kind": args.kind, "r": args.r},
    }
    return json.dumps(payload)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "reproduce":
        try:
            records = reproduce(args.figure, out=args.out, threads=args.threads)
        except TaskError as err:
            print(f"error: {err}", file=sys.stderr)
            return err.exit_code
        for record in records:
            summary = {k: record.results[k] for k in record.results
                       if k not in ("runs", "lines")}
            print(f"{record.task}: {json.dumps(summary, sort_keys=True, default=str)}")
        return EXIT_OK

    try:
        if args.command == "decompose" and args.config is None:
            text = _decompose_inline_config(args)
        else:
            text = Path(args.config).read_text()
        config = parse_config(text)
        task = _COMMAND_TO_TASK[args.command]
        if config.task != task:
            raise ConfigError(
                f"task: config declares {config.task!r} but the "
                f"{args.command} command expects {task!r}"
            )
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            from dataclasses import replace

            config = replace(config, **overrides)
    except (ConfigError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        record, code = run(config, out=args.out, tag=args.tag)
    except TaskError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except ValueError as err:
        message = str(err)
        print(f"error: {message}", file=sys.stderr)
        if "limited to" in message:
            return EXIT_ORACLE_LIMIT
        return EXIT_CONFIG

    summary = {
        k: v
        for k, v in record.results.items()
        if k in ("run", "distinct_quasienergies", "missing_count", "quasienergies",
                 "terms", "max_abs_difference")
    }
    print(f"{record.task}: {json.dumps(summary, sort_keys=True, default=str)}")
    return code


if __name__ == "__main__":
    sys.exit(main())
