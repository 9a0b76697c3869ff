"""Command-line interface.

Subcommands:
  run       execute a sweep (config file plus flag overrides) and emit results
  check     run the four standard regimes and print acceptance pass/fail lines
  defaults  print the built-in configuration document

Exit codes: 0 success, 1 validation failure, 2 acceptance-check failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .acceptance import run_acceptance
from .config import (
    OUTPUT_FORMATS,
    POLICY_NAMES,
    ConfigError,
    default_document,
    load_spec,
    run_experiment,
)
from .report import emit
from .simulator import BACKEND


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqmsim",
        description="Discrete-time router-buffer simulator for RED-family and fuzzy drop policies",
    )
    parser.add_argument("--backend", choices=("compiled", "python"),
                        help="force a simulation backend (default: compiled when built)")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a sweep and emit results")
    run_p.add_argument("--config", metavar="PATH", help="JSON configuration file")
    run_p.add_argument("--policy", choices=POLICY_NAMES, help="run a single policy")
    run_p.add_argument("--arrival", metavar="P[,P...]", help="arrival probabilities")
    run_p.add_argument("--departure", type=float, metavar="P", help="departure probability")
    run_p.add_argument("--slots", type=int, metavar="N", help="total slots per run")
    run_p.add_argument("--warmup", type=int, metavar="N", help="warm-up slots to discard")
    run_p.add_argument("--capacity", type=int, metavar="N", help="buffer capacity in packets")
    run_p.add_argument("--seed", metavar="N[,N...]", help="run seeds")
    run_p.add_argument("--format", choices=OUTPUT_FORMATS, help="output format")
    run_p.add_argument("--out", metavar="PATH|-", default="-", help="output file (default stdout)")

    check_p = sub.add_parser("check", help="run the standard regimes and report pass/fail")
    check_p.add_argument("--config", metavar="PATH", help="JSON configuration file")
    check_p.add_argument("--seed", type=int, metavar="N", help="override the check seed")
    check_p.add_argument("--slots", type=int, metavar="N", help="override total slots")
    check_p.add_argument("--warmup", type=int, metavar="N", help="override warm-up slots")

    defaults_p = sub.add_parser("defaults", help="print the default configuration document")
    defaults_p.add_argument("--out", metavar="PATH|-", default="-", help="output file (default stdout)")
    return parser


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected comma-separated numbers, got {text!r}") from exc


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected comma-separated integers, got {text!r}") from exc


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict = {"traffic": {}, "sweep": {}}
    if getattr(args, "policy", None):
        overrides["sweep"]["policies"] = [args.policy]
    if getattr(args, "arrival", None):
        overrides["sweep"]["arrival_probs"] = _parse_float_list(args.arrival, "--arrival")
    if getattr(args, "seed", None) is not None:
        if isinstance(args.seed, int):
            overrides["sweep"]["seeds"] = [args.seed]
        else:
            overrides["sweep"]["seeds"] = _parse_int_list(args.seed, "--seed")
    if getattr(args, "format", None):
        overrides["sweep"]["format"] = args.format
    if getattr(args, "departure", None) is not None:
        overrides["traffic"]["departure_prob"] = args.departure
    if getattr(args, "slots", None) is not None:
        overrides["traffic"]["total_slots"] = args.slots
    if getattr(args, "warmup", None) is not None:
        overrides["traffic"]["warmup_slots"] = args.warmup
    if getattr(args, "capacity", None) is not None:
        overrides["traffic"]["capacity"] = args.capacity
    return {k: v for k, v in overrides.items() if v}


def _write_out(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_run(args: argparse.Namespace) -> int:
    spec = load_spec(args.config, _overrides_from_args(args))
    rows = run_experiment(spec, backend=args.backend)
    _write_out(emit(rows, spec.output_format), args.out)
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    spec = load_spec(args.config, _overrides_from_args(args))
    outcome = run_acceptance(spec, backend=args.backend)
    for result in outcome.results:
        print(result.line())
    failed = sum(1 for r in outcome.results if not r.passed)
    print(f"{len(outcome.results) - failed}/{len(outcome.results)} checks passed "
          f"(backend: {args.backend or BACKEND})")
    return 0 if outcome.all_passed else 2


def _cmd_defaults(args: argparse.Namespace) -> int:
    _write_out(json.dumps(default_document(), indent=2) + "\n", args.out)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_defaults(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
