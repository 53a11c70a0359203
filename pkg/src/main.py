"""Command-line front end for the QFI toolkit.

Sub-commands:
  analyze  collective and local Fisher analysis of one state
  sweep    usefulness of ghz_q(N, q) over a q grid, as CSV
  oracle   brute-force cross-check of a library result

Exit codes: 0 ok, 1 oracle mismatch, 2 invalid input, 3 dimension cap,
4 output not writable.
"""

import argparse
import logging
import sys
from typing import List, Optional

from config import DEFAULT_CONFIG, VERSION, QfiConfig, load_config
from errors import DimensionCapError, QfiError, SpecError
from cli_components.oracle_manager import TOLERANCES, run_oracle
from cli_components.report_manager import build_report, write_report
from cli_components.spec_parser import build_state, parse_state_spec
from cli_components.sweep_manager import FAMILIES, run_ghz_sweep, write_sweep_csv
from cli_components.table_view import render_table


EXIT_OK = 0
EXIT_ORACLE_FAIL = 1
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_OUTPUT = 4


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of tolerance and cap overrides")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")

    parser = argparse.ArgumentParser(prog="qfi", description="Quantum Fisher information of N-qubit states")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="Analyze one state")
    analyze.add_argument("--spec", required=True, help="inline JSON spec or path to a spec file")
    analyze.add_argument("--restarts", type=_nonnegative_int, default=None)
    analyze.add_argument("--seed", type=_nonnegative_int, default=None)
    analyze.add_argument("--format", choices=("json", "table"), default="json")
    analyze.add_argument("--out", help="write the report here instead of stdout")

    sweep = sub.add_parser("sweep", parents=[common], help="Sweep the ghz_q family over q")
    sweep.add_argument("--family", choices=FAMILIES, default="ghz_q")
    sweep.add_argument("--n", type=int, required=True)
    sweep.add_argument("--from", dest="q_start", type=float, required=True)
    sweep.add_argument("--to", dest="q_end", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--restarts", type=_nonnegative_int, default=None)
    sweep.add_argument("--seed", type=_nonnegative_int, default=None)

    oracle = sub.add_parser("oracle", parents=[common], help="Cross-check against a brute-force oracle")
    oracle.add_argument("--spec", required=True)
    oracle.add_argument("--check", choices=tuple(TOLERANCES), required=True)
    oracle.add_argument("--resolution", type=float, default=2.0, help="grid spacing in degrees (grid_lu)")
    oracle.add_argument("--restarts", type=_nonnegative_int, default=None)
    oracle.add_argument("--seed", type=_nonnegative_int, default=None)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def cmd_analyze(args: argparse.Namespace, config: QfiConfig) -> int:
    spec = parse_state_spec(args.spec, config=config)
    state = build_state(spec, config=config)
    restarts = config.default_restarts if args.restarts is None else args.restarts
    seed = config.default_seed if args.seed is None else args.seed
    report = build_report(spec, state, restarts, seed, config=config)
    if args.format == "table":
        text = render_table(report)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
    elif args.out:
        write_report(report, args.out)
    else:
        sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: QfiConfig) -> int:
    if args.n < 1:
        raise SpecError(f"--n must be a positive integer, got {args.n}")
    rows = run_ghz_sweep(args.n, args.q_start, args.q_end, args.steps, args.restarts, args.seed, config=config)
    write_sweep_csv(rows, args.out)
    print(f"Wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, config: QfiConfig) -> int:
    spec = parse_state_spec(args.spec, config=config)
    result = run_oracle(spec, args.check, args.resolution, args.restarts, args.seed, config=config)
    for line in result.lines():
        print(line)
    return EXIT_OK if result.passed else EXIT_ORACLE_FAIL


COMMANDS = {"analyze": cmd_analyze, "sweep": cmd_sweep, "oracle": cmd_oracle}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 on --help/--version
        return int(exc.code or 0)
    _configure_logging(args.verbose)

    try:
        config = load_config(args.config) if args.config else DEFAULT_CONFIG
        return COMMANDS[args.command](args, config)
    except DimensionCapError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except QfiError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        logging.exception("Failed to write output")
        print(f"Error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())
