"""Command-line interface: ``hybridcov {run,simulate,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage or input error,
3 numerical degeneracy.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from .distributions import RngStream
from .exceptions import CovTestError, InputError, NumericalDegeneracyError
from .fisher import run_test
from .io import read_matrix, write_outcome
from .models import MODELS
from .selfcheck import SUITES, run_suites
from .simulation import SimConfig, SimulationError, rejection_curve

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

SEED_ENV = "COVTEST_SEED"
DIST_FLAGS = {"gaussian": "gaussian", "t7": "t7", "laplace": "laplace"}

log = logging.getLogger("hybridcov")


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV}={raw!r} is not an integer") from None


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("values must be >= 1")
    return values


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def _alpha(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {v}")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser():
    seed = _default_seed()
    parser = argparse.ArgumentParser(
        prog="hybridcov",
        description="Hybrid Frobenius/leading-eigenvalue two-sample covariance test.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    run = sub.add_parser("run", help="test two CSV samples", formatter_class=fmt)
    run.add_argument("--sample1", required=True, help="CSV file, rows are observations")
    run.add_argument("--sample2", required=True, help="CSV file, rows are observations")
    run.add_argument("--m", type=_positive, default=1, help="number of leading eigenvalues")
    run.add_argument("--alpha", type=_alpha, default=0.05, help="nominal level")
    run.add_argument("--mc-draws", type=_positive, default=10000,
                     help="Monte-Carlo draws for the m > 1 p-value")
    run.add_argument("--seed", type=int, default=seed,
                     help=f"Monte-Carlo seed (default from ${SEED_ENV} when set)")
    run.add_argument("--format", choices=("json", "text"), default="text")
    run.add_argument("--out", help="write the outcome here instead of stdout")
    run.add_argument("--delimiter", default=",", help="CSV field delimiter")
    run.add_argument("--header", action="store_true", help="CSV files have a header line")

    sim = sub.add_parser("simulate", help="Monte-Carlo rejection rates", formatter_class=fmt)
    sim.add_argument("--model", choices=MODELS, required=True, help="covariance model")
    sim.add_argument("--delta-grid", type=_float_list, default=[0.0],
                     help="comma-separated alternative sizes")
    sim.add_argument("--dist", choices=sorted(DIST_FLAGS), default="gaussian",
                     help="distribution of the i.i.d. entries")
    sim.add_argument("--reps", type=_positive, default=500, help="replications per cell")
    sim.add_argument("--p", type=_positive, default=200, help="dimension")
    sim.add_argument("--n", type=_positive, default=100, help="sample size per group")
    sim.add_argument("--m", type=_int_list, default=[1],
                     help="comma-separated numbers of leading eigenvalues")
    sim.add_argument("--alpha", type=_alpha, default=0.05, help="nominal level")
    sim.add_argument("--mc-draws", type=_positive, default=10000,
                     help="Monte-Carlo draws for m > 1 p-values")
    sim.add_argument("--seed", type=int, default=seed,
                     help=f"master seed (default from ${SEED_ENV} when set)")
    sim.add_argument("--out", help="CSV report path; a JSON report is written next to it")
    sim.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="report printed to stdout when --out is not given")
    sim.add_argument("--workers", type=_positive, default=1, help="worker processes")

    val = sub.add_parser("validate", help="run the built-in oracle suites", formatter_class=fmt)
    val.add_argument("--suite", choices=sorted(SUITES), action="append",
                     help="restrict to one suite (repeatable); default all")
    return parser


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args):
    for path in (args.sample1, args.sample2):
        if not Path(path).is_file():
            print(f"error: cannot read sample file {path}", file=sys.stderr)
            return EXIT_INPUT
    x1 = read_matrix(args.sample1, args.delimiter, args.header)
    x2 = read_matrix(args.sample2, args.delimiter, args.header)
    outcome = run_test(x1, x2, args.m, args.alpha, args.mc_draws, RngStream(args.seed, 0))
    _emit(write_outcome(outcome, args.format, seed=args.seed), args.out)
    return EXIT_OK


def cmd_simulate(args):
    config = SimConfig(
        model=args.model, p=args.p, n=args.n, dist=args.dist, alpha=args.alpha,
        ms=tuple(args.m), draws=args.mc_draws, seed=args.seed,
    )
    report = rejection_curve(config, args.delta_grid, args.reps, args.workers)
    if args.out:
        out = Path(args.out)
        out.write_text(report.to_csv())
        out.with_suffix(".json").write_text(report.to_json())
        for row in report.rows:
            print(f"{row['model']} delta={row['delta']:g} {row['method']:<14} "
                  f"rate={row['rate']:.4f} reps={row['reps']}")
    else:
        sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_json() + "\n")
    return EXIT_OK


def cmd_validate(args):
    failed = []
    for name, passed, message in run_suites(args.suite):
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {message}")
        if not passed:
            failed.append(name)
    if failed:
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {"run": cmd_run, "simulate": cmd_simulate, "validate": cmd_validate}


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NumericalDegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SimulationError as exc:
        cause = exc.__cause__
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(cause, NumericalDegeneracyError) else EXIT_INPUT
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CovTestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
