"""Command line entry point: `ranklab <subcommand> ...`.

Exit codes: 0 success, 2 bad input or failed validation, 3 runtime error.
"""

import argparse
import json
import logging
import sys
from decimal import Decimal, InvalidOperation

from .curve_enum import CapExceededError, HeightInterval, count_minimal, enumerate_minimal_array
from .dataset import DatasetValidationError, EmptyWindowError
from .estimators import FitError, InsufficientSampleError, fit_rho, fit_theta, moving_series
from .fileio import (
    IngestError,
    atomic_write,
    fit_record,
    format_ratio_series,
    ingest_dataset,
    load_params,
    prediction_rows_text,
    write_census,
    write_dataset,
    write_json,
    write_ratio_series,
)
from .fixtures import run_fixtures
from .predictor import (
    SeriesDomainError,
    error_band,
    predict_avg_rank,
    predict_avg_selmer_rank,
    predict_pi_Rr,
    predict_pi_Rr_Sn,
    predict_pi_Sn,
)
from .reports import FIGURES, build_report, default_window
from .simulator import SimConfig, SimulationCapError, simulate_sequence

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RUNTIME = 3

log = logging.getLogger("ranklab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_int(text: str) -> int:
    """Parse an integer, allowing exact scientific notation such as 2.7e10."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    out = int(value)
    if abs(out) > 2**63 - 1:
        raise argparse.ArgumentTypeError(f"out of 64-bit range: {text!r}")
    return out


def parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ranklab", description="Rank statistics of elliptic curves by naive height.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", help="count (and optionally list) minimal curves by height")
    e.add_argument("--max-height", type=parse_int, required=True)
    e.add_argument("--interval", type=parse_int, nargs=2, metavar=("LO", "HI"))
    e.add_argument("--emit-curves", metavar="PATH")
    e.add_argument("--cap", type=parse_int, default=10_000_000)

    s = sub.add_parser("simulate", help="generate a seeded test-curve dataset")
    s.add_argument("--max-height", type=parse_int, required=True)
    s.add_argument("--seed", type=parse_int, required=True)
    s.add_argument("--params")
    s.add_argument("--mode", choices=("det", "bern"), default="det")
    s.add_argument("--out", required=True)

    r = sub.add_parser("ratios", help="moving ratios over consecutive height windows")
    r.add_argument("--data", required=True)
    r.add_argument("--stat", choices=("theta", "rho", "cov", "avgrank", "avgselrank"), required=True)
    r.add_argument("--n", type=int)
    r.add_argument("--window", type=parse_int, required=True)
    r.add_argument("--out")

    f = sub.add_parser("fit", help="fit theta_n or rho_n constants to a dataset")
    f.add_argument("--data", required=True)
    f.add_argument("--model", choices=("theta", "rho"), required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--window", type=parse_int)
    f.add_argument("--params")
    f.add_argument("--out")

    q = sub.add_parser("predict", help="model predictions")
    q.add_argument("--quantity", choices=("pi_sn", "pi_rn_sn", "pi_r", "avgrank", "avgselrank"), required=True)
    q.add_argument("--r", type=int)
    q.add_argument("--n", type=int)
    q.add_argument("--at", type=parse_float, required=True)
    q.add_argument("--method", choices=("quad", "series"))
    q.add_argument("--params")

    c = sub.add_parser("check", help="run the built-in reference fixtures")
    c.add_argument("--filter")

    rep = sub.add_parser("report", help="write a plot-ready CSV for one figure")
    rep.add_argument("--figure", choices=FIGURES, required=True)
    rep.add_argument("--data", required=True)
    rep.add_argument("--out", required=True)
    rep.add_argument("--window", type=parse_int)
    rep.add_argument("--params")
    return p


def _cmd_enumerate(args) -> int:
    lo, hi = (0, args.max_height) if args.interval is None else tuple(args.interval)
    if hi > args.max_height:
        raise UsageError("--interval HI exceeds --max-height")
    interval = HeightInterval(lo, hi)
    count = count_minimal(interval)
    print(f"lo,hi,count\n{lo},{hi},{count}")
    if args.emit_curves:
        write_census(args.emit_curves, enumerate_minimal_array(interval, cap=args.cap))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    mode = "deterministic" if args.mode == "det" else "bernoulli"
    cfg = SimConfig(max_height=args.max_height, seed=args.seed, params=load_params(args.params), count_mode=mode)
    data = simulate_sequence(cfg)
    write_dataset(args.out, data)
    print(f"wrote {len(data)} curves to {args.out}")
    return EXIT_OK


def _need_n(args, lo: int, hi: int) -> int:
    if args.n is None:
        raise UsageError(f"--n is required here ({lo}..{hi})")
    if not lo <= args.n <= hi:
        raise UsageError(f"--n must be between {lo} and {hi}")
    return args.n


def _cmd_ratios(args) -> int:
    data = ingest_dataset(args.data)
    if len(data) == 0:
        raise EmptyWindowError(f"{args.data}: dataset has no rows")
    n = None
    if args.stat == "theta":
        n = _need_n(args, 0, 5)
    elif args.stat == "rho":
        n = _need_n(args, 2, 5)
    elif args.stat == "cov":
        n = _need_n(args, 4, 5)
    points = moving_series(data, args.stat, n, args.window)
    if args.out:
        write_ratio_series(args.out, points)
    else:
        sys.stdout.write(format_ratio_series(points))
    return EXIT_OK


def _cmd_fit(args) -> int:
    data = ingest_dataset(args.data)
    window = args.window or default_window(data)
    params = load_params(args.params)
    if args.model == "rho":
        n = _need_n(args, 2, 5)
        points = [p for p in moving_series(data, "rho", n, window) if p.X >= 1 and 0 < p.value < 1]
        D, f, res = fit_rho(points, n)
        record = fit_record(n, "rho", {"D": D, "f": f}, res, len(points))
    else:
        n = _need_n(args, 1, 5)
        points = [p for p in moving_series(data, "theta", n, window) if p.X >= 1 and 0 < p.value < 1]
        C, e, res = fit_theta(points, n, params.s[n])
        record = fit_record(n, "theta", {"C": C, "e": e, "s": params.s[n]}, res, len(points))
    if args.out:
        write_json(args.out, record)
    else:
        print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def _cmd_predict(args) -> int:
    params = load_params(args.params)
    X = args.at
    q = args.quantity
    method = {"quad": "quadrature", "series": "series", None: None}[args.method]
    row = {"quantity": q, "r": args.r, "n": args.n, "X": repr(X)}
    if q == "pi_sn":
        n = _need_n(args, 1, 5)
        row["value"], row["error_band"] = predict_pi_Sn(n, X, params), error_band(n, X, params)
    elif q == "pi_rn_sn":
        n = _need_n(args, 1, 5)
        if args.r is None:
            raise UsageError("--r is required for pi_rn_sn")
        row["value"], row["error_band"] = predict_pi_Rr_Sn(args.r, n, X, params), error_band(n, X, params)
    elif q == "pi_r":
        if args.r is None or not 1 <= args.r <= 5:
            raise UsageError("--r between 1 and 5 is required for pi_r")
        row["value"], row["error_band"] = predict_pi_Rr(args.r, X, params), error_band(args.r, X, params)
    elif q == "avgrank":
        row["value"] = predict_avg_rank(X, params, method=method)
    else:
        row["value"] = predict_avg_selmer_rank(X, params)
    row["value"] = repr(float(row["value"]))
    if row.get("error_band") is not None:
        row["error_band"] = repr(float(row["error_band"]))
    sys.stdout.write(prediction_rows_text([row]))
    return EXIT_OK


def _cmd_check(args) -> int:
    failed = 0
    for fx, status, value in run_fixtures(args.filter):
        shown = "-" if value is None else repr(value)
        print(f"{status:7s} {fx.name}: expected {fx.expected!r}, got {shown}")
        failed += status == "FAIL"
    return EXIT_INVALID if failed else EXIT_OK


def _cmd_report(args) -> int:
    data = ingest_dataset(args.data)
    text = build_report(args.figure, data, args.window, load_params(args.params))
    with atomic_write(args.out) as fh:
        fh.write(text)
    return EXIT_OK


COMMANDS = {
    "enumerate": _cmd_enumerate,
    "simulate": _cmd_simulate,
    "ratios": _cmd_ratios,
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "check": _cmd_check,
    "report": _cmd_report,
}

INVALID_INPUT = (
    UsageError,
    IngestError,
    DatasetValidationError,
    EmptyWindowError,
    InsufficientSampleError,
    FitError,
    SeriesDomainError,
    CapExceededError,
    SimulationCapError,
    FileNotFoundError,
    ValueError,
)


def run(argv=None) -> int:
    """Parse argv, dispatch, and return the exit code."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except INVALID_INPUT as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - report anything else as a runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())
