"""Command-line front end.

Exit codes: 0 success, 2 config/validation error, 3 estimation failure,
4 I/O error (including malformed signal files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import InvalidArgumentError, synthesize
from .estimate import EstimationError, select_order, sequential_fit
from .io import (
    SCHEMA_VERSION,
    SignalFormatError,
    atomic_write,
    grid_from_config,
    load_config,
    model_from_config,
    optimizer_from_config,
    read_signal_csv,
    write_signal_csv,
)
from .montecarlo import McScenario, ScenarioError, run_scenario, write_raw_csv, write_stats_csv
from .optimize import OptimizerConfig
from .periodogram import GridSpec, surface

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ESTIMATION = 3
EXIT_IO = 4


def _write_json(doc, path):
    with atomic_write(path) as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _grid_for(args, n):
    return GridSpec.default(n, args.beta_decimation)


def cmd_simulate(args) -> int:
    doc = load_config(args.config)
    model = model_from_config(doc)
    n = args.n if args.n is not None else doc.get("n")
    if n is None:
        raise InvalidArgumentError("sample count missing: give --n or 'n' in the config")
    noiseless = bool(args.noiseless or doc.get("noiseless", False))
    signal = synthesize(model, int(n), args.seed, noiseless=noiseless)
    write_signal_csv(signal, args.out)
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "n": int(n),
        "seed": args.seed,
        "noiseless": noiseless,
        "model": model.to_dict(),
    }
    _write_json(sidecar, str(args.out) + ".model.json")
    return EXIT_OK


def _fit_report(fit, extra=None):
    doc = {"schema_version": SCHEMA_VERSION, **fit.to_dict()}
    if extra:
        doc.update(extra)
    return doc


def cmd_estimate(args) -> int:
    signal = read_signal_csv(args.input)
    grid = _grid_for(args, signal.n)
    cfg = OptimizerConfig()
    if args.p is not None:
        fit = sequential_fit(signal, args.p, args.method, grid, cfg, workers=args.threads)
        report = _fit_report(fit)
    elif args.k_max is not None:
        sel = select_order(signal, args.k_max, args.method, grid, cfg, workers=args.threads)
        fit = sel.fit
        report = _fit_report(fit, {"order_selection": {
            "k_max": args.k_max, "p_hat": sel.p_hat,
            "bic": {str(k + 1): v for k, v in enumerate(sel.bic)}}})
    else:
        raise InvalidArgumentError("give --p or --k-max")
    report["grid"] = grid.to_dict()
    _write_json(report, args.report)
    if args.residual:
        write_signal_csv(fit.residual, args.residual)
    return EXIT_OK


def cmd_order(args) -> int:
    args.p = None
    return cmd_estimate(args)


def cmd_mc(args) -> int:
    doc = load_config(args.config)
    model = model_from_config(doc)
    if "n" not in doc:
        raise InvalidArgumentError("scenario config needs 'n'")
    n = int(doc["n"])
    methods = args.methods.split(",") if args.methods else doc.get("methods", ["ALSE", "LSE"])
    scenario = McScenario(
        model=model,
        n=n,
        reps=int(args.reps if args.reps is not None else doc.get("reps", 100)),
        methods=tuple(methods),
        base_seed=args.seed,
        grid=grid_from_config(doc, n),
        optimizer=optimizer_from_config(doc),
        noiseless=bool(doc.get("noiseless", False)),
        name=str(doc.get("name", Path(args.config).stem)),
    )
    stats = run_scenario(scenario, workers=args.threads)
    write_stats_csv(stats, args.out)
    if args.raw:
        write_raw_csv(stats, args.raw)
    if args.summary:
        _write_json({
            "schema_version": SCHEMA_VERSION,
            "name": scenario.name,
            "n": n,
            "reps": scenario.reps,
            "base_seed": args.seed,
            "time_seconds": stats.elapsed,
            "failures": stats.failures,
        }, args.summary)
    return EXIT_OK


def cmd_surface(args) -> int:
    signal = read_signal_csv(args.input)
    a_lo, a_hi = args.alpha_range
    b_lo, b_hi = args.beta_range
    if args.alpha_count < 2 or args.beta_count < 2:
        raise InvalidArgumentError("surface needs at least 2 points per axis")
    alphas = np.linspace(a_lo, a_hi, args.alpha_count)
    betas = np.linspace(b_lo, b_hi, args.beta_count)
    values = surface(signal, alphas, betas)
    with atomic_write(args.out) as fh:
        fh.write("alpha,beta,I\n")
        for r, beta in enumerate(betas):
            for c, alpha in enumerate(alphas):
                fh.write(f"{float(alpha)!r},{float(beta)!r},{float(values[r, c])!r}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chirpest", description="Chirp parameter estimation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=1, help="cap on worker threads/processes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a signal CSV from a model config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--noiseless", action="store_true")
    p.set_defaults(func=cmd_simulate)

    for name, helptext in (("estimate", "fit p components (or select p by BIC)"),
                           ("order", "select the number of components by BIC")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--input", required=True)
        if name == "estimate":
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--p", type=int)
            group.add_argument("--k-max", type=int)
        else:
            p.add_argument("--k-max", type=int, required=True)
        p.add_argument("--method", type=str.upper, choices=("ALSE", "LSE"), default="ALSE")
        p.add_argument("--beta-decimation", type=int)
        p.add_argument("--report", required=True, help="JSON fit report path")
        p.add_argument("--residual", help="write the final residual series as a signal CSV")
        p.set_defaults(func=cmd_estimate if name == "estimate" else cmd_order)

    p = sub.add_parser("mc", help="run a Monte Carlo scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="statistics CSV path")
    p.add_argument("--reps", type=int)
    p.add_argument("--methods", help="comma-separated subset of ALSE,LSE")
    p.add_argument("--raw", help="per-replication estimates CSV path")
    p.add_argument("--summary", help="JSON path for timing and failure counts")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("surface", help="export I(alpha, beta) on a rectangular grid")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--beta-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--alpha-count", type=int, default=101)
    p.add_argument("--beta-count", type=int, default=101)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surface)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (SignalFormatError, OSError) as exc:
        print(f"chirpest: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidArgumentError as exc:
        print(f"chirpest: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EstimationError, ScenarioError) as exc:
        print(f"chirpest: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    sys.exit(main())
