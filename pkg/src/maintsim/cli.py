"""Command-line front end.

Two subcommands: ``theory`` evaluates the closed-form error curves onto a
CSV grid, ``simulate`` runs a named experiment (fig4, fig5, fig6, moments)
and writes its CSV plus a JSON manifest that pins seed and configuration.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O error.
Outputs default into $MAINTSIM_OUTDIR (falling back to the working
directory) and depend only on the manifest and tool version: re-running a
command reproduces its files byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .analytic import ErrorQuery, error_asymptote, error_at, error_avg
from .errors import ParameterError
from .mobility import ModelParams
from .montecarlo import (
    ExperimentConfig,
    run_asymptotic_sweep,
    run_error_vs_count,
    run_error_vs_period,
    validate_conditional_moments,
)
from .output import RunManifest, write_csv, write_manifest

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3

EXPERIMENTS = ("fig4", "fig5", "fig6", "moments")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; keep usage at 1
        raise _UsageError(message)


def parse_grid(spec: str) -> list[float]:
    """Parse 'start:stop:step' (inclusive), 'a,b,c', or a single number."""
    try:
        if ":" in spec:
            start_s, stop_s, step_s = spec.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError
            values = []
            k = 0
            while True:
                v = start + k * step
                if v > stop + step * 1e-9:
                    break
                values.append(v)
                k += 1
            return values
        if "," in spec:
            return [float(v) for v in spec.split(",") if v]
        return [float(spec)]
    except ValueError:
        raise _UsageError(f"bad grid {spec!r}; expected start:stop:step, a,b,c or a number") from None


def read_config_file(path) -> dict:
    """Parse a key=value config file (# comments and blank lines allowed)."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise _UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _outdir(args) -> str:
    if args.outdir:
        return args.outdir
    return os.environ.get("MAINTSIM_OUTDIR", ".")


def _build_parser() -> _Parser:
    parser = _Parser(prog="maintsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"maintsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    theory = sub.add_parser("theory", help="evaluate closed-form error curves to CSV")
    theory.add_argument("--mode", required=True, choices=("error_t", "error_avg", "asymptote"))
    theory.add_argument("--sigma", type=float, required=True)
    theory.add_argument("--lambda", dest="lambda_rate", type=float, help="waypoint rate (1/s)")
    theory.add_argument("--C", dest="ratio_C", type=float, help="constant T/lambda ratio")
    theory.add_argument("--T", help="period grid start:stop:step, list, or scalar")
    theory.add_argument("--t", dest="t_grid", help="evaluation-time grid for error_t mode")
    theory.add_argument("--out", help="output CSV path")
    theory.add_argument("--outdir", help="output directory (default $MAINTSIM_OUTDIR or .)")

    sim = sub.add_parser("simulate", help="run a named experiment")
    sim.add_argument("experiment", choices=EXPERIMENTS)
    sim.add_argument("--config", help="key=value config file; flags override it")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--sigma", type=float)
    sim.add_argument("--lambda", dest="lambda_rate", type=float)
    sim.add_argument("--span", type=float)
    sim.add_argument("--T", help="period grid for fig5/fig6")
    sim.add_argument("--C", dest="ratio_C", type=float)
    sim.add_argument("--replications", type=int)
    sim.add_argument("--queries", type=int, help="query samples per replication")
    sim.add_argument("--samples", type=int, help="moment-validation sample count")
    sim.add_argument("--n-max", type=int, help="largest conditioned waypoint count")
    sim.add_argument("--out", help="output CSV path")
    sim.add_argument("--outdir", help="output directory (default $MAINTSIM_OUTDIR or .)")
    return parser


# ---------------------------------------------------------------------------
# theory


def cmd_theory(args) -> int:
    out = args.out or os.path.join(_outdir(args), f"theory_{args.mode}.csv")
    meta = {"mode": args.mode, "sigma": args.sigma, "tool": f"maintsim {__version__}"}

    if args.mode == "error_avg":
        if args.lambda_rate is None or args.T is None:
            raise _UsageError("error_avg mode needs --lambda and --T")
        grid = parse_grid(args.T)
        meta["lambda"] = args.lambda_rate
        rows = [
            (T, args.lambda_rate, args.sigma, error_avg(ErrorQuery(args.sigma, args.lambda_rate, T)))
            for T in grid
        ]
        header = ["T", "lambda", "sigma", "error_avg"]
    elif args.mode == "error_t":
        if args.lambda_rate is None or args.T is None or args.t_grid is None:
            raise _UsageError("error_t mode needs --lambda, a scalar --T and --t")
        T_vals = parse_grid(args.T)
        if len(T_vals) != 1:
            raise _UsageError("error_t mode takes a scalar --T")
        T = T_vals[0]
        meta["lambda"] = args.lambda_rate
        meta["T"] = T
        rows = [
            (t, error_at(ErrorQuery(args.sigma, args.lambda_rate, T, t=t)))
            for t in parse_grid(args.t_grid)
        ]
        header = ["t", "error_t"]
    else:  # asymptote
        if args.ratio_C is None or args.T is None:
            raise _UsageError("asymptote mode needs --C and --T")
        limit = error_asymptote(args.sigma, args.ratio_C)
        meta["C"] = args.ratio_C
        rows = []
        for T in parse_grid(args.T):
            lam = T / args.ratio_C
            rows.append((T, lam, args.sigma, error_avg(ErrorQuery(args.sigma, lam, T)), limit))
        header = ["T", "lambda", "sigma", "error_avg", "asymptote"]

    count = write_csv(out, header, rows, meta)
    print(f"wrote {count} rows -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


_DEFAULTS = {
    "fig4": dict(sigma=5.0, lambda_rate=0.1, span=100.0, seed=0, replications=10000, queries=1),
    "fig5": dict(
        sigma=5.0, lambda_rate=0.1, span=100.0, seed=0, replications=100, queries=20,
        T="20:200:20",
    ),
    "fig6": dict(
        sigma=10.0, lambda_rate=0.1, span=100.0, seed=0, replications=100, queries=20,
        T="20:200:20", ratio_C=50.0,
    ),
    "moments": dict(
        sigma=5.0, lambda_rate=0.1, span=100.0, seed=0, samples=100000, n_max=6,
    ),
}

_CONFIG_TYPES = {
    "sigma": float,
    "lambda_rate": float,
    "span": float,
    "seed": int,
    "replications": int,
    "queries": int,
    "samples": int,
    "n_max": int,
    "ratio_C": float,
    "T": str,
}


def _resolve_settings(args) -> dict:
    settings = dict(_DEFAULTS[args.experiment])
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in _CONFIG_TYPES:
                raise _UsageError(f"unknown config key {key!r}")
            settings[key] = _CONFIG_TYPES[key](raw)
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return settings


def cmd_simulate(args) -> int:
    settings = _resolve_settings(args)
    experiment = args.experiment
    out = args.out or os.path.join(_outdir(args), f"{experiment}.csv")
    model = ModelParams(
        lambda_rate=settings["lambda_rate"],
        sigma=settings["sigma"],
        seed=settings["seed"],
        span=settings["span"],
    )
    meta = dict(sorted(settings.items()))
    meta["experiment"] = experiment
    meta["tool"] = f"maintsim {__version__}"
    status = EXIT_OK

    if experiment == "fig5":
        cfg = ExperimentConfig(
            model=model,
            T_values=tuple(parse_grid(str(settings["T"]))),
            replications=settings["replications"],
            queries_per_replication=settings["queries"],
        )
        points = run_error_vs_period(cfg)
        rows = [(p.T, p.mean_sq_error, p.std_error, p.samples, p.theory) for p in points]
        header = ["T", "mean_sq_error", "std_error", "samples", "theory_error_avg"]
    elif experiment == "fig6":
        cfg = ExperimentConfig(
            model=model,
            T_values=tuple(parse_grid(str(settings["T"]))),
            replications=settings["replications"],
            queries_per_replication=settings["queries"],
            ratio_C=settings["ratio_C"],
        )
        points = run_asymptotic_sweep(cfg)
        rows = [
            (p.T, p.lambda_rate, p.mean_sq_error, p.std_error, p.samples, p.theory, p.asymptote)
            for p in points
        ]
        header = ["T", "lambda", "mean_sq_error", "std_error", "samples", "theory_error_avg", "asymptote"]
    elif experiment == "fig4":
        cfg = ExperimentConfig(
            model=model,
            replications=settings["replications"],
            queries_per_replication=settings["queries"],
        )
        bins = run_error_vs_count(cfg)
        rows = [
            (proto, b.key, b.sample_count, b.mean_sq_error, b.standard_error, b.mean_abs_error, b.standard_error_abs)
            for proto in sorted(bins)
            for b in bins[proto]
        ]
        header = [
            "protocol", "localization_count", "samples",
            "mean_sq_error", "std_error_sq", "mean_abs_error", "std_error_abs",
        ]
    else:  # moments
        report = validate_conditional_moments(
            sigma=settings["sigma"],
            lambda_rate=settings["lambda_rate"],
            n_max=settings["n_max"],
            samples=settings["samples"],
            seed=settings["seed"],
        )
        rows = list(report.rows())
        header = ["check", "mc_mean", "std_error", "theory", "z", "samples", "skipped"]
        if not report.passed:
            status = EXIT_VALIDATION

    count = write_csv(out, header, rows, meta)
    manifest = RunManifest(
        experiment=experiment,
        seed=settings["seed"],
        config={k: (str(v) if isinstance(v, str) else v) for k, v in settings.items()},
        outputs=(os.path.basename(out),),
        tool_version=__version__,
    )
    write_manifest(out + ".manifest.json", manifest)
    print(f"wrote {count} rows -> {out}")
    if status == EXIT_VALIDATION:
        print("moment validation FAILED: some |z| >= 4", file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "theory":
            return cmd_theory(args)
        return cmd_simulate(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
