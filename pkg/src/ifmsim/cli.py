"""Command-line front end: every experiment as a subcommand with reproducible
seeds and CSV/JSON output.

Output files start with a '#'-prefixed metadata line carrying the full
JSON-encoded configuration (minus execution details like --threads, so bytes
are identical at any parallelism), then a header row, then data rows in full
double precision.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .discrimination import (
    StrategySpec,
    default_thresholds,
    min_loss_bound,
    monte_carlo_curve,
)
from .evolution import SampleSpec, SetupSpec, contrast_curve, run_ifm
from .evolution import _evolve_grid
from .precision import loss_curve

DEFAULT_SEED = 12345  # used whenever --seed is not given

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def parse_grid(spec: str) -> list[float]:
    """Parse a value grid: 'x', 'a,b,c', 'lo:hi:count', or 'log:lo:hi:count'."""
    spec = spec.strip()
    if spec.startswith("log:"):
        parts = spec[4:].split(":")
        if len(parts) != 3:
            raise ValueError(f"bad log grid {spec!r}, expected log:lo:hi:count")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi <= 0:
            raise ValueError("log grid bounds must be positive")
        return [float(x) for x in np.geomspace(lo, hi, count)]
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad grid {spec!r}, expected lo:hi:count")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        return [float(x) for x in np.linspace(lo, hi, count)]
    return [float(x) for x in spec.split(",") if x != ""]


def parse_int_list(spec: str) -> list[int]:
    vals = [int(round(v)) for v in parse_grid(spec)]
    if any(v < 1 for v in vals):
        raise ValueError("round-trip counts must be >= 1")
    return list(dict.fromkeys(vals))  # drop duplicates from rounded grids, keep order


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, float):
        return repr(float(v))  # shortest round-trip form, numpy scalars included
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_output(columns, rows, config, out, fmt):
    if fmt == "csv":
        lines = ["# " + json.dumps(config, sort_keys=True)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        doc = {"config": config, "columns": list(columns), "rows": [list(r) for r in rows]}
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_evolution(args):
    setup = SetupSpec(args.n, record_trace=True)
    sample = SampleSpec(args.alpha, args.phi, args.phi_comp)
    result = run_ifm(setup, sample)
    rows = [(k, k / args.n, pr, ps, pl) for k, pr, ps, pl in result.trace]
    config = {
        "subcommand": "evolution",
        "n": args.n,
        "alpha": args.alpha,
        "phi": args.phi,
        "phi_comp": args.phi_comp,
    }
    return ("step", "t_over_t", "p_r", "p_s", "p_l"), rows, config


def cmd_sweep(args):
    n_values = parse_int_list(args.n)
    if args.alpha is not None:
        alphas = parse_grid(args.alpha)
    elif args.log_scale:
        alphas = [1.0 - x for x in np.geomspace(1.0, 1e-6, 241)]
    else:
        alphas = [float(x) for x in np.linspace(0.0, 1.0, 201)]
    if not alphas:
        raise ValueError("empty transparency grid")
    rows = []
    for n in n_values:
        p_r, p_s, p_l = _evolve_grid(n, np.asarray(alphas), args.phi - args.phi_comp)
        rows.extend(
            (n, a, float(x), float(y), float(z)) for a, x, y, z in zip(alphas, p_r, p_s, p_l)
        )
    config = {
        "subcommand": "sweep",
        "n": n_values,
        "alpha": alphas,
        "phi": args.phi,
        "phi_comp": args.phi_comp,
        "log_scale": bool(args.log_scale),
    }
    return ("n", "alpha", "p_r", "p_s", "p_l"), rows, config


def cmd_contrast(args):
    contrasts = parse_grid(args.contrasts)
    points = contrast_curve(contrasts, alpha2_anchor=args.anchor)
    rows = [
        (p.contrast, p.alpha1, p.alpha2, p.n_opt, p.avg_loss, p.at_search_bound)
        for p in points
    ]
    config = {"subcommand": "contrast", "contrasts": contrasts, "anchor": args.anchor}
    return ("contrast", "alpha1", "alpha2", "n_opt", "avg_loss", "at_search_bound"), rows, config


def cmd_discriminate(args):
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    n_values = parse_int_list(args.n)
    thresholds = parse_grid(args.thresholds) if args.thresholds else default_thresholds()
    specs = []
    for kind in strategies:
        if kind == "classical":
            specs.append(StrategySpec("classical", args.alpha1, args.alpha2, phi=args.phi))
        elif kind == "ifm":
            specs.extend(
                StrategySpec("ifm", args.alpha1, args.alpha2, n_roundtrips=n, phi=args.phi)
                for n in n_values
            )
        else:
            raise ValueError(f"unknown strategy {kind!r} (use classical and/or ifm)")
    rows = []
    for spec in specs:
        points = monte_carlo_curve(
            spec,
            thresholds=thresholds,
            replications=args.replications,
            seed=args.seed,
            threads=args.threads,
        )
        for p in points:
            rows.append(
                (
                    spec.kind,
                    spec.n_roundtrips,
                    spec.alpha1,
                    spec.alpha2,
                    p.threshold_x,
                    p.error_probability,
                    p.mean_lost,
                    p.mean_lost_se,
                    p.mean_used,
                    p.replications,
                    p.capped_runs,
                    min_loss_bound(spec.alpha1, spec.alpha2, min(p.error_probability, 0.5)),
                )
            )
    config = {
        "subcommand": "discriminate",
        "strategies": strategies,
        "n": n_values,
        "alpha1": args.alpha1,
        "alpha2": args.alpha2,
        "phi": args.phi,
        "thresholds": [float(x) for x in thresholds],
        "replications": args.replications,
    }
    columns = (
        "strategy",
        "n",
        "alpha1",
        "alpha2",
        "threshold",
        "error",
        "mean_lost",
        "mean_lost_se",
        "mean_used",
        "replications",
        "capped_runs",
        "bound",
    )
    return columns, rows, config


def cmd_bound(args):
    p_e_grid = parse_grid(args.p_e)
    rows = [
        (args.alpha1, args.alpha2, pe, min_loss_bound(args.alpha1, args.alpha2, pe))
        for pe in p_e_grid
    ]
    config = {
        "subcommand": "bound",
        "alpha1": args.alpha1,
        "alpha2": args.alpha2,
        "p_e": p_e_grid,
    }
    return ("alpha1", "alpha2", "p_e", "min_lost"), rows, config


def cmd_precision(args):
    signals = [s.strip() for s in args.signal.split(",") if s.strip()]
    n_values = parse_int_list(args.n)
    alphas = parse_grid(args.alpha)
    rows = []
    for signal in signals:
        for n in [None] if signal == "classical_transmission" else n_values:
            budgets = loss_curve(signal, n, args.delta_alpha, alphas, args.statistics, args.coverage)
            rows.extend(
                (
                    args.statistics,
                    signal,
                    n,
                    b.alpha,
                    b.delta_alpha,
                    args.coverage,
                    b.m_required,
                    b.expected_lost,
                    "|".join(b.flags),
                )
                for b in budgets
            )
    config = {
        "subcommand": "precision",
        "statistics": args.statistics,
        "signal": signals,
        "n": n_values,
        "alpha": alphas,
        "delta_alpha": args.delta_alpha,
        "coverage": args.coverage,
    }
    columns = (
        "statistics",
        "signal",
        "n",
        "alpha",
        "delta_alpha",
        "coverage",
        "m_required",
        "expected_lost",
        "flags",
    )
    return columns, rows, config


def cmd_phase(args):
    n_values = parse_int_list(args.n)
    phis = parse_grid(args.phi) if args.phi else [float(x) for x in np.linspace(0.0, 2.0 * math.pi, 201)]
    rows = []
    for n in n_values:
        for phi in phis:
            setup = SetupSpec(n)
            r = run_ifm(setup, SampleSpec(args.alpha, phi, args.phi_comp))
            rows.append((n, phi, r.p_r, r.p_s, r.p_l))
    config = {
        "subcommand": "phase",
        "n": n_values,
        "alpha": args.alpha,
        "phi": phis,
        "phi_comp": args.phi_comp,
    }
    return ("n", "phi", "p_r", "p_s", "p_l"), rows, config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifmsim",
        description="Quantum-Zeno interaction-free measurement experiments "
        "(probability curves, discrimination Monte Carlo, loss budgets, phase sweeps).",
    )
    parser.add_argument("--version", action="version", version=f"ifmsim {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_io(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"random seed (default {DEFAULT_SEED})")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for parallel sections (results identical at any value)")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("evolution", help="per-round-trip state probabilities for one run")
    p.add_argument("--n", type=int, required=True, help="round trips")
    p.add_argument("--alpha", type=float, required=True, help="sample transparency")
    p.add_argument("--phi", type=float, default=0.0, help="sample phase shift per encounter")
    p.add_argument("--phi-comp", type=float, default=0.0, help="compensation phase per round trip")
    add_io(p)
    p.set_defaults(fn=cmd_evolution)

    p = sub.add_parser("sweep", help="measurement probabilities over a transparency grid")
    p.add_argument("--n", required=True, help="round trips (single value, list, or grid)")
    p.add_argument("--alpha", default=None,
                   help="transparency grid 'a,b,c' | 'lo:hi:count' | 'log:lo:hi:count' "
                        "(default: 201 linear points, or a log grid in 1-alpha with --log-scale)")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--phi-comp", type=float, default=0.0)
    p.add_argument("--log-scale", action="store_true",
                   help="default grid logarithmic in 1-alpha")
    add_io(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("contrast", help="minimum average loss versus transparency contrast")
    p.add_argument("--contrasts", default="log:1:10000:13",
                   help="contrast grid (default log:1:10000:13)")
    p.add_argument("--anchor", type=float, default=1.0 - 1e-4,
                   help="high transparency alpha2 (default 1-1e-4)")
    add_io(p)
    p.set_defaults(fn=cmd_contrast)

    p = sub.add_parser("discriminate", help="sequential two-transparency Monte Carlo")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--strategies", default="classical,ifm",
                   help="comma list of classical,ifm (default both)")
    p.add_argument("--n", default="10,100", help="round-trip counts for ifm strategies")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--thresholds", default=None,
                   help="stopping thresholds (default log grid 0.49 down to 1e-12)")
    p.add_argument("--replications", type=int, default=40000)
    add_io(p)
    p.set_defaults(fn=cmd_discriminate)

    p = sub.add_parser("bound", help="minimum-loss bound for discriminating two transparencies")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--p-e", default="log:0.0001:0.45:41", help="error-probability grid")
    add_io(p)
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("precision", help="expected loss to reach a transparency uncertainty")
    p.add_argument("--signal", default="classical_transmission,reference",
                   help="comma list of reference,sample,loss,classical_transmission")
    p.add_argument("--statistics", choices=("binomial", "poisson"), default="binomial")
    p.add_argument("--n", default="10,100,500", help="round-trip counts for IFM signals")
    p.add_argument("--alpha", default="0.01:0.99:99", help="transparency grid")
    p.add_argument("--delta-alpha", type=float, default=0.01)
    p.add_argument("--coverage", type=float, default=0.95)
    add_io(p)
    p.set_defaults(fn=cmd_precision)

    p = sub.add_parser("phase", help="measurement probabilities versus sample phase shift")
    p.add_argument("--n", default="2,5,50", help="round-trip counts")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--phi", default=None, help="phase grid (default 0..2pi, 201 points)")
    p.add_argument("--phi-comp", type=float, default=0.0)
    add_io(p)
    p.set_defaults(fn=cmd_phase)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        columns, rows, config = args.fn(args)
    except ValueError as exc:
        print(f"ifmsim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError) as exc:
        print(f"ifmsim: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    config["seed"] = args.seed
    config["version"] = __version__
    config["format"] = args.format
    write_output(columns, rows, config, args.out, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
