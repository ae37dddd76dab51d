"""Command-line entry points.

Subcommands: run, sweep-rate, sweep-sigma, oracle (comparator only), and
validate. Exit codes: 0 success, 2 configuration error, 3 resource error,
4 assertion failure (an --assert-* or --max-exponent check did not hold).
"""

from __future__ import annotations

import argparse
import os
import sys

from dataclasses import replace

from .errors import ConfigError, FitInvalidError, ResourceLimitError
from .harness import (
    format_sigma,
    load_config,
    make_domain,
    make_stream,
    derive_seed,
    run,
    sweep_rate,
    sweep_sigma,
)
from .oracle import GridSpec, offline_optimum_dp, write_comparator_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_ASSERTION = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchmd",
        description="Online mirror descent under switching costs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="path to a key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--out-dir", default=None, help="override the output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")

    p_run = sub.add_parser("run", help="run one episode per (protocol, sigma)")
    add_common(p_run)

    p_rate = sub.add_parser("sweep-rate", help="fit the regret growth exponent over horizons")
    add_common(p_rate)
    p_rate.add_argument("--protocol", choices=["oa", "oco"], default=None)
    p_rate.add_argument("--sigma", type=float, default=None)
    p_rate.add_argument(
        "--max-exponent",
        type=float,
        default=None,
        help="exit 4 when the fitted exponent exceeds this bound",
    )

    p_sigma = sub.add_parser("sweep-sigma", help="switching-loss gap (OCO - OA) per sigma")
    add_common(p_sigma)
    p_sigma.add_argument(
        "--assert-nondecreasing-diff",
        action="store_true",
        help="exit 4 unless the gap is non-decreasing over the sigma list",
    )

    p_oracle = sub.add_parser("oracle", help="compute the offline comparator only")
    add_common(p_oracle)

    p_val = sub.add_parser("validate", help="parse and validate a config file")
    p_val.add_argument("config")
    return parser


def _load(args):
    config = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        config = replace(config, master_seed=args.seed)
    if getattr(args, "out_dir", None) is not None:
        config = replace(config, out_dir=args.out_dir)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        print("hint: reduce grid_points, budget_buckets, or the horizon", file=sys.stderr)
        return EXIT_RESOURCE


def _dispatch(args) -> int:
    if args.command == "validate":
        load_config(args.config)
        print("config ok")
        return EXIT_OK

    config = _load(args)

    if args.command == "run":
        manifest = run(config)
        print(f"wrote {len(manifest['runs'])} ledgers to {config.out_dir}")
        return EXIT_OK

    if args.command == "sweep-rate":
        protocol = (args.protocol or config.protocols[0]).upper()
        sigma = args.sigma if args.sigma is not None else config.sigmas[0]
        try:
            fit = sweep_rate(config, protocol, sigma, out_dir=config.out_dir, jobs=args.jobs)
        except FitInvalidError as exc:
            print(f"fit invalid: {exc}", file=sys.stderr)
            return EXIT_ASSERTION if args.max_exponent is not None else EXIT_OK
        print(
            f"{protocol} sigma={format_sigma(sigma)}: exponent={fit.exponent:.4f} "
            f"intercept={fit.intercept:.4f} residual={fit.residual:.4g}"
            + (" (smallest T discarded)" if fit.discarded_smallest else "")
        )
        if args.max_exponent is not None and fit.exponent > args.max_exponent:
            print(
                f"assertion failed: exponent {fit.exponent:.4f} > {args.max_exponent}",
                file=sys.stderr,
            )
            return EXIT_ASSERTION
        return EXIT_OK

    if args.command == "sweep-sigma":
        rows = sweep_sigma(config, out_dir=config.out_dir)
        for row in rows:
            print(
                f"sigma={format_sigma(row['sigma'])}: oa_sl={row['oa_sl']:.6g} "
                f"oco_sl={row['oco_sl']:.6g} diff={row['diff']:.6g}"
            )
        diffs = [row["diff"] for row in rows]
        if args.assert_nondecreasing_diff and any(
            b < a - 1e-12 for a, b in zip(diffs, diffs[1:])
        ):
            print("assertion failed: diff is not non-decreasing over sigma", file=sys.stderr)
            return EXIT_ASSERTION
        return EXIT_OK

    if args.command == "oracle":
        if not config.dimension <= 2:
            raise ConfigError("the oracle supports dimensions 1 and 2 only")
        os.makedirs(config.out_dir, exist_ok=True)
        domain = make_domain(config)
        grid = GridSpec(domain, config.grid_points, config.budget_buckets)
        for sigma in config.sigmas:
            seed = derive_seed(config.master_seed, f"oracle:sigma={format_sigma(sigma)}")
            stream = make_stream(config, seed)
            comp = offline_optimum_dp(stream.losses(), grid, config.budget, sigma)
            name = os.path.join(config.out_dir, f"comparator_sigma{format_sigma(sigma)}.csv")
            write_comparator_csv(comp, stream.losses(), name)
            print(f"sigma={format_sigma(sigma)}: comparator total {comp.total_cost:.6g} -> {name}")
        return EXIT_OK

    raise ConfigError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
