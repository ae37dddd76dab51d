#!/usr/bin/env python3
"""Regret-growth exponents against the offline comparator.

Sweeps geometric horizons on 1-D sign streams with the constant theory
rates, fits log2(mean regret) against log2(T), and prints the exponents.
Negative mean regret (possible for the observe-then-act player, which
profits from seeing each loss before moving) is reported as fit-invalid.
"""

import argparse

from switchmd.errors import FitInvalidError
from switchmd.harness import ExperimentConfig, sweep_rate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=float, default=4.0)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--max-horizon", type=int, default=8192)
    parser.add_argument("--sigmas", type=float, nargs="+", default=[1.0, 2.0])
    parser.add_argument("--protocols", nargs="+", default=["oco", "oa"])
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out-dir", default="results/ratesweep")
    args = parser.parse_args()

    horizons = []
    T = 256
    while T <= args.max_horizon:
        horizons.append(T)
        T *= 2

    config = ExperimentConfig(
        protocols=tuple(p.lower() for p in args.protocols),
        stream="rademacher",
        dimension=1,
        horizon=horizons[0],
        horizons=tuple(horizons),
        sigmas=tuple(args.sigmas),
        budget=args.budget,
        rate="theory",
        master_seed=args.seed,
        num_seeds=args.seeds,
        radius=1.0,
        oracle=True,
        grid_points=41,
        budget_buckets=64,
        out_dir=args.out_dir,
    )

    for protocol in config.protocols:
        for sigma in config.sigmas:
            try:
                fit = sweep_rate(
                    config, protocol.upper(), sigma, out_dir=config.out_dir, jobs=args.jobs
                )
            except FitInvalidError as exc:
                print(f"{protocol.upper()} sigma={sigma:g}: fit invalid ({exc})")
                continue
            note = " [smallest T discarded]" if fit.discarded_smallest else ""
            print(
                f"{protocol.upper()} sigma={sigma:g}: exponent={fit.exponent:.3f} "
                f"intercept={fit.intercept:.3f} residual={fit.residual:.3g}{note}"
            )


if __name__ == "__main__":
    main()
