#!/usr/bin/env python3
"""
Sensitivity sweeps over the number of formulations and the embedding dimension.
"""

import argparse

import numpy as np

from multiform.config import RunConfig, Variant, parse_seeds, validated
from multiform.functions import BaseFunction
from multiform.harness import setup_logging
from multiform.optimizer import run_configs


def median_fitness(args, seeds, dims):
    configs = [
        validated(
            RunConfig,
            {
                "function": args.function,
                "D": args.D,
                "d_e": args.de,
                "dims": dims,
                "variant": Variant.S_MF,
                "max_fes": args.fes,
                "seed": seed,
            },
        )
        for seed in seeds
    ]
    return float(np.median([log.best_fitness for log in run_configs(configs, args.jobs)]))


def main():
    parser = argparse.ArgumentParser(description="Sweep formulation count and embedding dimension")
    parser.add_argument(
        "--function", default="ackley", choices=[fn.value for fn in BaseFunction], help="Base function"
    )
    parser.add_argument("--D", type=int, default=200, help="Ambient dimension")
    parser.add_argument("--de", type=int, default=10, help="Effective dimension")
    parser.add_argument("--counts", default="1,2,4,8", help="Embedding counts to sweep")
    parser.add_argument("--dims", default="10,20,50", help="Embedding dimensions to sweep")
    parser.add_argument("--fes", type=int, default=20_000, help="FE budget per run")
    parser.add_argument("--seeds", default="0..4", help="Seeds")
    parser.add_argument("--jobs", type=int, default=1, help="Parallel runs")
    parser.add_argument("--log-level", default="WARNING", help="Logging level")
    args = parser.parse_args()

    setup_logging(args.log_level)
    seeds = parse_seeds(args.seeds)
    counts = [int(c) for c in args.counts.split(",")]
    dims = [int(d) for d in args.dims.split(",")]
    base_dim = 2 * args.de

    print(f"Formulation count (d={base_dim}):")
    for count in counts:
        print(f"  N={count + 1:<4} median={median_fitness(args, seeds, (base_dim,) * count):.4e}")

    print("Embedding dimension (4 embeddings):")
    for d in dims:
        print(f"  d={d:<4} median={median_fitness(args, seeds, (d,) * 4):.4e}")


if __name__ == "__main__":
    main()
