#!/usr/bin/env python3
"""
Success rate of one versus several low-dimensional embeddings on Ackley.

A single embedding whose box misses the optimum fails; with N independent
embeddings all of them have to miss.
"""

import argparse
import sys

from multiform.config import RunConfig, Variant, parse_seeds, validated
from multiform.harness import setup_logging
from multiform.optimizer import run_configs


def success_rate(counts, args, seeds):
    configs = [
        validated(
            RunConfig,
            {
                "function": "ackley",
                "D": args.D,
                "d_e": args.de,
                "dims": (args.d,) * counts,
                "variant": Variant.S_M,
                "max_fes": args.fes,
                "seed": seed,
            },
        )
        for seed in seeds
    ]
    logs = run_configs(configs, args.jobs)
    successes = sum(log.best_fitness < args.threshold for log in logs)
    return successes / len(logs)


def main():
    parser = argparse.ArgumentParser(description="Compare success rates of 1 and N embeddings")
    parser.add_argument("--D", type=int, default=50, help="Ambient dimension")
    parser.add_argument("--de", type=int, default=2, help="Effective dimension")
    parser.add_argument("--d", type=int, default=2, help="Dimension of every embedding")
    parser.add_argument("--embeddings", type=int, default=4, help="Embeddings of the multiform run")
    parser.add_argument("--fes", type=int, default=5_000, help="FE budget per run")
    parser.add_argument("--seeds", default="0..19", help="Seeds")
    parser.add_argument("--threshold", type=float, default=1.0, help="Success threshold on final fitness")
    parser.add_argument("--jobs", type=int, default=1, help="Parallel runs")
    parser.add_argument("--log-level", default="WARNING", help="Logging level")
    args = parser.parse_args()

    setup_logging(args.log_level)
    seeds = parse_seeds(args.seeds)
    single = success_rate(1, args, seeds)
    multi = success_rate(args.embeddings, args, seeds)
    print(f"1 embedding: {single:.2f} success over {len(seeds)} seeds")
    print(f"{args.embeddings} embeddings: {multi:.2f} success over {len(seeds)} seeds")

    if multi < single:
        print("Multiple embeddings did not reduce the failure rate")
        sys.exit(1)


if __name__ == "__main__":
    main()
