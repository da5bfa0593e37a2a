#!/usr/bin/env python3
"""
Desk-scale ablation: all six functions, all four variants, median dominance check.
"""

import argparse
import sys
from pathlib import Path

from multiform.config import Variant, spec_from_options
from multiform.harness import run_experiment, setup_logging, write_outputs
from multiform.stats import median_final_fitness, median_wins

REQUIRED_WINS = 4


def main():
    parser = argparse.ArgumentParser(description="Run the desk-scale variant ablation")
    parser.add_argument("--D", type=int, default=200, help="Ambient dimension")
    parser.add_argument("--de", type=int, default=10, help="Effective dimension")
    parser.add_argument("--dims", default="20,20,20,20", help="Embedding dimensions")
    parser.add_argument("--fes", type=int, default=20_000, help="FE budget per run")
    parser.add_argument("--seeds", default="0..9", help="Seeds")
    parser.add_argument("--jobs", type=int, default=1, help="Parallel runs")
    parser.add_argument("--out", default="results/desk", help="Output directory")
    parser.add_argument("--log-level", default="WARNING", help="Logging level")
    args = parser.parse_args()

    setup_logging(args.log_level)
    spec = spec_from_options(
        {
            "function": "all",
            "variant": "all",
            "D": str(args.D),
            "de": str(args.de),
            "dims": args.dims,
            "fes": str(args.fes),
            "seeds": args.seeds,
            "jobs": str(args.jobs),
            "out": args.out,
        }
    )
    logs = run_experiment(spec)
    write_outputs(logs, spec)

    medians = median_final_fitness(logs)
    print(f"{'function':<12}" + "".join(f"{v.label:>14}" for v in Variant))
    for fn in sorted({fn for fn, _ in medians}):
        print(f"{fn:<12}" + "".join(f"{medians[(fn, v)]:>14.4e}" for v in Variant))

    vs_m = median_wins(medians, Variant.S_MF, Variant.S_M)
    vs_s = median_wins(medians, Variant.S_MF, Variant.S)
    print(f"DE+MF <= DE+M on {vs_m}/6 functions, DE+MF <= DE on {vs_s}/6 functions")
    print(f"Results written to {Path(args.out)}")

    if vs_m < REQUIRED_WINS or vs_s < REQUIRED_WINS:
        print("Dominance check failed")
        sys.exit(1)
    print("Dominance check passed")


if __name__ == "__main__":
    main()
