#!/usr/bin/env python3
"""
One full-size DE+MF run with a peak memory report.
"""

import argparse
import resource
import sys
import time

import numpy as np

from multiform.config import RunConfig, Variant, validated
from multiform.harness import setup_logging
from multiform.optimizer import run

MEMORY_LIMIT_MB = 1024


def main():
    parser = argparse.ArgumentParser(description="Full-scale DE+MF smoke run")
    parser.add_argument("--function", default="ackley", help="Base function")
    parser.add_argument("--D", type=int, default=5000, help="Ambient dimension")
    parser.add_argument("--de", type=int, default=30, help="Effective dimension")
    parser.add_argument("--d", type=int, default=50, help="Dimension of every embedding")
    parser.add_argument("--fes", type=int, default=50_000, help="FE budget")
    parser.add_argument("--seed", type=int, default=0, help="Seed")
    parser.add_argument("--log-level", default="INFO", help="Logging level")
    args = parser.parse_args()

    setup_logging(args.log_level)
    config = validated(
        RunConfig,
        {
            "function": args.function,
            "D": args.D,
            "d_e": args.de,
            "dims": (args.d,) * 4,
            "variant": Variant.S_MF,
            "max_fes": args.fes,
            "seed": args.seed,
        },
    )

    start = time.perf_counter()
    log = run(config)
    elapsed = time.perf_counter() - start
    # ru_maxrss is in kilobytes on Linux
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0

    curve = np.array([best for _, best in log.curve()])
    monotone = bool(np.all(np.diff(curve) <= 0.0))
    print(f"final={log.best_fitness:.6e} fes={log.fes} time={elapsed:.1f}s peak={peak_mb:.0f} MB")
    print(f"monotone convergence curve: {monotone}")

    if not monotone or peak_mb >= MEMORY_LIMIT_MB or log.fes > config.max_fes:
        sys.exit(1)


if __name__ == "__main__":
    main()
