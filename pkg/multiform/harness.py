"""Command-line experiment runner and result writers."""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd
from dotenv import load_dotenv

from multiform.config import (
    ExperimentSpec,
    Variant,
    dump_manifest,
    read_key_value_file,
    spec_from_options,
)
from multiform.exceptions import ConfigError, MultiformException, OutputError
from multiform.functions import BaseFunction
from multiform.models import RunLog
from multiform.optimizer import run_configs
from multiform.stats import summarize

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

# flags whose dest is also their key=value option name
_FLAG_OPTIONS = (
    "function", "D", "de", "dims", "variant", "pop", "fes", "seeds", "cr", "f",
    "alpha", "epsilon", "c_max", "ridge", "floor", "reference", "jobs", "out",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multiform",
        description="Run multiform DE ablations on embedded benchmark functions",
        allow_abbrev=False,
    )
    parser.add_argument("--function", help="Base function(s): comma list or 'all'")
    parser.add_argument("--D", help="Ambient dimension")
    parser.add_argument("--de", help="Effective dimension")
    parser.add_argument("--dims", help="Embedding dimensions, comma list (default: 4 x 2*de)")
    parser.add_argument("--variant", help="de, de+m, de+mt, de+mf; comma list or 'all' (default de+mf)")
    parser.add_argument("--pop", help="Population size K (default 100)")
    parser.add_argument("--fes", help="Function evaluation budget (default 50000)")
    parser.add_argument("--seeds", help="Seeds: a..b range or comma list (default 0)")
    parser.add_argument("--cr", help="DE crossover rate (default 0.9)")
    parser.add_argument("--f", help="DE scale factor (default 0.35)")
    parser.add_argument("--alpha", help="Preference step size (default 2)")
    parser.add_argument("--epsilon", help="Trend denominator guard (default 1e-12)")
    parser.add_argument("--c-max", dest="c_max", help="Trend clamp (default 10)")
    parser.add_argument("--ridge", help="Transfer ridge regularizer (default 1e-6)")
    parser.add_argument("--floor", help="Minimum offspring per formulation (default 2)")
    parser.add_argument("--reference", help="Variant marks are computed against (default de+mf)")
    parser.add_argument("--jobs", help="Parallel runs (default 1, env MULTIFORM_JOBS)")
    parser.add_argument("--out", help="Output directory (default results, env MULTIFORM_OUTPUT_DIR)")
    parser.add_argument("--config", help="key=value file; its values override flags")
    parser.add_argument("--no-curves", action="store_true", help="Skip per-run convergence CSVs")
    parser.add_argument("--no-transfer", action="store_true", help="Disable cross-form transfer")
    parser.add_argument(
        "--random-attribution", action="store_true", help="Attribute individuals at random"
    )
    parser.add_argument("--list-functions", action="store_true", help="List base functions and exit")
    parser.add_argument("--log-level", help="Logging level (default INFO, env MULTIFORM_LOG_LEVEL)")
    return parser


def setup_logging(level: Optional[str] = None) -> None:
    level = (level or os.environ.get("MULTIFORM_LOG_LEVEL") or "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        stream=sys.stdout,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("joblib").setLevel(logging.WARNING)


def options_from_args(args: argparse.Namespace) -> Dict[str, str]:
    """Merge environment defaults, flags and the --config file, in that order."""
    options: Dict[str, str] = {}
    if os.environ.get("MULTIFORM_OUTPUT_DIR"):
        options["out"] = os.environ["MULTIFORM_OUTPUT_DIR"]
    if os.environ.get("MULTIFORM_JOBS"):
        options["jobs"] = os.environ["MULTIFORM_JOBS"]

    for key in _FLAG_OPTIONS:
        value = getattr(args, key)
        if value is not None:
            options[key] = str(value)
    if args.no_curves:
        options["curves"] = "false"
    if args.no_transfer:
        options["transfer"] = "false"
    if args.random_attribution:
        options["random_attribution"] = "true"

    if args.config:
        options.update(read_key_value_file(Path(args.config)))
    return options


def run_experiment(spec: ExperimentSpec) -> List[RunLog]:
    """Every (function, variant, seed) run of the experiment, in that order."""
    configs = list(spec.run_configs())
    logger.info(f"Running {len(configs)} runs with n_jobs={spec.n_jobs}")
    return run_configs(configs, spec.n_jobs)


def convergence_frame(log: RunLog) -> pd.DataFrame:
    n = log.n_formulations
    columns = (
        ["run_id", "generation", "fes", "best_fitness"]
        + [f"formulation_best_{k}" for k in range(n)]
        + [f"alloc_p_{k}" for k in range(n)]
    )
    rows = [
        [log.run_id, r.generation, r.fes, r.best_fitness, *r.formulation_bests, *r.allocation]
        for r in log.records
    ]
    return pd.DataFrame(rows, columns=columns)


def summary_frame(logs: Sequence[RunLog], reference: Variant) -> pd.DataFrame:
    rows = summarize(logs, reference)
    return pd.DataFrame(
        [
            {
                "function": r.function,
                "variant": r.variant,
                "mean": r.mean,
                "std": r.std,
                "median": r.median,
                "n_runs": r.n_runs,
                "mark": r.mark.value,
                "statistic": r.statistic,
            }
            for r in rows
        ]
    )


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise OutputError(f"Failed to write {path}: {e}") from e


def write_outputs(
    logs: Sequence[RunLog], spec: ExperimentSpec, summary: Optional[pd.DataFrame] = None
) -> Dict[str, Path]:
    """
    Write convergence curves, final results, the summary and the manifest.

    Args:
        logs: Run logs of the experiment
        spec: The experiment that produced them
        summary: Precomputed summary_frame of the logs, if already at hand

    Returns:
        Mapping of output kind to path ("convergence" is a directory)
    """
    out_dir = Path(spec.out_dir)
    curve_dir = out_dir / "convergence"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if spec.curves:
            curve_dir.mkdir(exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory {out_dir}: {e}") from e

    paths = {
        "final": out_dir / "final.csv",
        "summary": out_dir / "summary.csv",
        "manifest": out_dir / "manifest.txt",
    }
    if spec.curves:
        paths["convergence"] = curve_dir
        for log in logs:
            _write_csv(convergence_frame(log), curve_dir / f"{log.run_id}.csv")

    _write_csv(pd.DataFrame([log.to_dict() for log in logs]), paths["final"])
    if summary is None:
        summary = summary_frame(logs, spec.reference)
    _write_csv(summary, paths["summary"])
    try:
        paths["manifest"].write_text(dump_manifest(spec))
    except OSError as e:
        raise OutputError(f"Failed to write {paths['manifest']}: {e}") from e

    logger.info(f"Wrote {len(logs)} runs to {out_dir}")
    return paths


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse flags, run the experiment and write its outputs.

    Returns:
        0 on success, 2 on usage or configuration errors, 1 on other failures
    """
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.list_functions:
        for fn in BaseFunction:
            low, high = fn.native_range
            print(f"{fn.value:<12} [{low:g}, {high:g}]")
        return 0

    setup_logging(args.log_level)
    try:
        spec = spec_from_options(options_from_args(args))
    except ConfigError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2

    try:
        logs = run_experiment(spec)
        table = summary_frame(logs, spec.reference)
        write_outputs(logs, spec, table)
    except ConfigError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except MultiformException as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 1

    print(table.to_string(index=False))
    return 0


def main() -> None:
    sys.exit(cli_main())
