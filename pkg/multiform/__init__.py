"""Multiform DE - differential evolution across random-embedding formulations of one problem."""

__version__ = "0.1.0"

from multiform.config import ExperimentSpec, RunConfig, Variant
from multiform.functions import BaseFunction, EmbeddedObjective, eval_base, make_embedded
from multiform.optimizer import MultiformOptimizer, run, run_variant_suite
from multiform.stats import summarize, wilcoxon_signed_rank
from multiform.exceptions import (
    MultiformException,
    InvalidInputError,
    ConfigError,
    SingularSystemError,
    OutputError,
)
