"""Multiform evolution main loop and the variant suite runner."""

import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from multiform.allocation import AllocationState, allocate_offspring
from multiform.config import MIN_SHARE, RunConfig, Variant, validated
from multiform.de import de_generation, init_subpopulation
from multiform.embedding import lift, make_formulation_set, project_to_box
from multiform.exceptions import InvalidInputError
from multiform.functions import EmbeddedObjective, make_embedded
from multiform.models import FormulationSet, GenerationRecord, RunLog, SubPopulation
from multiform.transfer import cross_form_transfer

logger = logging.getLogger(__name__)


def seed_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """
    Independent (objective, algorithm) random streams for one seed.

    The objective stream only draws the rotation and shift, so every variant
    run with the same seed optimizes the identical objective.
    """
    objective_seq, algorithm_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(objective_seq), np.random.default_rng(algorithm_seq)


def build_objective(config: RunConfig) -> EmbeddedObjective:
    objective_rng, _ = seed_streams(config.seed)
    return make_embedded(config.function, config.D, config.d_e, objective_rng)


def split_population(K: int, n: int, rng: Optional[np.random.Generator] = None) -> List[int]:
    """
    Subpopulation sizes for K individuals over n formulations.

    Without ``rng`` the split is even with the remainder going to the lowest
    ids. With ``rng`` every formulation gets 5 individuals and the rest are
    attributed uniformly at random.
    """
    if K < MIN_SHARE * n:
        raise InvalidInputError(f"K={K} cannot give {n} formulations {MIN_SHARE} individuals each")
    if rng is None:
        share, extra = divmod(K, n)
        return [share + (1 if k < extra else 0) for k in range(n)]
    extra = np.bincount(rng.integers(n, size=K - MIN_SHARE * n), minlength=n)
    return [MIN_SHARE + int(e) for e in extra]


class MultiformOptimizer:
    """
    Evolves one subpopulation per formulation of a shared objective.

    Each generation spends K offspring evaluations split across formulations
    (uniformly, or by the dynamic allocation state), then exchanges best
    individuals between every pair of formulations when transfer is on. The
    FE budget is checked before each phase: a variation phase needs K FEs and
    each pair transfer needs 2.
    """

    def __init__(
        self,
        config: RunConfig,
        objective: Optional[EmbeddedObjective] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        """
        Args:
            config: Validated run configuration
            objective: Objective to optimize; built from ``config.seed`` if omitted
            rng: Algorithm random stream; derived from ``config.seed`` if omitted
        """
        objective_rng, algorithm_rng = seed_streams(config.seed)
        if objective is None:
            objective = make_embedded(config.function, config.D, config.d_e, objective_rng)
        elif objective.ambient_dim != config.D or objective.base is not config.function:
            raise InvalidInputError(
                f"Objective {objective!r} does not match config ({config.function.value}, D={config.D})"
            )

        self.config = config
        self.objective = objective
        self.rng = algorithm_rng if rng is None else rng
        self.formulations: FormulationSet = make_formulation_set(
            config.D, config.embedding_dims, config.includes_original, self.rng
        )
        self.subpops: List[SubPopulation] = []
        self.allocation: Optional[AllocationState] = None
        self.generation = 0
        self.log = RunLog(config)
        self._fes_at_start = objective.eval_count

    @property
    def fes(self) -> int:
        return self.objective.eval_count - self._fes_at_start

    def formulation_bests(self) -> np.ndarray:
        return np.array([sp.best_fitness for sp in self.subpops])

    def _record(self, P: np.ndarray, offspring: Sequence[int]) -> None:
        bests = self.formulation_bests()
        record = GenerationRecord(
            generation=self.generation,
            fes=self.fes,
            formulation_bests=tuple(float(b) for b in bests),
            best_fitness=float(bests.min()),
            allocation=tuple(float(p) for p in P),
            offspring=tuple(int(c) for c in offspring),
        )
        self.log.records.append(record)
        logger.debug(
            f"gen {record.generation} fes={record.fes} best={record.best_fitness:.6e} P={np.round(P, 3)}"
        )

    def initialize(self) -> None:
        cfg = self.config
        n = len(self.formulations)
        sizes = split_population(cfg.K, n, self.rng if cfg.random_attribution else None)
        self.subpops = [
            init_subpopulation(f, size, self.objective, self.rng)
            for f, size in zip(self.formulations, sizes)
        ]
        self.allocation = AllocationState.initial(
            self.formulation_bests(), cfg.alpha, cfg.epsilon, cfg.c_max
        )
        self._record(self.allocation.P, [0] * n)

    def step(self) -> bool:
        """
        Run one generation.

        Returns:
            False, without spending any FE, when the variation phase no longer
            fits in the budget
        """
        cfg = self.config
        if self.fes + cfg.K > cfg.max_fes:
            return False

        n = len(self.formulations)
        P = self.allocation.P if cfg.dynamic_allocation else np.full(n, 1.0 / n)
        offspring = allocate_offspring(P, cfg.K, cfg.floor)
        for f, subpop, count in zip(self.formulations, self.subpops, offspring):
            de_generation(subpop, int(count), cfg.CR, cfg.F, self.objective, f, self.rng)

        if cfg.transfer_enabled:
            for i, j in itertools.combinations(range(n), 2):
                if self.fes + 2 > cfg.max_fes:
                    break
                cross_form_transfer(
                    self.subpops[i],
                    self.subpops[j],
                    self.formulations[i],
                    self.formulations[j],
                    self.objective,
                    cfg.ridge,
                )

        bests = self.formulation_bests()
        if cfg.dynamic_allocation:
            self.allocation.advance(bests)
        else:
            self.allocation.prev_best = bests

        self.generation += 1
        self._record(P, offspring)
        return True

    def finalize(self) -> RunLog:
        log = self.log
        log.formulation_genomes = [sp.best_genome for sp in self.subpops]
        log.formulation_fitness = [sp.best_fitness for sp in self.subpops]
        best_x, best_fitness = recover_high_dim_best(log, self.formulations)
        log.best_formulation = int(np.argmin(log.formulation_fitness))
        log.best_genome = log.formulation_genomes[log.best_formulation]
        log.best_x = best_x
        log.best_fitness = best_fitness
        log.fes = self.fes
        return log

    def run(self) -> RunLog:
        cfg = self.config
        logger.info(
            f"Run {cfg.function.value} {cfg.variant.label} seed={cfg.seed}: "
            f"D={cfg.D} d_e={cfg.d_e} formulations={self.formulations.dims} budget={cfg.max_fes}"
        )
        self.initialize()
        while self.step():
            pass
        log = self.finalize()
        logger.info(f"Finished {log.run_id}: best={log.best_fitness:.6e} after {log.fes} FEs")
        return log


def run(
    config: RunConfig,
    rng: Optional[np.random.Generator] = None,
    objective: Optional[EmbeddedObjective] = None,
) -> RunLog:
    """Run one configuration to budget exhaustion and return its log."""
    return MultiformOptimizer(config, objective=objective, rng=rng).run()


def recover_high_dim_best(log: RunLog, formulations: FormulationSet) -> Tuple[np.ndarray, float]:
    """
    Lift every formulation's best genome into the box and keep the best.

    Fitness values are taken from the log; no FE is spent.

    Returns:
        (x*, fitness)
    """
    if not log.formulation_fitness:
        raise InvalidInputError("Run log has no final per-formulation bests")
    if len(log.formulation_genomes) != len(formulations):
        raise InvalidInputError(
            f"Log holds {len(log.formulation_genomes)} bests for {len(formulations)} formulations"
        )
    lifted = [project_to_box(lift(f, y)) for f, y in zip(formulations, log.formulation_genomes)]
    best = int(np.argmin(log.formulation_fitness))
    return lifted[best], float(log.formulation_fitness[best])


def run_variant_suite(
    base_config: RunConfig,
    variants: Sequence[Variant],
    seeds: Sequence[int],
    n_jobs: int = 1,
) -> List[RunLog]:
    """
    One run per (variant, seed), variant-major.

    Runs with the same seed share the same objective instance (rotation and
    shift), so results can be compared pairwise across variants.
    """
    if not variants or not seeds:
        raise InvalidInputError("run_variant_suite needs at least one variant and one seed")
    configs = [
        validated(RunConfig, {**base_config.model_dump(), "variant": v, "seed": s})
        for v in variants
        for s in seeds
    ]
    return run_configs(configs, n_jobs)


def run_configs(configs: Sequence[RunConfig], n_jobs: int = 1) -> List[RunLog]:
    """Run independent configurations, in parallel when ``n_jobs`` != 1."""
    if n_jobs == 1:
        return [run(c) for c in configs]
    return Parallel(n_jobs=n_jobs)(delayed(run)(c) for c in configs)
