"""DE/rand/1/bin with greedy one-to-one selection, run per formulation."""

import logging
from typing import Tuple

import numpy as np

from multiform.embedding import evaluate_low_dim
from multiform.exceptions import InvalidInputError
from multiform.functions import EmbeddedObjective
from multiform.models import Formulation, SubPopulation

logger = logging.getLogger(__name__)

MIN_SUBPOPULATION = 5


def init_subpopulation(
    f: Formulation,
    size: int,
    obj: EmbeddedObjective,
    rng: np.random.Generator,
) -> SubPopulation:
    """
    Sample ``size`` genomes uniformly in [-1, 1]^d and evaluate each once.

    Args:
        f: Formulation the individuals belong to
        size: Number of individuals, at least 5
        obj: Target objective; charged ``size`` FEs
        rng: Random stream

    Returns:
        The evaluated SubPopulation
    """
    if size < MIN_SUBPOPULATION:
        raise InvalidInputError(
            f"Subpopulation size must be at least {MIN_SUBPOPULATION}, got {size}"
        )
    genomes = rng.uniform(-1.0, 1.0, (size, f.d))
    fitness = np.array([evaluate_low_dim(f, obj, g) for g in genomes])
    return SubPopulation(f.id, genomes, fitness)


def de_trial(
    subpop: SubPopulation,
    target_index: int,
    CR: float,
    F: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Build one DE/rand/1/bin trial vector for ``target_index``.

    Draws, in order: three distinct donors other than the target, the forced
    crossover coordinate, then the binomial crossover mask. The trial is
    clipped to [-1, 1]^d.
    """
    if subpop.size < MIN_SUBPOPULATION:
        raise InvalidInputError(
            f"DE/rand/1 needs at least {MIN_SUBPOPULATION} members, got {subpop.size}"
        )
    if not 0.0 <= CR <= 1.0 or F < 0.0:
        raise InvalidInputError(f"Invalid DE parameters CR={CR}, F={F}")

    candidates = np.delete(np.arange(subpop.size), target_index)
    r1, r2, r3 = rng.choice(candidates, 3, replace=False)
    x = subpop.genomes
    mutant = x[r1] + F * (x[r2] - x[r3])

    d = subpop.dim
    j_rand = rng.integers(d)
    cross = rng.random(d) < CR
    cross[j_rand] = True
    trial = np.where(cross, mutant, x[target_index])
    return np.clip(trial, -1.0, 1.0)


def de_generation(
    subpop: SubPopulation,
    offspring_budget: int,
    CR: float,
    F: float,
    obj: EmbeddedObjective,
    f: Formulation,
    rng: np.random.Generator,
) -> Tuple[SubPopulation, int]:
    """
    Produce ``offspring_budget`` trials and apply greedy selection.

    Targets are taken cyclically from ``subpop.cursor``. Each trial is
    evaluated and compared with its target immediately; it replaces the
    target when its fitness is lower or equal. The subpopulation is updated
    in place and returned.

    Returns:
        (subpop, FEs used), where FEs used equals ``offspring_budget``
    """
    if offspring_budget < 0:
        raise InvalidInputError(f"Offspring budget must be non-negative, got {offspring_budget}")

    for _ in range(offspring_budget):
        target = subpop.cursor
        trial = de_trial(subpop, target, CR, F, rng)
        trial_fitness = evaluate_low_dim(f, obj, trial)
        if trial_fitness <= subpop.fitness[target]:
            subpop.genomes[target] = trial
            subpop.fitness[target] = trial_fitness
        subpop.cursor = (target + 1) % subpop.size

    return subpop, offspring_budget
