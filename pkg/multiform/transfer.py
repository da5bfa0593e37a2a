"""Cross-form genetic transfer through closed-form linear mappings.

A mapping W from formulation i to formulation j minimizes the squared
reconstruction error ||W A_i - A_j||_F over fitness-paired genomes, with
W = (A_j A_i^T)(A_i A_i^T + lambda I)^-1. Genomes of different lengths are
zero-padded to the longer one.

During a transfer the pair of bests is held out of the fit, so the mapped
donor best is a prediction of the map rather than a copy of the recipient's
own best.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from multiform.de import MIN_SUBPOPULATION
from multiform.embedding import evaluate_low_dim
from multiform.exceptions import InvalidInputError, SingularSystemError
from multiform.functions import EmbeddedObjective
from multiform.models import Formulation, SubPopulation, TransferMap

logger = logging.getLogger(__name__)

MAX_GRAM_CONDITION = 1e10


def _pad_rows(matrix: np.ndarray, rows: int) -> np.ndarray:
    if matrix.shape[0] == rows:
        return matrix
    padded = np.zeros((rows, matrix.shape[1]))
    padded[: matrix.shape[0]] = matrix
    return padded


def pair_populations(P_i: SubPopulation, P_j: SubPopulation) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stack fitness-sorted genomes column-wise for mapping construction.

    Both subpopulations are truncated to Q = min(|P_i|, |P_j|) members in
    ascending fitness order, so column q of each matrix holds the q-th best
    genome. The shorter genomes are zero-padded to max(d_i, d_j) rows.

    Returns:
        (A_i, A_j), both of shape (max(d_i, d_j), Q)
    """
    if P_i.size == 0 or P_j.size == 0:
        raise InvalidInputError("Cannot pair an empty subpopulation")
    Q = min(P_i.size, P_j.size)
    rows = max(P_i.dim, P_j.dim)
    A_i = P_i.genomes[np.argsort(P_i.fitness, kind="stable")[:Q]].T
    A_j = P_j.genomes[np.argsort(P_j.fitness, kind="stable")[:Q]].T
    return _pad_rows(A_i, rows), _pad_rows(A_j, rows)


def choose_ridge(A_i: np.ndarray, ridge: float) -> float:
    """Regularizer for A_i: none when the Gram matrix is safely invertible."""
    rows, Q = A_i.shape
    if Q < rows:
        return ridge
    condition = np.linalg.cond(A_i @ A_i.T)
    if not np.isfinite(condition) or condition > MAX_GRAM_CONDITION:
        logger.debug(f"Gram matrix condition {condition:.3e}; using ridge {ridge}")
        return ridge
    return 0.0


def build_mapping(
    A_i: np.ndarray,
    A_j: np.ndarray,
    ridge: float,
    source_id: int = 0,
    target_id: int = 1,
    source_dim: Optional[int] = None,
    target_dim: Optional[int] = None,
) -> TransferMap:
    """
    Solve for the least-squares mapping from A_i's columns to A_j's.

    Args:
        A_i: Source genomes, one per column
        A_j: Target genomes paired column by column with A_i
        ridge: Non-negative regularizer lambda
        source_id: Formulation id of the source
        target_id: Formulation id of the target
        source_dim: Unpadded source genome length (defaults to the row count)
        target_dim: Unpadded target genome length (defaults to the row count)

    Returns:
        The TransferMap. With ridge 0 this is the exact least-squares
        minimizer; with ridge > 0 and fewer columns than rows the solve is
        done in the Q x Q dual form.
    """
    A_i = np.asarray(A_i, dtype=float)
    A_j = np.asarray(A_j, dtype=float)
    if A_i.ndim != 2 or A_i.shape != A_j.shape or A_i.shape[1] < 1:
        raise InvalidInputError(
            f"Paired matrices must share a shape with Q >= 1, got {A_i.shape} and {A_j.shape}"
        )
    if ridge < 0:
        raise InvalidInputError(f"Ridge must be non-negative, got {ridge}")
    if not (np.all(np.isfinite(A_i)) and np.all(np.isfinite(A_j))):
        raise InvalidInputError("Paired matrices contain non-finite entries")

    rows, Q = A_i.shape
    if ridge == 0.0:
        if np.linalg.matrix_rank(A_i) < rows:
            raise SingularSystemError(
                f"A_i A_i^T is singular (rank < {rows}); a positive ridge is required"
            )
        # min ||A_i^T W^T - A_j^T||, identical to the normal-equations solution
        W = linalg.lstsq(A_i.T, A_j.T)[0].T
        left, right = W, np.eye(rows)
    elif Q >= rows:
        gram = A_i @ A_i.T + ridge * np.eye(rows)
        W = linalg.solve(gram, A_i @ A_j.T, assume_a="pos").T
        left, right = W, np.eye(rows)
    else:
        # (A A^T + lambda I)^-1 A = A (A^T A + lambda I)^-1
        kernel = A_i.T @ A_i + ridge * np.eye(Q)
        left, right = A_j, linalg.solve(kernel, A_i.T, assume_a="pos")

    return TransferMap(
        source_id=source_id,
        target_id=target_id,
        source_dim=rows if source_dim is None else source_dim,
        target_dim=rows if target_dim is None else target_dim,
        ridge=ridge,
        left=left,
        right=right,
    )


def apply_mapping(transfer_map: TransferMap, genome_source: np.ndarray) -> np.ndarray:
    """Map a source genome: W times the padded genome, truncated and clipped."""
    genome = np.asarray(genome_source, dtype=float)
    if genome.shape != (transfer_map.source_dim,):
        raise InvalidInputError(
            f"Genome shape {genome.shape} does not match source dimension "
            f"{transfer_map.source_dim}"
        )
    padded = np.zeros(transfer_map.rows)
    padded[: genome.size] = genome
    mapped = transfer_map.left @ (transfer_map.right @ padded)
    return np.clip(mapped[: transfer_map.target_dim], -1.0, 1.0)


def cross_form_transfer(
    P_i: SubPopulation,
    P_j: SubPopulation,
    f_i: Formulation,
    f_j: Formulation,
    obj: EmbeddedObjective,
    ridge: float,
) -> Tuple[SubPopulation, SubPopulation, int]:
    """
    Exchange the best individuals of two formulations in both directions.

    Both mappings are fitted on the fitness-paired genomes of rank 1 and
    below. Each mapped best is evaluated in the recipient formulation and
    replaces the recipient's worst member (never its best) unconditionally.
    Both subpopulations are updated in place.

    Returns:
        (P_i, P_j, FEs used), where FEs used is 2
    """
    if P_i.size < MIN_SUBPOPULATION or P_j.size < MIN_SUBPOPULATION:
        raise InvalidInputError(
            f"Transfer needs at least {MIN_SUBPOPULATION} members per side, got {P_i.size} and {P_j.size}"
        )
    A_i, A_j = pair_populations(P_i, P_j)
    # column 0 pairs the two bests; a map interpolating it sends one best onto the other
    A_i, A_j = A_i[:, 1:], A_j[:, 1:]
    to_j = build_mapping(
        A_i, A_j, choose_ridge(A_i, ridge), f_i.id, f_j.id, f_i.d, f_j.d
    )
    to_i = build_mapping(
        A_j, A_i, choose_ridge(A_j, ridge), f_j.id, f_i.id, f_j.d, f_i.d
    )

    genome_j = apply_mapping(to_j, P_i.best_genome)
    genome_i = apply_mapping(to_i, P_j.best_genome)
    fitness_j = evaluate_low_dim(f_j, obj, genome_j)
    fitness_i = evaluate_low_dim(f_i, obj, genome_i)

    for subpop, genome, fitness in ((P_j, genome_j, fitness_j), (P_i, genome_i, fitness_i)):
        worst = subpop.worst_index()
        subpop.genomes[worst] = genome
        subpop.fitness[worst] = fitness

    return P_i, P_j, 2
