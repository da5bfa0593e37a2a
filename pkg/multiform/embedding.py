"""Random-embedding formulations of a high-dimensional objective."""

import logging
from typing import Sequence

import numpy as np

from multiform.exceptions import InvalidInputError
from multiform.functions import EmbeddedObjective
from multiform.models import Formulation, FormulationKind, FormulationSet

logger = logging.getLogger(__name__)


def make_embedding_matrix(D: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a D x d matrix of i.i.d. standard normal entries."""
    if not 1 <= d < D:
        raise InvalidInputError(f"Embedding needs 1 <= d < D, got d={d}, D={D}")
    return rng.standard_normal((D, d))


def make_formulation_set(
    D: int,
    dims: Sequence[int],
    include_original: bool,
    rng: np.random.Generator,
) -> FormulationSet:
    """
    Generate one embedded formulation per entry of ``dims``.

    Args:
        D: Ambient dimension of the target problem
        dims: Embedding dimension of each random formulation
        include_original: Whether to append the original D-dimensional problem
        rng: Random stream for the embedding matrices

    Returns:
        A FormulationSet with embeddings at ids 0..len(dims)-1 and the
        original problem, if included, at the last id
    """
    dims = [int(d) for d in dims]
    if not dims and not include_original:
        raise InvalidInputError("A formulation set needs at least one formulation")
    for d in dims:
        if not 1 <= d < D:
            raise InvalidInputError(f"Embedding needs 1 <= d < D, got d={d}, D={D}")

    formulations = [
        Formulation(
            id=k,
            kind=FormulationKind.EMBEDDED,
            d=d,
            ambient_dim=D,
            matrix=make_embedding_matrix(D, d, rng),
        )
        for k, d in enumerate(dims)
    ]
    if include_original:
        formulations.append(
            Formulation(id=len(dims), kind=FormulationKind.ORIGINAL, d=D, ambient_dim=D)
        )
    logger.debug(f"Built {len(formulations)} formulations for D={D}: dims={dims}")
    return FormulationSet(tuple(formulations), include_original)


def lift(f: Formulation, y: np.ndarray) -> np.ndarray:
    """Map a genome into the ambient space (x = My, or y itself)."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != f.d:
        raise InvalidInputError(
            f"Genome length {y.shape[-1]} does not match formulation {f.id} (d={f.d})"
        )
    if f.is_original:
        return y.copy()
    return y @ f.matrix.T if y.ndim == 2 else f.matrix @ y


def project_to_box(x: np.ndarray) -> np.ndarray:
    """
    Closest point of [-1, 1]^D to x in Euclidean distance.

    For a box the minimizer separates per coordinate, so this is a clip.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("Cannot project a point with non-finite coordinates")
    return np.clip(x, -1.0, 1.0)


def evaluate_low_dim(f: Formulation, obj: EmbeddedObjective, y: np.ndarray) -> float:
    """g(y) = F(project(My)); consumes exactly one FE."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise InvalidInputError(f"Expected a single genome, got shape {y.shape}")
    return obj.evaluate(project_to_box(lift(f, y)))
