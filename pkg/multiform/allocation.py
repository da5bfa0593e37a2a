"""Dynamic resource allocation across formulations.

Preference values H are turned into allocation probabilities with a softmax.
After every generation each formulation's relative best-fitness improvement
(its convergence trend C) moves its preference up or down against the
allocation-weighted total trend.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import special

from multiform.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


def softmax_allocation(H: Sequence[float]) -> np.ndarray:
    """P_k = exp(H_k) / sum_n exp(H_n), kept strictly positive."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 1 or H.size == 0:
        raise InvalidInputError("Preference vector must be a non-empty vector")
    if not np.all(np.isfinite(H)):
        raise InvalidInputError("Preference vector contains non-finite values")
    P = special.softmax(H)
    if np.any(P <= 0.0):
        P = np.maximum(P, _TINY)
        P /= P.sum()
    return P


def convergence_trend(
    prev_best: Union[float, np.ndarray],
    curr_best: Union[float, np.ndarray],
    epsilon: float,
    c_max: float,
) -> Union[float, np.ndarray]:
    """
    C = |prev - curr| / (|curr| + epsilon), clamped to [0, c_max].

    Works element-wise on arrays of per-formulation bests.
    """
    if epsilon <= 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    prev = np.asarray(prev_best, dtype=float)
    curr = np.asarray(curr_best, dtype=float)
    if not (np.all(np.isfinite(prev)) and np.all(np.isfinite(curr))):
        raise InvalidInputError("Convergence trend needs finite fitness values")
    trend = np.clip(np.abs(prev - curr) / (np.abs(curr) + epsilon), 0.0, c_max)
    return float(trend) if trend.ndim == 0 else trend


def update_preferences(
    H: Sequence[float],
    C: Sequence[float],
    P: Sequence[float],
    alpha: float,
) -> np.ndarray:
    """H'_k = H_k + alpha (C_k - P_k sum(C)); leaves sum(H) unchanged."""
    H, C, P = (np.asarray(v, dtype=float) for v in (H, C, P))
    if not H.shape == C.shape == P.shape or H.ndim != 1:
        raise InvalidInputError(
            f"Preference, trend and probability vectors differ: {H.shape}, {C.shape}, {P.shape}"
        )
    return H + alpha * (C - P * C.sum())


def allocate_offspring(P: Sequence[float], generation_budget: int, floor: int) -> np.ndarray:
    """
    Split a generation's offspring evaluations by probability.

    Largest-remainder rounding of P * budget (ties to the lower index), then
    every count below ``floor`` is raised to it, taking the difference one
    unit at a time from the currently largest count.

    Args:
        P: Allocation probabilities
        generation_budget: Offspring evaluations to hand out
        floor: Minimum offspring per formulation

    Returns:
        Integer counts summing to ``generation_budget``
    """
    P = np.asarray(P, dtype=float)
    n = P.size
    if floor < 1 or generation_budget < n * floor:
        raise InvalidInputError(
            f"Budget {generation_budget} cannot give {n} formulations at least {floor} each"
        )

    raw = P * generation_budget
    counts = np.floor(raw).astype(int)
    remainder = generation_budget - int(counts.sum())
    if remainder > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:remainder]] += 1
    elif remainder < 0:
        order = np.argsort(raw - counts, kind="stable")
        counts[order[:-remainder]] -= 1

    deficit = int(np.sum(np.maximum(floor - counts, 0)))
    counts = np.maximum(counts, floor)
    for _ in range(deficit):
        counts[int(np.argmax(counts))] -= 1

    return counts


@dataclass
class AllocationState:
    """
    Per-formulation preferences, probabilities and last observed bests.
    """

    H: np.ndarray
    P: np.ndarray
    prev_best: np.ndarray
    alpha: float = 2.0
    epsilon: float = 1e-12
    c_max: float = 10.0
    last_trend: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def initial(
        cls,
        initial_best: Sequence[float],
        alpha: float = 2.0,
        epsilon: float = 1e-12,
        c_max: float = 10.0,
    ) -> "AllocationState":
        """H_0 = 0, hence uniform P."""
        best = np.asarray(initial_best, dtype=float)
        H = np.zeros(best.size)
        return cls(H, softmax_allocation(H), best.copy(), alpha, epsilon, c_max, np.zeros(best.size))

    def advance(self, curr_best: Sequence[float]) -> np.ndarray:
        """
        Fold one generation's bests into H and refresh P.

        Returns:
            The new allocation probabilities
        """
        curr = np.asarray(curr_best, dtype=float)
        trend = convergence_trend(self.prev_best, curr, self.epsilon, self.c_max)
        self.H = update_preferences(self.H, trend, self.P, self.alpha)
        self.P = softmax_allocation(self.H)
        self.prev_best = curr.copy()
        self.last_trend = np.atleast_1d(trend)
        logger.debug(f"Allocation trend={self.last_trend} P={self.P}")
        return self.P
