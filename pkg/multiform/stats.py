"""Paired significance testing and per-cell result summaries."""

import functools
import logging
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import stats

from multiform.config import Variant
from multiform.exceptions import InvalidInputError
from multiform.models import RunLog, Significance, SummaryRow, WilcoxonResult

logger = logging.getLogger(__name__)

MIN_PAIRS = 6
EXACT_LIMIT = 25
ALPHA = 0.05


@functools.lru_cache(maxsize=None)
def signed_rank_null_counts(n: int) -> np.ndarray:
    """
    Number of sign assignments giving each rank sum W+ = 0..n(n+1)/2.

    Each subset of the ranks 1..n is equally likely under the null, so the
    counts are subset-sum counts.
    """
    counts = np.zeros(n * (n + 1) // 2 + 1, dtype=np.int64)
    counts[0] = 1
    for rank in range(1, n + 1):
        counts[rank:] = counts[rank:] + counts[:-rank]
    return counts


@functools.lru_cache(maxsize=None)
def exact_critical_value(n: int, alpha: float = ALPHA) -> int:
    """
    Largest w with P(W <= w) <= alpha / 2 under the null, or -1 if none.

    W <= critical value is significant for the two-sided test.
    """
    cdf = np.cumsum(signed_rank_null_counts(n)) / 2.0**n
    below = np.nonzero(cdf <= alpha / 2.0)[0]
    return int(below[-1]) if below.size else -1


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float], alpha: float = ALPHA) -> WilcoxonResult:
    """
    Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped and tied magnitudes get average ranks. Up
    to 25 pairs the statistic is compared with the exact critical value;
    above that a normal approximation with tie-corrected variance and a
    continuity correction is used. Fewer than 6 non-zero differences is
    never significant.

    Args:
        a: First sample (e.g. final fitness of one variant per seed)
        b: Second sample, paired element-wise with ``a``
        alpha: Two-sided significance level

    Returns:
        A WilcoxonResult; ``direction`` names the sample with smaller values
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidInputError(f"Paired samples must have equal length, got {a.shape} and {b.shape}")

    diff = a - b
    diff = diff[diff != 0.0]
    n = diff.size
    ranks = stats.rankdata(np.abs(diff))
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    statistic = min(w_plus, w_minus)
    direction = "a" if w_plus < w_minus else "b" if w_plus > w_minus else "none"

    if n < MIN_PAIRS:
        return WilcoxonResult(statistic, False, direction, n, w_plus, w_minus)

    if n <= EXACT_LIMIT:
        significant = statistic <= exact_critical_value(n, alpha)
        cdf = np.cumsum(signed_rank_null_counts(n)) / 2.0**n
        p_value = min(1.0, 2.0 * float(cdf[int(np.floor(statistic))]))
    else:
        _, tie_sizes = np.unique(np.abs(diff), return_counts=True)
        mean = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_sizes**3 - tie_sizes) / 48.0
        z = (abs(statistic - mean) - 0.5) / np.sqrt(var)
        p_value = float(min(1.0, 2.0 * stats.norm.sf(z)))
        significant = p_value < alpha

    return WilcoxonResult(statistic, bool(significant), direction, n, w_plus, w_minus, p_value)


def _final_by_seed(logs: Sequence[RunLog]) -> Dict[Tuple[str, str], Dict[int, float]]:
    cells: Dict[Tuple[str, str], Dict[int, float]] = defaultdict(dict)
    for log in logs:
        key = (log.config.function.value, log.config.variant.value)
        if log.config.seed in cells[key]:
            raise InvalidInputError(f"Seed {log.config.seed} appears twice in cell {key}")
        cells[key][log.config.seed] = float(log.best_fitness)
    return cells


def summarize(logs: Sequence[RunLog], reference: Variant = Variant.S_MF) -> List[SummaryRow]:
    """
    Mean, std and median of final fitness per (function, variant) cell.

    Each non-reference cell is marked better/similar/worse than the
    reference variant of the same function by a paired signed-rank test over
    shared seeds. The reference row itself is marked similar.
    """
    if not logs:
        raise InvalidInputError("Nothing to summarize")
    reference = Variant(reference)
    cells = _final_by_seed(logs)

    rows = []
    for (function, variant), by_seed in cells.items():
        values = np.array([by_seed[s] for s in sorted(by_seed)])
        mark, statistic = Significance.SIMILAR, None
        ref_cell = cells.get((function, reference.value))
        if variant != reference.value and ref_cell is not None:
            if set(ref_cell) != set(by_seed):
                raise InvalidInputError(
                    f"Seeds of {function}/{variant} do not pair with reference {reference.value}"
                )
            ref_values = np.array([ref_cell[s] for s in sorted(ref_cell)])
            result = wilcoxon_signed_rank(values, ref_values)
            statistic = result.statistic
            if result.significant:
                mark = Significance.BETTER if result.direction == "a" else Significance.WORSE
        rows.append(
            SummaryRow(
                function=function,
                variant=variant,
                mean=float(np.mean(values)),
                std=float(np.std(values)),
                median=float(np.median(values)),
                n_runs=int(values.size),
                mark=mark,
                statistic=statistic,
            )
        )
    logger.debug(f"Summarized {len(logs)} runs into {len(rows)} cells")
    return rows


def median_final_fitness(logs: Sequence[RunLog]) -> Dict[Tuple[str, Variant], float]:
    """(function, variant) -> median final fitness over seeds."""
    return {
        (function, Variant(variant)): float(np.median(list(by_seed.values())))
        for (function, variant), by_seed in _final_by_seed(logs).items()
    }


def median_wins(
    medians: Dict[Tuple[str, Variant], float], variant: Variant, against: Variant
) -> int:
    """Number of functions where ``variant``'s median is at most ``against``'s."""
    functions = sorted({function for function, _ in medians})
    return sum(medians[(fn, variant)] <= medians[(fn, against)] for fn in functions)
