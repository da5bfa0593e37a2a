import numpy as np
import pytest

from multiform.allocation import (
    AllocationState,
    allocate_offspring,
    convergence_trend,
    softmax_allocation,
    update_preferences,
)
from multiform.exceptions import InvalidInputError


@pytest.mark.parametrize(
    "H, expected",
    [
        ([0.0, 0.0], [0.5, 0.5]),
        ([1.0] * 5, [0.2] * 5),
        ([np.log(2.0), 0.0], [2.0 / 3.0, 1.0 / 3.0]),
    ],
)
def test_softmax_examples(H, expected):
    np.testing.assert_allclose(softmax_allocation(H), expected, rtol=1e-12)


def test_softmax_stays_positive_for_extreme_preferences():
    P = softmax_allocation([1000.0, -1000.0, 0.0])
    assert np.all(P > 0.0)
    assert P.sum() == pytest.approx(1.0, abs=1e-12)


def test_softmax_rejects_empty():
    with pytest.raises(InvalidInputError):
        softmax_allocation([])


def test_convergence_trend_examples():
    assert convergence_trend(3.0, 3.0, 1e-12, 10.0) == 0.0
    assert convergence_trend(10.0, 5.0, 1e-12, 10.0) == pytest.approx(1.0)
    assert convergence_trend(1.0, 0.0, 1e-12, 10.0) == 10.0
    np.testing.assert_allclose(
        convergence_trend(np.array([10.0, 4.0]), np.array([5.0, 4.0]), 1e-12, 10.0), [1.0, 0.0]
    )


def test_convergence_trend_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        convergence_trend(np.inf, 1.0, 1e-12, 10.0)


def test_preference_update_worked_example():
    H = update_preferences([0.0, 0.0], [1.0, 0.0], [0.5, 0.5], 2.0)
    np.testing.assert_array_equal(H, [1.0, -1.0])


def test_preference_update_is_stationary_without_progress():
    H = np.array([0.3, -1.2, 0.9])
    np.testing.assert_array_equal(update_preferences(H, np.zeros(3), softmax_allocation(H), 2.0), H)


def test_preference_update_length_mismatch():
    with pytest.raises(InvalidInputError):
        update_preferences([0.0, 0.0], [1.0], [0.5, 0.5], 2.0)


def test_allocation_algebra_properties(rng):
    for _ in range(200):
        n = int(rng.integers(1, 8))
        H = rng.normal(0.0, 3.0, n)
        P = softmax_allocation(H)
        assert P.sum() == pytest.approx(1.0, abs=1e-12)
        C = rng.uniform(0.0, 10.0, n)
        assert update_preferences(H, C, P, 2.0).sum() == pytest.approx(H.sum(), abs=1e-12)


@pytest.mark.parametrize(
    "P, expected",
    [
        ([0.25] * 4, [25, 25, 25, 25]),
        ([0.5, 0.3, 0.2], [50, 30, 20]),
        ([0.99, 0.005, 0.005], [96, 2, 2]),
    ],
)
def test_offspring_allocation_examples(P, expected):
    np.testing.assert_array_equal(allocate_offspring(P, 100, 2), expected)


def test_offspring_allocation_sums_to_budget(rng):
    for _ in range(200):
        n = int(rng.integers(1, 10))
        P = softmax_allocation(rng.normal(0.0, 4.0, n))
        counts = allocate_offspring(P, 100, 2)
        assert counts.sum() == 100
        assert np.all(counts >= 2)


def test_offspring_allocation_infeasible_floor():
    with pytest.raises(InvalidInputError):
        allocate_offspring([0.5, 0.3, 0.2], 5, 2)


def test_allocation_state_shifts_towards_progress():
    state = AllocationState.initial([10.0, 10.0, 10.0])
    np.testing.assert_allclose(state.P, [1 / 3] * 3)
    P = state.advance([5.0, 10.0, 10.0])
    assert P[0] > P[1] == pytest.approx(P[2])
    np.testing.assert_array_equal(state.prev_best, [5.0, 10.0, 10.0])
    np.testing.assert_allclose(state.last_trend, [1.0, 0.0, 0.0])
    assert state.H.sum() == pytest.approx(0.0, abs=1e-12)


def test_softmax_is_monotone_in_each_preference(rng):
    for _ in range(100):
        H = rng.normal(0.0, 2.0, 4)
        k = int(rng.integers(4))
        raised = H.copy()
        raised[k] += rng.uniform(0.1, 2.0)
        before, after = softmax_allocation(H), softmax_allocation(raised)
        assert after[k] > before[k]
        assert np.all(np.delete(after, k) < np.delete(before, k))


def test_equal_trends_under_uniform_allocation_keep_preferences(rng):
    H = rng.normal(0.0, 1.0, 5)
    P = np.full(5, 0.2)
    for c in (0.0, 0.7, 10.0):
        np.testing.assert_allclose(update_preferences(H, np.full(5, c), P, 2.0), H, atol=1e-12)
