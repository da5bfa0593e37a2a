import numpy as np
import pytest

from multiform.embedding import (
    evaluate_low_dim,
    lift,
    make_embedding_matrix,
    make_formulation_set,
    project_to_box,
)
from multiform.exceptions import InvalidInputError
from multiform.functions import eval_embedded
from multiform.models import Formulation, FormulationKind


def test_embedding_matrix_moments(rng):
    M = make_embedding_matrix(100_001, 1, rng)
    assert M.shape == (100_001, 1)
    assert abs(M.mean()) < 0.02
    assert abs(M.var() - 1.0) < 0.05


def test_embedding_matrix_large_shape(rng):
    M = make_embedding_matrix(5000, 50, rng)
    assert M.shape == (5000, 50)
    assert np.all(np.isfinite(M))


def test_embedding_matrix_determinism():
    a = make_embedding_matrix(30, 4, np.random.default_rng(9))
    b = make_embedding_matrix(30, 4, np.random.default_rng(9))
    np.testing.assert_array_equal(a, b)


def test_embedding_matrix_rejects_full_dimension(rng):
    with pytest.raises(InvalidInputError):
        make_embedding_matrix(10, 10, rng)


def test_formulation_set_with_original(rng):
    fset = make_formulation_set(200, [20, 20, 20, 20], True, rng)
    assert len(fset) == 5
    assert [f.id for f in fset] == [0, 1, 2, 3, 4]
    assert [f.is_original for f in fset] == [False, False, False, False, True]
    assert fset.dims == [20, 20, 20, 20, 200]
    assert fset[0].matrix.shape == (200, 20)


def test_formulation_set_original_only(rng):
    fset = make_formulation_set(10, [], True, rng)
    assert len(fset) == 1
    assert fset[0].kind is FormulationKind.ORIGINAL
    assert fset[0].d == 10


def test_formulation_set_dimension_checks(rng):
    with pytest.raises(InvalidInputError):
        make_formulation_set(100, [5, 25, 100], True, rng)
    fset = make_formulation_set(100, [5, 25, 50], True, rng)
    assert fset.dims == [5, 25, 50, 100]
    with pytest.raises(InvalidInputError):
        make_formulation_set(10, [], False, rng)


def test_lift_embedded():
    f = Formulation(0, FormulationKind.EMBEDDED, 1, 2, np.array([[1.0], [2.0]]))
    np.testing.assert_array_equal(lift(f, np.array([0.5])), [0.5, 1.0])


def test_lift_original_and_null_map(original_formulation):
    y = np.linspace(-1.0, 1.0, 10)
    np.testing.assert_array_equal(lift(original_formulation, y), y)
    null = Formulation(0, FormulationKind.EMBEDDED, 2, 3, np.zeros((3, 2)))
    np.testing.assert_array_equal(lift(null, np.array([0.3, -0.9])), np.zeros(3))


def test_lift_batch_matches_rows(rng):
    f = Formulation(0, FormulationKind.EMBEDDED, 3, 8, rng.standard_normal((8, 3)))
    Y = rng.uniform(-1.0, 1.0, (4, 3))
    np.testing.assert_allclose(lift(f, Y), np.array([lift(f, y) for y in Y]), rtol=1e-12)


def test_lift_length_mismatch(original_formulation):
    with pytest.raises(InvalidInputError):
        lift(original_formulation, np.zeros(9))


def test_formulation_validation():
    with pytest.raises(InvalidInputError):
        Formulation(0, FormulationKind.EMBEDDED, 2, 5, None)
    with pytest.raises(InvalidInputError):
        Formulation(0, FormulationKind.EMBEDDED, 2, 5, np.zeros((5, 3)))
    with pytest.raises(InvalidInputError):
        Formulation(0, FormulationKind.ORIGINAL, 4, 5)


@pytest.mark.parametrize(
    "x, expected",
    [
        ([2.0, 0.5], [1.0, 0.5]),
        ([0.1, -0.2, 0.3], [0.1, -0.2, 0.3]),
        ([-3.0, 4.0, 0.0], [-1.0, 1.0, 0.0]),
    ],
)
def test_project_to_box(x, expected):
    np.testing.assert_array_equal(project_to_box(np.array(x)), expected)


def test_project_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        project_to_box(np.array([np.nan, 0.0]))


def test_projection_is_nearest_box_point(rng):
    for _ in range(100):
        x = rng.uniform(-3.0, 3.0, 5)
        nearest = np.linalg.norm(project_to_box(x) - x)
        samples = rng.uniform(-1.0, 1.0, (10_000, 5))
        assert nearest <= np.min(np.linalg.norm(samples - x, axis=1))


def test_evaluate_low_dim_original_at_optimum(ackley_objective):
    f = Formulation(0, FormulationKind.ORIGINAL, 10, 10)
    value = evaluate_low_dim(f, ackley_objective, ackley_objective.known_optimum())
    assert value == pytest.approx(0.0, abs=1e-9)
    assert ackley_objective.eval_count == 1


def test_evaluate_low_dim_projects_before_evaluating(ackley_objective, rng):
    f = Formulation(0, FormulationKind.EMBEDDED, 2, 10, 5.0 * rng.standard_normal((10, 2)))
    y = np.array([0.9, -0.8])
    expected = ackley_objective.evaluate(np.clip(f.matrix @ y, -1.0, 1.0))
    assert evaluate_low_dim(f, ackley_objective, y) == expected
    with pytest.raises(InvalidInputError):
        evaluate_low_dim(f, ackley_objective, np.zeros((2, 2)))


def test_formulation_bounds(original_formulation):
    lower, upper = original_formulation.bounds
    np.testing.assert_array_equal(lower, -np.ones(10))
    np.testing.assert_array_equal(upper, np.ones(10))


def test_projection_is_idempotent(rng):
    for _ in range(100):
        once = project_to_box(rng.uniform(-3.0, 3.0, 7))
        np.testing.assert_array_equal(project_to_box(once), once)


def test_evaluate_low_dim_is_projected_lift(ackley_objective, rng):
    f = Formulation(0, FormulationKind.EMBEDDED, 2, 10, rng.standard_normal((10, 2)))
    for _ in range(100):
        y = rng.uniform(-1.0, 1.0, 2)
        expected = eval_embedded(ackley_objective, project_to_box(lift(f, y)))
        assert evaluate_low_dim(f, ackley_objective, y) == expected
    assert ackley_objective.eval_count == 200


def test_no_projection_inside_the_box(ackley_objective, rng):
    f = Formulation(0, FormulationKind.EMBEDDED, 3, 10, rng.standard_normal((10, 3)))
    for _ in range(100):
        y = rng.uniform(-1.0, 1.0, 3)
        y *= 0.99 / max(1.0, np.max(np.abs(f.matrix @ y)))
        assert np.max(np.abs(lift(f, y))) <= 1.0
        direct = eval_embedded(ackley_objective, lift(f, y))
        assert evaluate_low_dim(f, ackley_objective, y) == direct
