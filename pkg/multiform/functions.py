"""Benchmark functions and high-dimensional embedded objectives.

The six base functions are evaluated on normalized coordinates z, which are
mapped affinely onto each function's native range before the formula is
applied. An embedded objective lives on the box [-1, 1]^D and only varies
along the first ``d_e`` rows of a random rotation.
"""

import enum
import logging
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg

from multiform.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, list, tuple]

SHIFT_RADIUS = 0.25
MAX_SHIFT_DRAWS = 10_000
WEIERSTRASS_TERMS = 21


class BaseFunction(str, enum.Enum):
    """
    Base benchmark functions
    """

    ACKLEY = "ackley"
    RASTRIGIN = "rastrigin"
    WEIERSTRASS = "weierstrass"
    ROSENBROCK = "rosenbrock"
    GRIEWANK = "griewank"
    ELLIPTIC = "elliptic"

    @property
    def native_range(self) -> Tuple[float, float]:
        return NATIVE_RANGES[self]

    def normalized_optimum(self, dim: int) -> np.ndarray:
        """Global minimizer in normalized coordinates."""
        lower, upper = self.native_range
        native = np.ones(dim) if self is BaseFunction.ROSENBROCK else np.zeros(dim)
        return (2.0 * native - (lower + upper)) / (upper - lower)


NATIVE_RANGES = {
    BaseFunction.ACKLEY: (-32.0, 32.0),
    BaseFunction.RASTRIGIN: (-5.0, 5.0),
    BaseFunction.WEIERSTRASS: (-0.5, 0.5),
    BaseFunction.ROSENBROCK: (-5.0, 5.0),
    BaseFunction.GRIEWANK: (-500.0, 500.0),
    BaseFunction.ELLIPTIC: (-5.0, 5.0),
}


def _ackley(x: np.ndarray) -> np.ndarray:
    # -20e^{-0.2 r} - e^{c} + 20 + e, regrouped so both parts are >= 0
    radius = np.sqrt(np.mean(x**2, axis=-1))
    cosines = np.mean(np.cos(2.0 * np.pi * x), axis=-1)
    return 20.0 * (1.0 - np.exp(-0.2 * radius)) + (np.e - np.exp(cosines))


def _rastrigin(x: np.ndarray) -> np.ndarray:
    return np.sum(x**2 + 10.0 * (1.0 - np.cos(2.0 * np.pi * x)), axis=-1)


_W_SCALE = 0.5 ** np.arange(WEIERSTRASS_TERMS)
_W_FREQ = 3.0 ** np.arange(WEIERSTRASS_TERMS)


def _weierstrass_inner(x: np.ndarray) -> np.ndarray:
    return np.sum(_W_SCALE * np.cos(2.0 * np.pi * _W_FREQ * (x[..., None] + 0.5)), axis=-1)


_W_BIAS = float(_weierstrass_inner(np.zeros(1))[0])


def _weierstrass(x: np.ndarray) -> np.ndarray:
    return np.sum(_weierstrass_inner(x) - _W_BIAS, axis=-1)


def _rosenbrock(x: np.ndarray) -> np.ndarray:
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2, axis=-1)


def _griewank(x: np.ndarray) -> np.ndarray:
    index = np.sqrt(np.arange(1, x.shape[-1] + 1))
    return np.sum(x**2, axis=-1) / 4000.0 + (1.0 - np.prod(np.cos(x / index), axis=-1))


def _elliptic(x: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    exponents = 6.0 * np.arange(d) / (d - 1) if d > 1 else np.zeros(1)
    return np.sum(10.0**exponents * x**2, axis=-1)


_FORMULAS = {
    BaseFunction.ACKLEY: _ackley,
    BaseFunction.RASTRIGIN: _rastrigin,
    BaseFunction.WEIERSTRASS: _weierstrass,
    BaseFunction.ROSENBROCK: _rosenbrock,
    BaseFunction.GRIEWANK: _griewank,
    BaseFunction.ELLIPTIC: _elliptic,
}


def to_native(fn: BaseFunction, z: np.ndarray) -> np.ndarray:
    lower, upper = fn.native_range
    return lower + (z + 1.0) * (upper - lower) / 2.0


def eval_base(fn: BaseFunction, z: ArrayLike) -> Union[float, np.ndarray]:
    """
    Evaluate a base benchmark function at normalized coordinates.

    Args:
        fn: Base function to evaluate
        z: A vector of normalized coordinates, or a 2-D batch with one point per row.
           Coordinates outside [-1, 1] are allowed.

    Returns:
        The function value (float) for a vector, an array of values for a batch
    """
    fn = BaseFunction(fn)
    z = np.asarray(z, dtype=float)
    if z.ndim not in (1, 2) or z.shape[-1] == 0:
        raise InvalidInputError(f"Expected a non-empty vector or batch, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("Input contains non-finite coordinates")
    values = _FORMULAS[fn](to_native(fn, z))
    return float(values) if z.ndim == 1 else values


def random_rotation(D: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw a Haar-uniform orthogonal matrix.

    Q comes from the QR factorization of a standard-Gaussian matrix, with each
    column's sign flipped so the triangular factor has a positive diagonal.
    """
    if int(D) != D or D < 1:
        raise InvalidInputError(f"Rotation dimension must be a positive integer, got {D}")
    gaussian = rng.standard_normal((D, D))
    q, r = linalg.qr(gaussian, overwrite_a=True, check_finite=False)
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    q *= signs
    return q


class EmbeddedObjective:
    """
    A rotated, shifted base function on [-1, 1]^D with effective dimension d_e.

    F(x) = eval_base(base, first d_e coordinates of R (x - s)). Only the first
    d_e rows of R matter for evaluation; the remaining rows span the constant
    subspace.
    """

    def __init__(
        self,
        base: BaseFunction,
        effective_dim: int,
        rotation: np.ndarray,
        shift: np.ndarray,
    ):
        D = rotation.shape[0]
        if rotation.shape != (D, D) or shift.shape != (D,):
            raise InvalidInputError(
                f"Rotation {rotation.shape} and shift {shift.shape} do not agree"
            )
        if not 1 <= effective_dim < D:
            raise InvalidInputError(
                f"Effective dimension must satisfy 1 <= d_e < D, got d_e={effective_dim}, D={D}"
            )
        self.base = BaseFunction(base)
        self.effective_dim = int(effective_dim)
        self.rotation = rotation
        self.shift = shift
        self.eval_count = 0
        self._effective_rows = np.ascontiguousarray(rotation[:effective_dim])

    @property
    def ambient_dim(self) -> int:
        return self.rotation.shape[0]

    @property
    def constant_basis(self) -> np.ndarray:
        """Rows of R spanning the subspace F does not depend on."""
        return self.rotation[self.effective_dim :]

    def _check_points(self, x: np.ndarray) -> None:
        if x.shape[-1] != self.ambient_dim:
            raise InvalidInputError(
                f"Expected points of length {self.ambient_dim}, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("Point contains non-finite coordinates")
        if np.any(np.abs(x) > 1.0):
            raise InvalidInputError("Point lies outside [-1, 1]^D; project it first")

    def evaluate(self, x: ArrayLike) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise InvalidInputError(f"Expected a vector, got shape {x.shape}")
        self._check_points(x)
        value = eval_base(self.base, self._effective_rows @ (x - self.shift))
        self.eval_count += 1
        return value

    def evaluate_batch(self, X: ArrayLike) -> np.ndarray:
        """Evaluate each row of X; consumes one FE per row."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise InvalidInputError(f"Expected a 2-D batch, got shape {X.shape}")
        self._check_points(X)
        values = eval_base(self.base, (X - self.shift) @ self._effective_rows.T)
        self.eval_count += X.shape[0]
        return values

    def known_optimum(self) -> np.ndarray:
        """x* = s + R^T pad(z*, 0)."""
        z_star = self.base.normalized_optimum(self.effective_dim)
        return self.shift + self._effective_rows.T @ z_star

    def __repr__(self) -> str:
        return (
            f"EmbeddedObjective({self.base.value}, D={self.ambient_dim}, "
            f"d_e={self.effective_dim}, fes={self.eval_count})"
        )


def make_embedded(
    fn: BaseFunction,
    D: int,
    d_e: int,
    rng: np.random.Generator,
    rotation: Optional[np.ndarray] = None,
    shift: Optional[np.ndarray] = None,
) -> EmbeddedObjective:
    """
    Build an embedded objective with a random rotation and shift.

    Args:
        fn: Base function
        D: Ambient dimension
        d_e: Effective dimension, 1 <= d_e < D
        rng: Random stream used for the rotation and the shift
        rotation: Optional fixed D x D rotation (skips the random draw)
        shift: Optional fixed shift (skips the random draw)

    Returns:
        An EmbeddedObjective whose known optimum lies inside [-1, 1]^D
    """
    if not 1 <= d_e < D:
        raise InvalidInputError(
            f"Effective dimension must satisfy 1 <= d_e < D, got d_e={d_e}, D={D}"
        )
    fn = BaseFunction(fn)
    R = random_rotation(D, rng) if rotation is None else np.asarray(rotation, dtype=float)
    pinned = R[:d_e].T @ fn.normalized_optimum(d_e)

    if shift is not None:
        s = np.asarray(shift, dtype=float)
        if np.any(np.abs(s + pinned) > 1.0):
            raise InvalidInputError("Imposed shift moves the optimum outside [-1, 1]^D")
        return EmbeddedObjective(fn, d_e, R, s)

    for attempt in range(1, MAX_SHIFT_DRAWS + 1):
        s = rng.uniform(-SHIFT_RADIUS, SHIFT_RADIUS, D)
        if np.all(np.abs(s + pinned) <= 1.0):
            if attempt > 100:
                logger.warning(f"Shift for {fn.value} accepted after {attempt} draws")
            return EmbeddedObjective(fn, d_e, R, s)

    raise InvalidInputError(
        f"Could not place the {fn.value} optimum inside the box after {MAX_SHIFT_DRAWS} shifts"
    )


def eval_embedded(obj: EmbeddedObjective, x: ArrayLike) -> float:
    return obj.evaluate(x)


def known_optimum(obj: EmbeddedObjective) -> np.ndarray:
    return obj.known_optimum()
