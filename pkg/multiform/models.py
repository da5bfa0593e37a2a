"""Data models for the multiform optimization library."""

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np

from multiform.exceptions import InvalidInputError

if TYPE_CHECKING:
    from multiform.config import RunConfig


class FormulationKind(str, enum.Enum):
    """
    Kinds of search formulation
    """

    EMBEDDED = "embedded"
    ORIGINAL = "original"


class Significance(str, enum.Enum):
    """
    Outcome of a paired comparison against the reference variant
    """

    BETTER = "better"
    SIMILAR = "similar"
    WORSE = "worse"


@dataclass(frozen=True)
class Formulation:
    """
    One search formulation of the target problem.

    An embedded formulation searches y in [-1, 1]^d and evaluates the target at
    the box projection of ``matrix @ y``. The original formulation searches the
    ambient box directly, so its lift is the identity and ``matrix`` is None.
    """

    id: int
    kind: FormulationKind
    d: int
    ambient_dim: int
    matrix: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind is FormulationKind.EMBEDDED:
            if self.matrix is None:
                raise InvalidInputError("Embedded formulation requires a matrix")
            if self.matrix.shape != (self.ambient_dim, self.d):
                raise InvalidInputError(
                    f"Embedding matrix shape {self.matrix.shape} does not match "
                    f"({self.ambient_dim}, {self.d})"
                )
            if self.d >= self.ambient_dim:
                raise InvalidInputError(
                    f"Embedding dimension {self.d} must be below {self.ambient_dim}"
                )
            if not np.all(np.isfinite(self.matrix)):
                raise InvalidInputError("Embedding matrix has non-finite entries")
        elif self.d != self.ambient_dim:
            raise InvalidInputError(
                f"Original formulation must search all {self.ambient_dim} dimensions"
            )

    @property
    def is_original(self) -> bool:
        return self.kind is FormulationKind.ORIGINAL

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-coordinate lower and upper bounds of the search box."""
        return -np.ones(self.d), np.ones(self.d)


@dataclass(frozen=True)
class FormulationSet:
    """Ordered formulations with ids 0..N-1."""

    formulations: Tuple[Formulation, ...]
    includes_original: bool

    def __post_init__(self):
        ids = [f.id for f in self.formulations]
        if ids != list(range(len(ids))):
            raise InvalidInputError(f"Formulation ids must be 0..N-1, got {ids}")
        originals = sum(f.is_original for f in self.formulations)
        if originals != (1 if self.includes_original else 0):
            raise InvalidInputError(
                f"Expected {int(self.includes_original)} original formulation(s), "
                f"found {originals}"
            )

    def __len__(self) -> int:
        return len(self.formulations)

    def __iter__(self):
        return iter(self.formulations)

    def __getitem__(self, index: int) -> Formulation:
        return self.formulations[index]

    @property
    def dims(self) -> List[int]:
        return [f.d for f in self.formulations]


@dataclass(frozen=True)
class Individual:
    """A genome attributed to one formulation and its fitness there."""

    genome: np.ndarray
    fitness: float
    formulation_id: int


@dataclass
class SubPopulation:
    """
    Individuals attributed to one formulation.

    Genomes are stored row-wise in a (size, d) array and fitness in a
    (size,) array. ``cursor`` is the next DE target index; it persists across
    generations so partial offspring budgets still visit every member.
    """

    formulation_id: int
    genomes: np.ndarray
    fitness: np.ndarray
    cursor: int = 0

    def __post_init__(self):
        if self.genomes.ndim != 2 or self.fitness.shape != (self.genomes.shape[0],):
            raise InvalidInputError(
                f"Inconsistent subpopulation arrays: genomes {self.genomes.shape}, "
                f"fitness {self.fitness.shape}"
            )

    @property
    def size(self) -> int:
        return self.genomes.shape[0]

    @property
    def dim(self) -> int:
        return self.genomes.shape[1]

    @property
    def members(self) -> List[Individual]:
        return [
            Individual(self.genomes[i].copy(), float(self.fitness[i]), self.formulation_id)
            for i in range(self.size)
        ]

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    @property
    def best_fitness(self) -> float:
        return float(self.fitness[self.best_index])

    @property
    def best_genome(self) -> np.ndarray:
        return self.genomes[self.best_index].copy()

    def worst_index(self) -> int:
        """Index of the highest-fitness member other than the best one."""
        best = self.best_index
        masked = self.fitness.copy()
        masked[best] = -np.inf
        return int(np.argmax(masked))

    def copy(self) -> "SubPopulation":
        return SubPopulation(
            self.formulation_id, self.genomes.copy(), self.fitness.copy(), self.cursor
        )


@dataclass(frozen=True)
class TransferMap:
    """
    Linear map W from a source formulation's genomes to a target's.

    W is kept factored as ``left @ right`` over the zero-padded common
    dimension ``rows``; the dense matrix is only built on request.
    """

    source_id: int
    target_id: int
    source_dim: int
    target_dim: int
    ridge: float
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)

    @property
    def rows(self) -> int:
        return self.left.shape[0]

    @property
    def W(self) -> np.ndarray:
        return self.left @ self.right


@dataclass(frozen=True)
class GenerationRecord:
    """Snapshot of one generation of a run."""

    generation: int
    fes: int
    formulation_bests: Tuple[float, ...]
    best_fitness: float
    allocation: Tuple[float, ...]
    offspring: Tuple[int, ...] = ()


@dataclass
class RunLog:
    """
    Full trace and final result of one run.
    """

    config: "RunConfig"
    records: List[GenerationRecord] = field(default_factory=list)
    formulation_genomes: List[np.ndarray] = field(default_factory=list)
    """Best genome found by each formulation, indexed by formulation id."""
    formulation_fitness: List[float] = field(default_factory=list)
    """Best fitness of each formulation, indexed by formulation id."""
    best_formulation: Optional[int] = None
    best_genome: Optional[np.ndarray] = None
    best_x: Optional[np.ndarray] = None
    """High-dimensional incumbent recovered from the best formulation."""
    best_fitness: Optional[float] = None
    fes: int = 0

    @property
    def run_id(self) -> str:
        variant = self.config.variant.value.replace("+", "_")
        return f"{self.config.function.value}_{variant}_seed{self.config.seed}"

    @property
    def n_formulations(self) -> int:
        return len(self.formulation_fitness)

    def curve(self) -> List[Tuple[int, float]]:
        """(cumulative FEs, global best) pairs, one per generation."""
        return [(r.fes, r.best_fitness) for r in self.records]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "function": self.config.function.value,
            "variant": self.config.variant.value,
            "seed": self.config.seed,
            "fes": self.fes,
            "final_fitness": self.best_fitness,
            "best_formulation": self.best_formulation,
        }


@dataclass(frozen=True)
class WilcoxonResult:
    """Outcome of a two-sided paired signed-rank test of a against b."""

    statistic: float
    """W = min(W+, W-) over the non-zero differences a - b."""
    significant: bool
    direction: str
    """'a' when a tends to be smaller, 'b' when b does, 'none' otherwise."""
    n: int
    """Number of non-zero differences."""
    w_plus: float = 0.0
    w_minus: float = 0.0
    p_value: Optional[float] = None


@dataclass(frozen=True)
class SummaryRow:
    """Mean/std of final fitness for one (function, variant) cell."""

    function: str
    variant: str
    mean: float
    std: float
    median: float
    n_runs: int
    mark: Significance
    statistic: Optional[float] = None
