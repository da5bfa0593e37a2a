"""Run and experiment configuration.

Configurations are frozen pydantic models. Experiments can also be described
as plain ``key=value`` text, the format shared by ``--config`` files and the
run manifest written next to the results.
"""

import enum
import io
import itertools
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple, Type, TypeVar

from dotenv.parser import parse_stream
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from multiform.exceptions import ConfigError
from multiform.functions import BaseFunction

MIN_SHARE = 5
DEFAULT_EMBEDDINGS = 4

ModelT = TypeVar("ModelT", bound=BaseModel)


class Variant(str, enum.Enum):
    """
    Algorithm variants of the ablation study
    """

    S = "de"
    S_M = "de+m"
    S_MT = "de+mt"
    S_MF = "de+mf"

    @property
    def label(self) -> str:
        return self.value.upper()

    @property
    def uses_embeddings(self) -> bool:
        return self is not Variant.S

    @property
    def includes_original(self) -> bool:
        return self is not Variant.S_M

    @property
    def transfer(self) -> bool:
        return self in (Variant.S_MT, Variant.S_MF)

    @property
    def dynamic_allocation(self) -> bool:
        return self is Variant.S_MF


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    function: BaseFunction = Field(description="Base benchmark function")
    D: int = Field(gt=1, description="Ambient dimension")
    d_e: int = Field(ge=1, description="Effective dimension of the objective")
    dims: Tuple[int, ...] = Field(default=(), description="Embedding dimension per formulation")
    variant: Variant = Field(default=Variant.S_MF, description="Algorithm variant")
    K: int = Field(default=100, description="Total population size")
    max_fes: int = Field(default=50_000, description="Function evaluation budget")
    seed: int = Field(default=0, ge=0, description="Seed for objective and algorithm streams")
    CR: float = Field(default=0.9, ge=0.0, le=1.0, description="DE crossover rate")
    F: float = Field(default=0.35, ge=0.0, description="DE scale factor")
    alpha: float = Field(default=2.0, gt=0.0, description="Preference step size")
    epsilon: float = Field(default=1e-12, gt=0.0, description="Trend denominator guard")
    c_max: float = Field(default=10.0, gt=0.0, description="Upper clamp of convergence trends")
    ridge: float = Field(default=1e-6, gt=0.0, description="Ridge for transfer mappings")
    floor: int = Field(default=2, ge=1, description="Minimum offspring per formulation")
    transfer: Optional[bool] = Field(
        default=None, description="Override the variant's cross-form transfer switch"
    )
    random_attribution: bool = Field(
        default=False, description="Attribute individuals to formulations at random"
    )

    @property
    def embedding_dims(self) -> Tuple[int, ...]:
        return self.dims if self.variant.uses_embeddings else ()

    @property
    def includes_original(self) -> bool:
        return self.variant.includes_original

    @property
    def n_formulations(self) -> int:
        return len(self.embedding_dims) + int(self.includes_original)

    @property
    def transfer_enabled(self) -> bool:
        enabled = self.variant.transfer if self.transfer is None else self.transfer
        return enabled and self.n_formulations > 1

    @property
    def dynamic_allocation(self) -> bool:
        return self.variant.dynamic_allocation

    @model_validator(mode="after")
    def _check_feasible(self) -> "RunConfig":
        if self.d_e >= self.D:
            raise ValueError(f"d_e={self.d_e} must be below D={self.D}")
        for d in self.dims:
            if not 1 <= d < self.D:
                raise ValueError(f"embedding dimension {d} must satisfy 1 <= d < D={self.D}")
        if self.variant.uses_embeddings and not self.dims:
            raise ValueError(f"variant {self.variant.value} needs at least one embedding dimension")
        n = self.n_formulations
        if self.K < MIN_SHARE * n:
            raise ValueError(f"K={self.K} cannot give {n} formulations {MIN_SHARE} individuals each")
        if self.K < n * self.floor:
            raise ValueError(f"K={self.K} cannot give {n} formulations an offspring floor of {self.floor}")
        if self.max_fes <= self.K:
            raise ValueError(f"max_fes={self.max_fes} must exceed K={self.K}")
        return self


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    templates: Tuple[RunConfig, ...] = Field(description="One run template per function")
    variants: Tuple[Variant, ...] = Field(description="Variants run on every template")
    seeds: Tuple[int, ...] = Field(description="Independent runs, one per seed")
    out_dir: Path = Field(default=Path("results"), description="Output directory")
    curves: bool = Field(default=True, description="Write per-run convergence CSVs")
    reference: Variant = Field(default=Variant.S_MF, description="Variant marks are computed against")
    n_jobs: int = Field(
        default=1, description="Parallel workers for independent runs (-1 uses every CPU)"
    )

    @model_validator(mode="after")
    def _check_lists(self) -> "ExperimentSpec":
        if not self.templates or not self.variants or not self.seeds:
            raise ValueError("an experiment needs templates, variants and seeds")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError(f"seeds must be unique, got {list(self.seeds)}")
        if self.n_jobs == 0:
            raise ValueError("n_jobs must be positive, or negative to count back from all CPUs")
        return self

    @property
    def functions(self) -> List[BaseFunction]:
        return [t.function for t in self.templates]

    def run_configs(self) -> Iterator[RunConfig]:
        """Every (function, variant, seed) config, in that nesting order."""
        for template, variant, seed in itertools.product(self.templates, self.variants, self.seeds):
            data = template.model_dump()
            data.update(variant=variant, seed=seed)
            yield validated(RunConfig, data)


def validated(model: Type[ModelT], data: Mapping[str, Any]) -> ModelT:
    """Build a config model, re-raising validation failures as ConfigError."""
    try:
        return model.model_validate(dict(data))
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"Invalid {model.__name__}: {details}") from e


# key=value codec

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}

KNOWN_KEYS = (
    "function", "D", "de", "dims", "variant", "pop", "fes", "seeds", "cr", "f",
    "alpha", "epsilon", "c_max", "ridge", "floor", "transfer", "random_attribution",
    "reference", "curves", "jobs", "out",
)


def parse_key_values(text: str, source: str = "<config>") -> Dict[str, str]:
    """Parse key=value lines (.env syntax, comments allowed), rejecting unknown keys."""
    options = {}
    for binding in parse_stream(io.StringIO(text)):
        where = f"{source}:{binding.original.line}"
        if binding.error or (binding.key is not None and binding.value is None):
            raise ConfigError(f"{where}: expected key=value, got {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        if binding.key not in KNOWN_KEYS:
            raise ConfigError(f"{where}: unknown key {binding.key!r}")
        options[binding.key] = binding.value
    return options


def read_key_value_file(path: Path) -> Dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_key_values(text, str(path))


def parse_seeds(text: str) -> Tuple[int, ...]:
    """Seeds as ``a..b`` (inclusive) or a comma list, possibly mixed."""
    seeds: List[int] = []
    try:
        for part in filter(None, (p.strip() for p in text.split(","))):
            if ".." in part:
                low, high = (int(v) for v in part.split("..", 1))
                if high < low:
                    raise ConfigError(f"Empty seed range {part!r}")
                seeds.extend(range(low, high + 1))
            else:
                seeds.append(int(part))
    except ValueError as e:
        raise ConfigError(f"Invalid seed list {text!r}") from e
    if not seeds:
        raise ConfigError("No seeds given")
    return tuple(seeds)


def _parse_bool(key: str, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in _BOOL_TRUE:
        return True
    if lowered in _BOOL_FALSE:
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def _parse_ints(key: str, text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise ConfigError(f"{key} must be a comma list of integers, got {text!r}") from e


def _parse_choices(key: str, text: str, enum_cls: Type[enum.Enum]) -> Tuple[Any, ...]:
    names = [v.strip().lower() for v in text.split(",") if v.strip()]
    if names == ["all"]:
        return tuple(enum_cls)
    try:
        return tuple(enum_cls(v) for v in names)
    except ValueError as e:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{key} must be one of {choices} (or all), got {text!r}") from e


def spec_from_options(options: Mapping[str, str]) -> ExperimentSpec:
    """
    Build an ExperimentSpec from string options.

    Args:
        options: key=value pairs using the keys in ``KNOWN_KEYS``

    Returns:
        The validated ExperimentSpec
    """
    missing = [k for k in ("function", "D", "de") if not options.get(k)]
    if missing:
        raise ConfigError(f"Missing required option(s): {', '.join(missing)}")

    functions = _parse_choices("function", options["function"], BaseFunction)
    try:
        D = int(options["D"])
        d_e = int(options["de"])
    except ValueError as e:
        raise ConfigError(f"D and de must be integers: {e}") from e

    if options.get("dims"):
        dims = _parse_ints("dims", options["dims"])
    else:
        dims = (min(D - 1, 2 * d_e),) * DEFAULT_EMBEDDINGS

    numeric = {
        "pop": ("K", int),
        "fes": ("max_fes", int),
        "cr": ("CR", float),
        "f": ("F", float),
        "alpha": ("alpha", float),
        "epsilon": ("epsilon", float),
        "c_max": ("c_max", float),
        "ridge": ("ridge", float),
        "floor": ("floor", int),
    }
    base: Dict[str, Any] = {"D": D, "d_e": d_e, "dims": dims}
    for key, (field_name, cast) in numeric.items():
        if options.get(key):
            try:
                base[field_name] = cast(options[key])
            except ValueError as e:
                raise ConfigError(f"{key} must be a {cast.__name__}, got {options[key]!r}") from e
    if options.get("transfer"):
        base["transfer"] = _parse_bool("transfer", options["transfer"])
    if options.get("random_attribution"):
        base["random_attribution"] = _parse_bool("random_attribution", options["random_attribution"])

    variants = _parse_choices("variant", options.get("variant") or Variant.S_MF.value, Variant)
    # templates are validated with the most demanding variant in the experiment
    widest = max(variants, key=lambda v: (v.uses_embeddings, v.includes_original))
    templates = tuple(
        validated(RunConfig, {**base, "function": fn, "variant": widest}) for fn in functions
    )

    spec: Dict[str, Any] = {
        "templates": templates,
        "variants": variants,
        "seeds": parse_seeds(options.get("seeds") or "0"),
    }
    if options.get("reference"):
        spec["reference"] = _parse_choices("reference", options["reference"], Variant)[0]
    if options.get("curves"):
        spec["curves"] = _parse_bool("curves", options["curves"])
    if options.get("out"):
        spec["out_dir"] = Path(options["out"])
    if options.get("jobs"):
        try:
            spec["n_jobs"] = int(options["jobs"])
        except ValueError as e:
            raise ConfigError(f"jobs must be an integer, got {options['jobs']!r}") from e
    return validated(ExperimentSpec, spec)


def dump_manifest(spec: ExperimentSpec) -> str:
    """Render the key=value manifest that reproduces ``spec`` exactly."""
    t = spec.templates[0]
    lines = [
        "# multiform run manifest",
        f"function={','.join(fn.value for fn in spec.functions)}",
        f"D={t.D}",
        f"de={t.d_e}",
        f"dims={','.join(str(d) for d in t.dims)}",
        f"variant={','.join(v.value for v in spec.variants)}",
        f"pop={t.K}",
        f"fes={t.max_fes}",
        f"seeds={','.join(str(s) for s in spec.seeds)}",
        f"cr={t.CR!r}",
        f"f={t.F!r}",
        f"alpha={t.alpha!r}",
        f"epsilon={t.epsilon!r}",
        f"c_max={t.c_max!r}",
        f"ridge={t.ridge!r}",
        f"floor={t.floor}",
        f"random_attribution={str(t.random_attribution).lower()}",
        f"reference={spec.reference.value}",
        f"curves={str(spec.curves).lower()}",
    ]
    if t.transfer is not None:
        lines.append(f"transfer={str(t.transfer).lower()}")
    return "\n".join(lines) + "\n"


def load_manifest(path: Path) -> ExperimentSpec:
    """Read a manifest (or any key=value config) back into an ExperimentSpec."""
    return spec_from_options(read_key_value_file(path))
