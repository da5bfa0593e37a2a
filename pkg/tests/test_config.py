import pytest

from multiform.config import (
    ExperimentSpec,
    RunConfig,
    Variant,
    dump_manifest,
    load_manifest,
    parse_key_values,
    parse_seeds,
    read_key_value_file,
    spec_from_options,
    validated,
)
from multiform.exceptions import ConfigError, InvalidInputError
from multiform.functions import BaseFunction


def test_run_config_defaults():
    config = RunConfig(function="ackley", D=200, d_e=10, dims=(20, 20, 20, 20))
    assert config.K == 100
    assert config.max_fes == 50_000
    assert config.CR == 0.9
    assert config.F == 0.35
    assert config.alpha == 2.0
    assert config.c_max == 10.0
    assert config.floor == 2
    assert config.variant is Variant.S_MF
    assert config.n_formulations == 5
    assert config.transfer_enabled
    assert config.dynamic_allocation


@pytest.mark.parametrize(
    "variant, n, transfer, dynamic",
    [
        (Variant.S, 1, False, False),
        (Variant.S_M, 4, False, False),
        (Variant.S_MT, 5, True, False),
        (Variant.S_MF, 5, True, True),
    ],
)
def test_variant_switches(variant, n, transfer, dynamic):
    config = RunConfig(function="ackley", D=50, d_e=5, dims=(10,) * 4, variant=variant)
    assert config.n_formulations == n
    assert config.transfer_enabled is transfer
    assert config.dynamic_allocation is dynamic
    assert config.includes_original is (variant is not Variant.S_M)


def test_transfer_override():
    config = RunConfig(function="ackley", D=50, d_e=5, dims=(10,), variant=Variant.S_MT, transfer=False)
    assert not config.transfer_enabled


@pytest.mark.parametrize(
    "overrides",
    [
        {"d_e": 50},
        {"dims": (50,)},
        {"dims": ()},
        {"K": 20},
        {"max_fes": 100},
        {"floor": 30},
        {"CR": 1.5},
        {"ridge": 0.0},
        {"unknown": 1},
    ],
)
def test_infeasible_configs_are_rejected(overrides):
    data = {"function": "ackley", "D": 50, "d_e": 5, "dims": (10,) * 4, **overrides}
    with pytest.raises(ConfigError):
        validated(RunConfig, data)


def test_config_error_is_invalid_input():
    assert issubclass(ConfigError, InvalidInputError)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("0..3", (0, 1, 2, 3)),
        ("1,5,7", (1, 5, 7)),
        ("0..1,9", (0, 1, 9)),
    ],
)
def test_parse_seeds(text, expected):
    assert parse_seeds(text) == expected


@pytest.mark.parametrize("text", ["", "a..b", "5..2", "x"])
def test_parse_seeds_rejects(text):
    with pytest.raises(ConfigError):
        parse_seeds(text)


def test_parse_key_values():
    options = parse_key_values("# comment\nfunction = ackley\n\nD=200  # inline\n")
    assert options == {"function": "ackley", "D": "200"}
    with pytest.raises(ConfigError):
        parse_key_values("colour=blue")
    with pytest.raises(ConfigError):
        parse_key_values("function ackley")
    assert parse_key_values('out="my results"\njobs=-1') == {"out": "my results", "jobs": "-1"}


def test_read_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_key_value_file(tmp_path / "missing.txt")


def test_spec_from_options_defaults():
    spec = spec_from_options({"function": "rastrigin", "D": "200", "de": "10"})
    assert spec.functions == [BaseFunction.RASTRIGIN]
    assert spec.variants == (Variant.S_MF,)
    assert spec.seeds == (0,)
    assert spec.templates[0].dims == (20, 20, 20, 20)
    assert spec.reference is Variant.S_MF


def test_spec_from_options_lists():
    spec = spec_from_options(
        {"function": "all", "variant": "de,de+mf", "D": "30", "de": "2", "dims": "4,6", "seeds": "0..4"}
    )
    assert len(spec.functions) == 6
    configs = list(spec.run_configs())
    assert len(configs) == 6 * 2 * 5
    assert [c.variant for c in configs[:10]] == [Variant.S] * 5 + [Variant.S_MF] * 5
    assert configs[0].function is BaseFunction.ACKLEY


@pytest.mark.parametrize(
    "options",
    [
        {"D": "200", "de": "10"},
        {"function": "sphere", "D": "200", "de": "10"},
        {"function": "ackley", "D": "x", "de": "10"},
        {"function": "ackley", "D": "200", "de": "10", "variant": "cmaes"},
        {"function": "ackley", "D": "200", "de": "10", "pop": "many"},
        {"function": "ackley", "D": "200", "de": "10", "seeds": "1,1"},
        {"function": "ackley", "D": "10", "de": "10"},
        {"function": "ackley", "D": "200", "de": "10", "jobs": "0"},
    ],
)
def test_spec_from_options_rejects(options):
    with pytest.raises(ConfigError):
        spec_from_options(options)


def test_manifest_round_trip(tmp_path):
    spec = spec_from_options(
        {
            "function": "ackley,griewank",
            "variant": "all",
            "D": "40",
            "de": "3",
            "dims": "5,6,7",
            "seeds": "2..4",
            "cr": "0.8",
            "f": "0.5",
            "ridge": "1e-4",
            "random_attribution": "true",
            "transfer": "false",
            "curves": "false",
        }
    )
    path = tmp_path / "manifest.txt"
    path.write_text(dump_manifest(spec))
    loaded = load_manifest(path)
    assert loaded.model_dump() == spec.model_dump()
    assert isinstance(loaded, ExperimentSpec)
