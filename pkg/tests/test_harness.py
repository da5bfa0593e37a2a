import pandas as pd
import pytest

from multiform import harness
from multiform.config import Variant, load_manifest, spec_from_options
from multiform.exceptions import OutputError
from multiform.functions import BaseFunction
from multiform.harness import cli_main, run_experiment, write_outputs
from multiform.stats import median_final_fitness, median_wins


def _small_args(out_dir, *extra):
    return [
        "--function", "ackley",
        "--D", "20",
        "--de", "2",
        "--dims", "4,4",
        "--variant", "de,de+mf",
        "--pop", "20",
        "--fes", "300",
        "--seeds", "0..2",
        "--out", str(out_dir),
        "--log-level", "WARNING",
        *extra,
    ]


def test_list_functions(capsys):
    assert cli_main(["--list-functions"]) == 0
    out = capsys.readouterr().out
    for fn in BaseFunction:
        assert fn.value in out


def test_missing_required_option(capsys):
    assert cli_main(["--D", "200", "--de", "10"]) == 2
    err = capsys.readouterr().err
    assert "usage:" in err
    assert "function" in err


def test_unknown_flag_is_a_usage_error(capsys):
    assert cli_main(["--function", "ackley", "--colour", "blue"]) == 2
    assert "usage:" in capsys.readouterr().err


def test_invalid_parameter_range(tmp_path, capsys):
    assert cli_main(_small_args(tmp_path, "--cr", "1.5")) == 2
    assert "usage:" in capsys.readouterr().err
    assert cli_main(_small_args(tmp_path, "--jobs", "0")) == 2
    assert "n_jobs" in capsys.readouterr().err


def test_end_to_end_outputs(tmp_path):
    assert cli_main(_small_args(tmp_path)) == 0

    curves = sorted((tmp_path / "convergence").glob("*.csv"))
    assert len(curves) == 6
    header = (tmp_path / "convergence" / "ackley_de_mf_seed0.csv").read_text().splitlines()[0]
    assert header == (
        "run_id,generation,fes,best_fitness,formulation_best_0,formulation_best_1,"
        "formulation_best_2,alloc_p_0,alloc_p_1,alloc_p_2"
    )
    header = (tmp_path / "convergence" / "ackley_de_seed1.csv").read_text().splitlines()[0]
    assert header == "run_id,generation,fes,best_fitness,formulation_best_0,alloc_p_0"

    final = pd.read_csv(tmp_path / "final.csv")
    assert len(final) == 6
    assert (final["fes"] <= 300).all()

    summary = pd.read_csv(tmp_path / "summary.csv")
    assert len(summary) == 1 * 2
    de_rows = final[final["variant"] == "de"]
    de_mean = summary.loc[summary["variant"] == "de", "mean"].iloc[0]
    assert de_mean == pytest.approx(de_rows["final_fitness"].mean(), rel=1e-12)
    assert set(summary["mark"]) == {"similar"}


def test_summary_is_computed_once(tmp_path, monkeypatch):
    calls = []
    summarize = harness.summarize

    def counting_summarize(logs, reference):
        calls.append(reference)
        return summarize(logs, reference)

    monkeypatch.setattr(harness, "summarize", counting_summarize)
    assert cli_main(_small_args(tmp_path)) == 0
    assert calls == [Variant.S_MF]
    assert (tmp_path / "summary.csv").exists()


def test_manifest_reproduces_curves(tmp_path):
    first = tmp_path / "first"
    assert cli_main(_small_args(first)) == 0

    spec = load_manifest(first / "manifest.txt")
    second = tmp_path / "second"
    write_outputs(run_experiment(spec), spec.model_copy(update={"out_dir": second}))

    for path in (first / "convergence").glob("*.csv"):
        assert (second / "convergence" / path.name).read_bytes() == path.read_bytes()
    assert (second / "final.csv").read_bytes() == (first / "final.csv").read_bytes()


def test_config_file_overrides_flags(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("# smaller budget\nfes=250\nseeds=4\n")
    out = tmp_path / "out"
    assert cli_main(_small_args(out, "--config", str(config))) == 0
    manifest = (out / "manifest.txt").read_text().splitlines()
    assert "fes=250" in manifest
    assert "seeds=4" in manifest


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MULTIFORM_OUTPUT_DIR", str(tmp_path / "env-out"))
    args = _small_args(tmp_path)
    out_index = args.index("--out")
    del args[out_index : out_index + 2]
    assert cli_main([*args, "--no-curves"]) == 0
    assert (tmp_path / "env-out" / "summary.csv").exists()
    assert not (tmp_path / "env-out" / "convergence").exists()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    spec = spec_from_options(
        {
            "function": "ackley",
            "D": "20",
            "de": "2",
            "dims": "4",
            "variant": "de",
            "pop": "20",
            "fes": "100",
            "out": str(blocker),
        }
    )
    logs = run_experiment(spec)
    with pytest.raises(OutputError) as excinfo:
        write_outputs(logs, spec)
    assert str(blocker) in str(excinfo.value)


@pytest.mark.slow
def test_desk_scale_variant_dominance():
    spec = spec_from_options(
        {
            "function": "all",
            "variant": "all",
            "D": "200",
            "de": "10",
            "dims": "20,20,20,20",
            "fes": "20000",
            "seeds": "0..9",
            "jobs": "-1",
        }
    )
    logs = run_experiment(spec)
    assert all(log.fes <= 20_000 for log in logs)

    medians = median_final_fitness(logs)
    assert median_wins(medians, Variant.S_MF, Variant.S_M) >= 4
    assert median_wins(medians, Variant.S_MF, Variant.S) >= 4
