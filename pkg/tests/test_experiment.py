"""
Tests for experiment configuration, model building, the execution engine,
result writers, the built-in suites and the command line.
"""
import csv
from math import e
from pathlib import Path

import pytest
import yaml

from entropylab.cli import EXIT_CONFIG, EXIT_OK, main
from entropylab.core.errors import ConfigError
from entropylab.experiment.builder import build_models
from entropylab.experiment.engine import ExperimentEngine, run_experiment
from entropylab.experiment.spec import ExperimentConfig
from entropylab.experiment.suites import SUITES, get_suite, list_suites, suite_configs
from entropylab.experiment.task import TaskStatus
from entropylab.experiment.writers import SUMMARY_COLUMNS, read_jsonl, render_profile_svg, write_results
from entropylab.geometry.bodies import Ball

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"


def _config(**overrides):
    data = {
        "name": "unit",
        "seed": 5,
        "models": [
            {"name": "cube_2", "family": "uniform_body", "params": {"variant": "cube", "params": {"n": 2}}},
            {"name": "exp_2", "family": "product", "of": [{"family": "exponential"}], "repeat": 2},
            {"name": "interval", "family": "uniform"},
        ],
        "checks": [
            {"check": "entropy_sandwich", "models": ["cube_2", "exp_2"]},
            {"check": "concentration", "models": ["exp_2"], "m": 2000, "eps_grid": [0.5, 1.0]},
            {"check": "epi", "models": ["interval", "interval"], "m": 1000, "m_inner": 64},
            {"check": "kappa_convolution", "params": {"k1": 0.5, "k2": 0.5, "expected": 0.25}},
        ],
    }
    data.update(overrides)
    return ExperimentConfig.from_dict(data, source="test")


def _write_yaml(path: Path, data) -> Path:
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


# ─── Configuration Tests ────────────────────────────────────────────────────

def test_config_from_dict():
    config = _config()
    assert config.name == "unit"
    assert len(config.checks) == 4
    assert config.output.jsonl


def test_config_needs_checks():
    with pytest.raises(ConfigError):
        _config(checks=[])


def test_config_rejects_unknown_family():
    with pytest.raises(ConfigError) as info:
        _config(models=[{"name": "x", "family": "cauchy"}], checks=[{"check": "epi"}])
    assert info.value.location.startswith("test")


def test_config_rejects_unknown_model_reference():
    with pytest.raises(ConfigError):
        _config(checks=[{"check": "entropy_sandwich", "models": ["missing"]}])


def test_config_rejects_forward_reference():
    models = [
        {"name": "a", "family": "convolve", "of": [{"ref": "b"}, {"ref": "b"}]},
        {"name": "b", "family": "gaussian", "params": {"n": 1}},
    ]
    with pytest.raises(ConfigError):
        _config(models=models, checks=[{"check": "epi", "models": ["a", "b"]}])


def test_config_from_yaml_file():
    config = ExperimentConfig.from_file(EXPERIMENTS / "sandwich.yaml")
    assert config.name == "sandwich"
    assert [m.name for m in config.models] == ["cube_4", "exp_4", "gaussian_4"]


@pytest.mark.parametrize("name", ["sandwich.yaml", "concentration.yaml", "reverse_epi.yaml", "kappa.yaml"])
def test_shipped_experiments_build(name):
    config = ExperimentConfig.from_file(EXPERIMENTS / name)
    assert ExperimentEngine(config).validate().models


def test_config_invalid_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("checks: [unclosed", encoding="utf-8")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_file(tmp_path / "absent.yaml")
    assert "absent.yaml" in info.value.location


def test_config_from_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"checks": [{"check": "kappa_convolution"}]}', encoding="utf-8")
    assert ExperimentConfig.from_file(path).checks[0].check == "kappa_convolution"


# ─── Builder Tests ──────────────────────────────────────────────────────────

def test_builder_families_and_references():
    config = _config(
        models=[
            {"name": "g", "family": "gaussian", "params": {"n": 2, "covariance": 2.0}},
            {"name": "shifted", "family": "affine", "of": [{"ref": "g"}], "map": {"scale": 2.0, "shift": [1.0, 0.0]}},
            {"name": "sum", "family": "convolve", "of": [{"ref": "g"}, {"ref": "shifted"}]},
        ],
        bodies=[{"name": "disc", "variant": "ball", "params": {"n": 2, "radius": 2.0}}],
        checks=[{"check": "epi", "models": ["g", "shifted"]}],
    )
    built = build_models(config)
    assert built.models["shifted"].covariance[0, 0] == pytest.approx(8.0)
    assert built.models["shifted"].mean[0] == pytest.approx(1.0)
    assert built.models["sum"].analytic_entropy is not None
    assert isinstance(built.bodies["disc"], Ball)


def test_builder_bad_parameters_are_config_errors():
    config = _config(
        models=[{"name": "bad", "family": "exponential", "params": {"rate": -1.0}}],
        checks=[{"check": "entropy_sandwich", "models": ["bad"]}],
    )
    with pytest.raises(ConfigError) as info:
        build_models(config)
    assert info.value.location == "models[0]"


def test_builder_missing_body_parameter():
    config = _config(bodies=[{"name": "b", "variant": "box", "params": {"lower": [0.0]}}])
    with pytest.raises(ConfigError):
        build_models(config)


# ─── Engine Tests ───────────────────────────────────────────────────────────

@pytest.mark.asyncio
async def test_engine_execute():
    result = await ExperimentEngine(_config()).execute()
    assert [task.status for task in result.tasks] == [TaskStatus.COMPLETED] * 4
    assert len(result.reports) == 2 + 2 + 1 + 1
    assert len(result.profiles) == 1
    assert result.all_satisfied
    assert result.reports[0].params["seed"] == 5


def test_engine_results_do_not_depend_on_jobs():
    config = _config()
    serial = ExperimentEngine(config, jobs=1).run_sync()
    parallel = ExperimentEngine(config, jobs=4).run_sync()
    assert [r.model_dump_json() for r in serial.reports] == [r.model_dump_json() for r in parallel.reports]


def test_engine_seed_changes_numbers():
    first = run_experiment(_config())
    second = run_experiment(_config(seed=6))
    epi_first = [r for r in first.reports if r.name == "epi"][0]
    epi_second = [r for r in second.reports if r.name == "epi"][0]
    assert epi_first.rhs != epi_second.rhs


def test_engine_failed_check_becomes_report():
    config = _config(checks=[{"check": "kappa_convolution", "params": {"k1": -0.5, "k2": 0.2, "expected": 0.0}}])
    result = run_experiment(config)
    assert len(result.failed) == 1
    report = result.reports[0]
    assert not report.satisfied
    assert report.error.startswith("InvalidParameterError")
    assert not result.all_satisfied


def test_engine_unknown_checker():
    config = _config(checks=[{"check": "no_such_check"}])
    with pytest.raises(ConfigError) as info:
        ExperimentEngine(config).validate()
    assert info.value.location == "checks[0].check"


def test_engine_runner_config_error_propagates():
    config = _config(checks=[{"check": "epi", "models": ["cube_2"]}])
    with pytest.raises(ConfigError):
        run_experiment(config)


# ─── Writer Tests ───────────────────────────────────────────────────────────

def test_write_results(tmp_path):
    result = run_experiment(_config())
    written = write_results(result.reports, result.profiles, tmp_path / "out")
    names = sorted(p.name for p in written)
    assert names == ["profile_000_exp_2_n2.svg", "reports.jsonl", "summary.csv"]

    restored = read_jsonl(tmp_path / "out" / "reports.jsonl")
    assert [r.name for r in restored] == [r.name for r in result.reports]
    assert all(r.satisfied == r.recompute_satisfied() for r in restored)

    with (tmp_path / "out" / "summary.csv").open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == SUMMARY_COLUMNS
    cube_row = rows[1]
    assert cube_row[0] == "entropy_sandwich"
    assert cube_row[1] == "2"
    assert cube_row[4] == "1.0"
    assert cube_row[6] == "true"
    assert cube_row[8] == "cube_2"


def test_write_results_is_deterministic(tmp_path):
    for out in ("a", "b"):
        result = run_experiment(_config())
        write_results(result.reports, result.profiles, tmp_path / out, svg=False)
    first = (tmp_path / "a" / "reports.jsonl").read_bytes()
    assert first == (tmp_path / "b" / "reports.jsonl").read_bytes()


def test_failed_report_has_blank_csv_numbers(tmp_path):
    config = _config(checks=[{"check": "kappa_convolution", "params": {"k1": -0.5, "k2": 0.2, "expected": 0.0}}])
    result = run_experiment(config)
    write_results(result.reports, [], tmp_path, svg=False)
    rows = list(csv.reader((tmp_path / "summary.csv").read_text(encoding="utf-8").splitlines()))
    assert rows[1][2] == "" and rows[1][4] == ""
    assert rows[1][6] == "false"


def test_profile_svg():
    result = run_experiment(_config())
    svg = render_profile_svg(result.profiles[0])
    assert svg.startswith("<svg")
    assert "polyline" in svg
    assert "exp_2" in svg


# ─── Suite Tests ────────────────────────────────────────────────────────────

def test_list_suites():
    lines = list_suites()
    assert len(lines) == len(SUITES) == 10
    assert "concentration: Theorem 2" in lines
    assert "reverse-epi: Theorem 1" in lines


@pytest.mark.parametrize("name", sorted(SUITES))
def test_quick_suites_validate(name):
    config = get_suite(name).config(seed=42, quick=True)
    assert config.seed == 42
    ExperimentEngine(config).validate()


def test_unknown_suite():
    with pytest.raises(ConfigError) as info:
        suite_configs(["nope"], seed=1)
    assert info.value.location == "--suite"


def test_estimators_suite_covers_cube_sums():
    config = get_suite("estimators").config(seed=1)
    agreement = next(c for c in config.checks if c.check == "estimator_agreement")
    assert {f"cube_{n}*cube_{n}" for n in (1, 2, 4, 8)} <= set(agreement.models)


def test_kappa_suite_checks_cube_sums():
    config = get_suite("kappa").config(seed=1, quick=True)
    lower = [c for c in config.checks if c.check == "kappa_entropy_lower"]
    assert lower[-1].models == ["cube_1*cube_1", "cube_2*cube_2", "cube_4*cube_4"]


def test_interval_checks_pin_known_values():
    epi = get_suite("epi").config(seed=1, quick=True)
    interval = next(c for c in epi.checks if c.label == "epi_interval_knn")
    assert interval.params["expected_ratio"] == pytest.approx(e / 2)
    reverse_bm = get_suite("reverse-bm").config(seed=1, quick=True)
    pinned = [c for c in reverse_bm.checks if "expected_margin" in c.params]
    assert [c.bodies for c in pinned] == [["cube_1", "cube_1"]]
    assert pinned[0].params["expected_margin"] == 0.5


def test_kappa_suite_runs():
    result = run_experiment(get_suite("kappa").config(seed=3, quick=True))
    assert result.all_satisfied


# ─── CLI Tests ──────────────────────────────────────────────────────────────

def test_cli_list_suites(capsys):
    assert main(["list-suites"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "concentration: Theorem 2" in out
    assert "reverse-bm: Remark 1" in out


def test_cli_list_checks(capsys):
    assert main(["list-checks"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "reverse_epi: reverse EPI after normalisation and det-1 positioning" in out
    assert "estimator_agreement: " in out


def test_cli_run(tmp_path):
    out = tmp_path / "results"
    code = main(["run", str(EXPERIMENTS / "sandwich.yaml"), "--out", str(out), "--seed", "7", "--no-svg"])
    assert code == EXIT_OK
    restored = read_jsonl(out / "reports.jsonl")
    assert restored and all(r.satisfied for r in restored)
    assert {r.params["seed"] for r in restored} == {7}


def test_cli_unknown_checker_exits_with_config_code(tmp_path):
    path = _write_yaml(tmp_path / "bad.yaml", {"checks": [{"check": "no_such_check"}]})
    assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_CONFIG


def test_cli_unknown_suite(tmp_path):
    assert main(["accept", "--suite", "nope", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cli_accept_quick_suite(tmp_path):
    code = main(["accept", "--suite", "kappa", "--quick", "--out", str(tmp_path), "--no-svg"])
    assert code == EXIT_OK
    assert (tmp_path / "summary.csv").exists()
