import json

import pytest
from click.testing import CliRunner

from app import app


def _error_payload(output):
    """The JSON error document printed on stderr."""
    line = [text for text in output.splitlines() if text.startswith("{")][-1]
    return json.loads(line)


def test_experiments_are_listed():
    result = CliRunner().invoke(app, ["experiments"])

    assert result.exit_code == 0
    names = result.output.split()
    assert {"return_law", "count_law", "periodic_counterexample", "gw_tail",
            "tower_occupancy", "ulam_decay", "bound_table", "lemma_check",
            "stein_selftest"} <= set(names)


def test_schema_command():
    result = CliRunner().invoke(app, ["schema", "ulam_decay"])

    assert result.exit_code == 0
    schema = json.loads(result.output)
    assert "map_id" in schema["properties"]
    assert schema["example"]["experiment"] == "ulam_decay"


def test_schema_of_unknown_experiment():
    result = CliRunner().invoke(app, ["schema", "bogus"])

    assert result.exit_code == 1
    payload = _error_payload(result.output)
    assert payload["type_"] == "not_found"
    assert "stein_selftest" in payload["ctx"]["available"]


def test_stein_selftest_passes_and_is_reproducible(
    run_experiment, read_summary
):
    config = {"experiment": "stein_selftest", "events": 10, "seeds": [1]}
    result, out_dir = run_experiment(config, "--check")
    assert result.exit_code == 0, result.output

    summary_path = out_dir / "stein_selftest.summary.json"
    samples_path = out_dir / "stein_selftest.samples.csv"
    first = (summary_path.read_bytes(), samples_path.read_bytes())

    summary = read_summary(out_dir, "stein_selftest")
    assert summary["passed"]
    assert summary["rng"] == "numpy.random.Philox"
    assert summary["config"]["events"] == 10

    run_experiment(config, "--check")
    assert (summary_path.read_bytes(), samples_path.read_bytes()) == first


def test_missing_seeds_rejected(run_experiment):
    result, _ = run_experiment({"experiment": "stein_selftest"})

    assert result.exit_code == 1
    payload = _error_payload(result.output)
    assert payload["type_"] == "validation_error"
    assert payload["loc"] == ["seeds"]


def test_unknown_field_rejected(run_experiment):
    result, _ = run_experiment(
        {"experiment": "stein_selftest", "seeds": [1], "bogus": 3}
    )
    assert result.exit_code == 1
    assert _error_payload(result.output)["loc"] == ["bogus"]


def test_missing_config_file(tmp_path):
    result = CliRunner().invoke(
        app, ["stein_selftest", "--config", str(tmp_path / "none.json")]
    )

    assert result.exit_code == 1
    assert _error_payload(result.output)["type_"] == "not_found"


def test_malformed_config_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"seeds\": [1", encoding="utf-8")
    result = CliRunner().invoke(app, ["stein_selftest", "--config", str(path)])

    assert result.exit_code == 1
    assert _error_payload(result.output)["loc"] == ["config"]


def test_missed_threshold_exits_with_two(run_experiment, read_summary):
    config = {
        "experiment": "periodic_counterexample",
        "samples": 2000,
        "min_tv": 0.99,
        "seeds": [11],
    }
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 2
    payload = _error_payload(result.output)
    assert payload["type_"] == "acceptance_error"
    # Artifacts are written before the thresholds are enforced
    assert not read_summary(out_dir, "periodic_counterexample")["passed"]

    result, _ = run_experiment(config)
    assert result.exit_code == 0


def test_ulam_decay_doubling(run_experiment, read_summary):
    config = {"experiment": "ulam_decay", "map_id": "doubling",
              "bins": 1024, "k_max": 20, "seeds": [0]}
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    summary = read_summary(out_dir, "ulam_decay")["results"]
    assert summary["invariant_uniformity"] <= 1e-8
    assert summary["log_linear_slope"] == pytest.approx(-0.6931, abs=1e-3)


def test_bound_table(run_experiment, read_summary):
    config = {
        "experiment": "bound_table",
        "n_values": [10, 12, 14],
        "cases": [],
        "seeds": [0],
    }
    result, out_dir = run_experiment(config)

    assert result.exit_code == 0, result.output
    results = read_summary(out_dir, "bound_table")["results"]
    assert [row["input"]["n"] for row in results["table"]] == [10, 12, 14]
    assert results["rate"]["family"] == "exponential"
    lines = (out_dir / "bound_table.samples.csv").read_text(
        encoding="utf-8"
    ).splitlines()
    assert len([line for line in lines if not line.startswith("#")]) == 4


def test_lemma_check(run_experiment, read_summary):
    config = {
        "experiment": "lemma_check",
        "max_n": 3,
        "k_max": 4,
        "t_max": 4,
        "m_max": 4,
        "seeds": [0],
    }
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    results = read_summary(out_dir, "lemma_check")["results"]
    assert results["violations"] == {
        "cylinder": 0, "recurrence": 0, "shifted_return": 0
    }
    assert results["words_checked"] == 14


def test_lemma_check_needs_exact_measure(run_experiment):
    config = {
        "experiment": "lemma_check",
        "system": {"kind": "gw", "alpha": 0.25, "i_max": 1000},
        "max_n": 2,
        "seeds": [0],
    }
    result, _ = run_experiment(config)
    assert result.exit_code == 1


def test_tower_occupancy_two_branches(run_experiment, read_summary):
    config = {
        "experiment": "tower_occupancy",
        "tower": {"branches": [{"weight": 0.5, "return_time": 1},
                               {"weight": 0.5, "return_time": 2}]},
        "length": 10**6,
        "seeds": [3],
    }
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    run = read_summary(out_dir, "tower_occupancy")["results"]["runs"][0]
    assert run["expected"] == pytest.approx([2 / 3, 1 / 3])


def test_tower_needs_exactly_one_source(run_experiment):
    config = {"experiment": "tower_occupancy", "tower": {}, "seeds": [3]}
    result, _ = run_experiment(config)
    assert result.exit_code == 1


def test_seed_override(run_experiment, read_summary):
    config = {
        "experiment": "return_law",
        "n": 6,
        "k_values": [1],
        "cylinders": 2,
        "samples": 300,
        "seeds": [1, 2],
    }
    result, out_dir = run_experiment(config, "--seed-override", "99")

    assert result.exit_code == 0, result.output
    summary = read_summary(out_dir, "return_law")
    assert summary["seeds"] == [99]
    assert summary["config"]["seeds"] == [99]
    assert len(summary["results"]["cylinders"]) == 2


@pytest.mark.slow
def test_gw_tail(run_experiment, read_summary):
    config = {"experiment": "gw_tail", "alphas": [0.5], "seeds": [0]}
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    report = read_summary(out_dir, "gw_tail")["results"]["alphas"][0]
    assert report["expected_slope"] == -2.0


def test_count_law_passes_near_poisson(run_experiment, read_summary):
    config = {
        "experiment": "count_law",
        "words": ["0000000001"],
        "samples": 5000,
        "max_tv": 0.05,
        "seeds": [7],
    }
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    summary = read_summary(out_dir, "count_law")
    assert summary["passed"]
    report = summary["results"]["words"][0]
    assert report["m"] == 1024
    assert report["t"] == 1.0
    assert report["r_A"] == 10
    assert report["tv_poisson_t"] < 0.05
    assert report["mean"] == pytest.approx(1.0, abs=0.06)


@pytest.mark.slow
def test_periodic_counterexample_default_passes(run_experiment, read_summary):
    config = {"experiment": "periodic_counterexample", "seeds": [11]}
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    summary = read_summary(out_dir, "periodic_counterexample")
    assert summary["passed"]
    periodic = summary["results"]["periodic"]
    control = summary["results"]["control"]
    assert periodic["tv_matched_mean"] >= 0.05
    assert control["tv_matched_mean"] < periodic["tv_matched_mean"]
    # Runs of visits inflate the variance of the periodic count
    assert periodic["dispersion"] > 1.5


@pytest.mark.slow
def test_lemma_check_default_is_exhaustive(run_experiment, read_summary):
    config = {"experiment": "lemma_check", "seeds": [0]}
    result, out_dir = run_experiment(config, "--check")

    assert result.exit_code == 0, result.output
    summary = read_summary(out_dir, "lemma_check")
    assert summary["passed"]
    assert summary["config"]["max_n"] == 6
    # 2 + 4 + ... + 64 binary words
    assert summary["results"]["words_checked"] == 126
    assert summary["results"]["violations"] == {
        "cylinder": 0, "recurrence": 0, "shifted_return": 0
    }
