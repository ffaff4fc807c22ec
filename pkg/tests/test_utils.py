import hashlib

import numpy as np
import pytest

from returnlab.exceptions import InvalidInputError
from returnlab.models.report import Check, ExperimentResult
from returnlab.utils.markov_utils import (
    check_stochastic,
    stationary_distribution,
)
from returnlab.utils.report_utils import (
    atomic_write,
    canonical_json,
    config_hash,
    csv_text,
    format_float,
)
from returnlab.utils.rng_utils import derive_seed, make_rng
from returnlab.utils.stats_utils import (
    aggregate_ratio_deviation,
    log_linear_fit,
    ratio_deviation,
)


def test_make_rng_is_reproducible():
    assert np.array_equal(make_rng(5).random(4), make_rng(5).random(4))
    assert make_rng(2**64 - 1).integers(10) >= 0


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True])
def test_make_rng_rejects_bad_seeds(seed):
    with pytest.raises(InvalidInputError):
        make_rng(seed)


def test_derive_seed():
    assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
    assert 0 <= derive_seed(7, 0) < 2**64


def test_format_float():
    assert format_float(3) == "3"
    assert format_float(np.int64(4)) == "4"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(np.True_) == "true"


def test_canonical_json_and_hash():
    text = canonical_json({"b": np.float64(1.5), "a": [np.int64(1)]})
    assert text == '{\n  "a": [\n    1\n  ],\n  "b": 1.5\n}\n'

    payload = canonical_json({"x": 1}).encode("utf-8")
    expected = hashlib.sha1(
        b"blob " + str(len(payload)).encode() + b"\0" + payload
    ).hexdigest()
    assert config_hash({"x": 1}) == expected


def test_csv_text():
    text = csv_text(["k", "p"], [[1, 0.5], ["x", 2]], {"seed": 3, "a": "b"})
    assert text == "# a=b\n# seed=3\nk,p\n1,0.5\nx,2\n"


def test_atomic_write_leaves_no_temporaries(tmp_path):
    path = tmp_path / "nested" / "out.txt"
    atomic_write(path, "first\n")
    atomic_write(path, "second\n")

    assert path.read_text(encoding="utf-8") == "second\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.txt"]


def test_ratio_deviation_dominates_aggregate():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = rng.uniform(0.1, 2.0, size=5)
        b = rng.uniform(0.1, 2.0, size=5)
        assert aggregate_ratio_deviation(a, b) <= ratio_deviation(a, b) + 1e-15
    with pytest.raises(InvalidInputError):
        ratio_deviation([1.0, 0.0], [1.0, 1.0])


def test_log_linear_fit():
    ks = np.arange(1, 6)
    slope, intercept, r_squared = log_linear_fit(ks, 3.0 * 0.5**ks)

    assert slope == pytest.approx(np.log(0.5))
    assert intercept == pytest.approx(np.log(3.0))
    assert r_squared == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        log_linear_fit([1, 2], [1.0, 0.0])


def test_check_stochastic():
    check_stochastic(np.array([[0.5, 0.5], [1.0, 0.0]]))
    with pytest.raises(InvalidInputError):
        check_stochastic(np.array([[0.5, 0.6], [1.0, 0.0]]))


def test_checks_and_results():
    low = Check("a", 0.5, lower=1.0)
    inside = Check("b", 0.5, lower=0.0, upper=1.0)
    nan = Check("c", float("nan"), upper=1.0)

    assert not low.passed and inside.passed and not nan.passed
    result = ExperimentResult(["x"], [], {}, [low, inside])
    assert not result.passed
    assert result.failed_checks() == [low]
    assert ExperimentResult(["x"], [], {}).passed


def test_stationary_distribution():
    pi = stationary_distribution(np.array([[0.9, 0.1], [0.4, 0.6]]))
    assert pi == pytest.approx([0.8, 0.2], abs=1e-15)

    eps = 1e-15
    pi = stationary_distribution(np.array([[1 - eps, eps], [eps, 1 - eps]]))
    assert pi == pytest.approx([0.5, 0.5], abs=1e-15)


@pytest.mark.parametrize(
    "matrix", [[[1.0, 0.0], [0.5, 0.5]], [[0.5, 0.5], [0.0, 1.0]]]
)
def test_stationary_distribution_rejects_reducible_chain(matrix):
    with pytest.raises(InvalidInputError):
        stationary_distribution(np.array(matrix))
