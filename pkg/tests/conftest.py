import json

import numpy as np
import pytest
from click.testing import CliRunner

from app import app
from returnlab.models.measure import BernoulliProduct, MarkovChain, fair_coin
from returnlab.models.systems import SftSystem


@pytest.fixture
def coin():
    return fair_coin()


@pytest.fixture
def biased_coin():
    return BernoulliProduct(np.array([0.3, 0.7]))


@pytest.fixture
def two_state_chain():
    return MarkovChain(np.array([[0.9, 0.1], [0.4, 0.6]]))


@pytest.fixture
def golden_mean():
    """The SFT forbidding "11", sampled uniformly over allowed moves."""
    return SftSystem(
        transition=np.array([[1, 1], [1, 0]]),
        sampling_chain=np.array([[0.5, 0.5], [1.0, 0.0]]),
    )


@pytest.fixture
def run_experiment(tmp_path):
    """
    Write a config document and run its experiment through the CLI.

    Returns (result, out_dir); extra CLI flags are passed through.
    """
    runner = CliRunner()

    def run(config, *flags):
        config_path = tmp_path / f"{config['experiment']}.json"
        config_path.write_text(json.dumps(config), encoding="utf-8")
        out_dir = tmp_path / "out"
        result = runner.invoke(
            app,
            [config["experiment"], "--config", str(config_path), "--out",
             str(out_dir), *flags],
        )
        return result, out_dir

    return run


@pytest.fixture
def read_summary():
    def read(out_dir, name):
        path = out_dir / f"{name}.summary.json"
        return json.loads(path.read_text(encoding="utf-8"))

    return read
