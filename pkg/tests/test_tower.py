import numpy as np
import pytest

from returnlab.exceptions import InvalidInputError
from returnlab.models.tower import TowerSpec
from returnlab.tower import (
    branch_lag_correlation,
    branch_tower,
    gw_tower,
    level_occupancy,
    parse_map_id,
    poisson_regime,
    ramp_density,
    tail_slope,
    tower_invariant,
    tower_simulate,
    ulam_build,
    ulam_decay,
    ulam_fit_decay,
    ulam_invariant,
)

TWO_BRANCHES = [{"weight": 1, "return_time": 1},
                {"weight": 1, "return_time": 2}]


def test_two_branch_invariant():
    spec = branch_tower(TWO_BRANCHES)

    assert spec.mean_return == 1.5
    assert tower_invariant(spec) == pytest.approx([2 / 3, 1 / 3])


def test_non_integrable_tower_rejected():
    spec = TowerSpec(np.array([0.5, 0.5]), np.array([1, 2]),
                     tail_exponent=1.0)
    with pytest.raises(InvalidInputError):
        tower_invariant(spec)


def test_branch_tower_validation():
    with pytest.raises(InvalidInputError):
        branch_tower([])
    with pytest.raises(InvalidInputError):
        branch_tower([{"weight": 1, "return_time": 0}])


@pytest.mark.slow
def test_gw_tail_slope():
    spec = gw_tower(0.25, i_max=20000)
    slope, r_squared = tail_slope(spec, 1000, 10000)

    assert slope == pytest.approx(-4.0, rel=0.1)
    assert r_squared > 0.99
    assert spec.truncation_mass < 0.01


def test_poisson_regime():
    assert poisson_regime(0.25)
    assert not poisson_regime(0.5)


def test_tower_simulate_is_deterministic():
    spec = branch_tower(TWO_BRANCHES)
    first = tower_simulate(spec, 1000, 3)
    second = tower_simulate(spec, 1000, 3)

    assert np.array_equal(first.levels, second.levels)
    assert first.length == 1000
    # Levels climb by one until the top of the branch
    climbs = first.levels[1:] == first.levels[:-1] + 1
    assert np.all(climbs | (first.levels[1:] == 0))


def test_level_occupancy_matches_invariant():
    spec = branch_tower(TWO_BRANCHES)
    stream = tower_simulate(spec, 10**6, 7)
    report = level_occupancy(stream, spec)

    assert report["passed"]
    assert report["levels"] == [0, 1]
    assert report["aggregate_deviation"] <= report["max_relative_error"]
    assert abs(branch_lag_correlation(stream)) < 0.01


def test_parse_map_id():
    assert parse_map_id("doubling") == ("doubling", None)
    assert parse_map_id("gw(0.25)") == ("gw", 0.25)
    for bad in ("tent", "gw(1.5)"):
        with pytest.raises(InvalidInputError):
            parse_map_id(bad)


def test_ulam_doubling_decay():
    op = ulam_build("doubling", 1024)

    assert op.row_sums() == pytest.approx(np.ones(1024), abs=1e-12)
    h = ulam_invariant(op)
    assert h == pytest.approx(np.full(1024, 1 / 1024), abs=1e-8)

    decay = ulam_decay(op, k_max=12, h=h)
    ks = np.arange(9)
    assert decay[:9] == pytest.approx(2.0**-ks / 2, abs=1e-12)

    slope, r_squared, used = ulam_fit_decay(decay, 2, 8)
    assert slope == pytest.approx(-np.log(2.0), abs=1e-6)
    assert r_squared == pytest.approx(1.0, abs=1e-9)
    assert used == 7


def test_ramp_density_sums_to_one():
    assert ramp_density(64).sum() == pytest.approx(1.0)


def test_ulam_decay_validates_initial():
    op = ulam_build("doubling", 16)
    with pytest.raises(InvalidInputError):
        ulam_decay(op, initial=np.ones(16))
    with pytest.raises(InvalidInputError):
        ulam_decay(op, initial=np.ones(8) / 8)


def test_ulam_gw_rows_are_stochastic():
    op = ulam_build("gw(0.5)", 256)
    assert op.map_id == "gw(0.5)"
    assert op.row_sums() == pytest.approx(np.ones(256), abs=1e-8)


def test_ulam_decay_starts_from_ramp():
    op = ulam_build("doubling", 16)
    default = ulam_decay(op, k_max=6)

    assert np.array_equal(default, ulam_decay(op, ramp_density(16), k_max=6))
    # 2^4 dyadic bins: uniform after 4 steps
    assert default[:4] == pytest.approx([0.5, 0.25, 0.125, 0.0625], abs=1e-12)
    assert default[4:] == pytest.approx([0.0, 0.0], abs=1e-12)
