import numpy as np
import pytest

from returnlab.dynamics import (
    DoublingSource,
    GwSource,
    SftSource,
    check_ladder,
    classify_gw,
    doubling_stream,
    gw_itinerary,
    gw_orbit,
    gw_step,
    markov_path,
    sft_stream,
)
from returnlab.exceptions import InvalidInputError, SimulationError
from returnlab.tower import gw_ladder
from returnlab.utils.rng_utils import make_rng


def test_doubling_stream_is_deterministic():
    first = doubling_stream(1000, 42)
    second = doubling_stream(1000, 42)

    assert np.array_equal(first.symbols, second.symbols)
    assert first.length == 1000
    assert set(np.unique(first.symbols)) <= {0, 1}


def test_doubling_stream_depends_on_seed():
    assert not np.array_equal(
        doubling_stream(256, 1).symbols, doubling_stream(256, 2).symbols
    )


def test_doubling_stream_is_fair():
    symbols = doubling_stream(10**6, 5).symbols
    # 4 standard errors of a fair coin frequency
    assert abs(symbols.mean() - 0.5) < 4 * 0.5 / 1000


@pytest.mark.parametrize("length", [0, -3, 2.5])
def test_stream_length_must_be_positive_integer(length):
    with pytest.raises(InvalidInputError):
        doubling_stream(length, 0)


def test_sft_stream_never_uses_forbidden_transition(golden_mean):
    symbols = sft_stream(golden_mean, 10**5, 3).symbols

    assert not np.any((symbols[:-1] == 1) & (symbols[1:] == 1))
    assert golden_mean.is_admissible(symbols)


def test_sft_stream_frequencies_match_stationary(golden_mean):
    symbols = sft_stream(golden_mean, 10**6, 9).symbols

    # pi = (2/3, 1/3) for this chain
    assert golden_mean.stationary == pytest.approx([2 / 3, 1 / 3], abs=1e-12)
    assert symbols.mean() == pytest.approx(1 / 3, abs=0.005)


def test_markov_path_starts_from_given_symbol(two_state_chain):
    path = markov_path(
        two_state_chain.matrix, two_state_chain.stationary, 50,
        make_rng(0), first=1,
    )

    assert path[0] == 1
    assert path.size == 50


def test_sft_source_rows_are_admissible(golden_mean):
    source = SftSource(golden_mean)
    rows = source.fresh_rows(500, 40, make_rng(4))

    assert rows.shape == (500, 40)
    assert not np.any((rows[:, :-1] == 1) & (rows[:, 1:] == 1))


def test_doubling_source_rows():
    rows = DoublingSource().continue_rows(np.zeros(3), 7, make_rng(1))
    assert rows.shape == (3, 7)


def test_gw_step_branches():
    assert gw_step(0.75, 0.5) == 0.5
    assert gw_step(0.25, 0.5) == pytest.approx(0.25 + 2**0.5 * 0.25**1.5)
    with pytest.raises(InvalidInputError):
        gw_step(1.5, 0.5)


def test_ladder_residual_below_tolerance():
    for alpha in (0.5, 0.75):
        system = gw_ladder(alpha, 2000)
        assert check_ladder(system) <= 1e-12


def test_check_ladder_rejects_wrong_ladder():
    system = gw_ladder(0.5, 10)
    system.boundaries[5] *= 1.01
    with pytest.raises(InvalidInputError):
        check_ladder(system)


def test_classify_gw_partition_indices():
    system = gw_ladder(0.5, 50)
    a = system.boundaries
    points = [0.75, 0.5 * (a[0] + a[1]), 0.5 * (a[2] + a[3]), a[1]]

    assert classify_gw(points, system).tolist() == [0, 1, 3, 2]


def test_classify_gw_below_deepest_boundary():
    system = gw_ladder(0.5, 20)
    with pytest.raises(SimulationError):
        classify_gw([0.5 * system.depth_limit], system)


def test_gw_orbit_detects_collapse():
    with pytest.raises(SimulationError):
        gw_orbit(1.0, 0.5, 10)
    with pytest.raises(InvalidInputError):
        gw_orbit(0.0, 0.5, 10)


def test_gw_itinerary_follows_orbit():
    system = gw_ladder(0.25, 5000)
    stream = gw_itinerary(0.9, 0.25, 200, system)

    # 0.9 -> 0.8 -> 0.6 -> 0.2 -> ... the first three steps stay in A_0
    assert stream.symbols[:3].tolist() == [0, 0, 0]
    assert stream.symbols[3] > 0


def test_gw_itinerary_needs_matching_ladder():
    system = gw_ladder(0.25, 100)
    with pytest.raises(InvalidInputError):
        gw_itinerary(0.9, 0.3, 10, system)


def test_gw_source_has_only_stream_mode():
    source = GwSource(gw_ladder(0.25, 5000), burn_in=10)
    stream = source.stream(1000, 8)

    assert stream.length == 1000
    assert np.array_equal(stream.symbols, source.stream(1000, 8).symbols)
    with pytest.raises(InvalidInputError):
        source.fresh_rows(10, 10, make_rng(0))


def test_gw_itinerary_steps_down_the_ladder():
    symbols = GwSource(gw_ladder(0.25, 5000)).stream(10**6, 13).symbols

    deep = symbols[:-1] >= 1
    assert np.any(deep)
    # T maps A_i onto A_{i-1}
    assert np.array_equal(symbols[1:][deep], symbols[:-1][deep] - 1)
