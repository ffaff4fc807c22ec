import numpy as np
import pytest

from returnlab.counting import (
    count_visits,
    default_t_grid,
    first_hit_time,
    gap_split,
    harvest_count_law,
    harvest_return_law,
    hitting_identity,
    kac_statistic,
    ks_distance,
    neighbor_frequencies,
    return_times,
    sup_deviation,
    survival_curve,
    tv_distance,
    write_law_csv,
)
from returnlab.dynamics import DoublingSource, SftSource
from returnlab.exceptions import InvalidInputError
from returnlab.models.visit import COUNT_LAW, EmpiricalLaw, VisitRecord
from returnlab.models.word import Word
from returnlab.utils.rng_utils import make_rng


def test_count_visits_counts_overlapping_hits():
    stream = np.array([0, 1, 0, 1, 0, 1])
    record = count_visits(stream, "01", 4)

    assert record.hit_times.tolist() == [2, 4]
    assert record.w_m == 2
    assert count_visits(np.zeros(6, dtype=int), "00", 4).w_m == 4


def test_count_visits_needs_long_enough_stream():
    with pytest.raises(InvalidInputError):
        count_visits(np.zeros(4, dtype=int), "00", 4)


def test_return_times():
    stream = np.array([0, 1, 1, 0, 1, 0, 1])

    returns = return_times(stream, "01", 5, start_in_A=True)
    assert returns.times.tolist() == [3, 5]
    assert returns.truncated

    hits = return_times(stream, "01", 1)
    assert hits.times.tolist() == [3]
    assert not hits.truncated


def test_gap_split():
    record = VisitRecord(Word((0,)), 10, np.array([2, 5, 8, 9]))

    assert gap_split(record, 5, 2) == (1, 0, 0, 2)
    assert sum(gap_split(record, 3, 1)) == 4
    with pytest.raises(InvalidInputError):
        gap_split(record, 11, 1)


def test_neighbor_frequencies():
    record = VisitRecord(Word((0,)), 12, np.array([3, 4, 10]))
    assert neighbor_frequencies(record, 2) == (1 / 8, 1 / 8)


def test_survival_curve_and_sup_deviation():
    law = EmpiricalLaw(np.array([0.5, 1.5, 2.5]))
    assert survival_curve(law, [1.0, 2.0]).tolist() == [2 / 3, 1 / 3]
    assert sup_deviation(law, [0.0], k=1) == 0.0
    assert default_t_grid().size == 30


def test_tv_distance_to_poisson():
    counts = np.random.default_rng(0).poisson(1.0, size=20000)
    law = EmpiricalLaw(counts, COUNT_LAW)

    assert tv_distance(law, 1.0) < 0.03
    assert tv_distance(law) < 0.03
    assert tv_distance(EmpiricalLaw(np.zeros(10), COUNT_LAW), 1.0) == (
        pytest.approx(1 - np.exp(-1.0))
    )


def test_ks_distance_against_itself_is_zero():
    law = EmpiricalLaw(np.random.default_rng(1).exponential(size=500))
    assert ks_distance(law, law) == 0.0
    assert ks_distance(law) < 0.1


def test_kac_statistic_on_raw_times():
    assert kac_statistic(np.array([2, 4, 6]), mu_A=0.25) == 1.0
    with pytest.raises(InvalidInputError):
        kac_statistic(np.array([2, 4]))


def test_first_return_law_is_exponential():
    law = harvest_return_law(DoublingSource(), "0000000001", 1, 5000, 17)

    assert law.size == 5000
    assert law.metadata["r_A"] == 10
    # Kac: mean rescaled return is 1, standard error 1/sqrt(5000)
    assert abs(kac_statistic(law) - 1.0) < 0.06
    assert sup_deviation(law, k=1) < 0.06


def test_harvest_is_deterministic():
    first = harvest_return_law(DoublingSource(), "0110", 2, 300, 5)
    second = harvest_return_law(DoublingSource(), "0110", 2, 300, 5)
    assert np.array_equal(first.samples, second.samples)


def test_second_return_law_matches_erlang():
    law = harvest_return_law(
        DoublingSource(), "0000000001", 2, 4000, 21, mode="stream"
    )
    assert law.size == 4000
    assert sup_deviation(law, k=2) < 0.06


def test_count_law_mean(golden_mean):
    source = DoublingSource()
    blocks = harvest_count_law(source, "01", 8, 4000, 2)
    stream = harvest_count_law(source, "01", 8, 4000, 2, mode="stream")

    assert blocks.metadata["t"] == 2.0
    assert blocks.mean() == pytest.approx(2.0, abs=0.1)
    assert stream.mean() == pytest.approx(2.0, abs=0.1)

    sft = harvest_count_law(SftSource(golden_mean), "10", 30, 2000, 4)
    # mu("10") = pi(1) P(1, 0) = 1/3
    assert sft.mean() == pytest.approx(10.0, abs=0.3)


def test_hitting_identity_is_exact():
    survived, empty = hitting_identity(DoublingSource(), "0101", 20, 3000, 8)
    assert survived == empty
    assert 0.0 < survived < 1.0


def test_hitting_identity_sees_late_first_hits():
    rows = DoublingSource().fresh_rows(20000, 2 * 3 + 2, make_rng(5))
    first = first_hit_time((rows[:, 1:7] == 0) & (rows[:, 2:8] == 1))
    # First hits after the window are part of the survival event
    assert np.any(first > 3)

    survived, empty = hitting_identity(DoublingSource(), "01", 3, 20000, 5)
    assert survived == empty
    # No "01" in 4 fair bits: the 5 words 1...10...0
    assert survived == pytest.approx(5 / 16, abs=0.02)


def test_unknown_mode():
    with pytest.raises(InvalidInputError):
        harvest_count_law(DoublingSource(), "01", 8, 10, 0, mode="bogus")


def test_write_law_csv(tmp_path):
    law = EmpiricalLaw(np.array([1, 0, 2]), COUNT_LAW, {"word": "01"})
    path = tmp_path / "law.csv"
    write_law_csv(law, path, {"seed": 3})

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:4] == ["# kind=count-law", "# seed=3", "# word=01",
                         "sample"]
    assert lines[4:] == ["1", "0", "2"]


@pytest.mark.parametrize(
    "source, word",
    [("doubling", "0110"), ("doubling", "0000"), ("golden", "0100")],
)
def test_neighbor_frequencies_are_symmetric(golden_mean, source, word):
    if source == "doubling":
        source = DoublingSource()
    else:
        source = SftSource(golden_mean)
    m, delta = 10**6, 8
    record = count_visits(source.stream(m + 4, 31), word, m)

    b_minus, b_plus = neighbor_frequencies(record, delta)
    assert b_plus > 0
    interior = m - 2 * delta
    assert abs(b_minus - b_plus) <= 3 * np.sqrt(b_plus / interior)
