import itertools

import numpy as np
import pytest

from returnlab.cylinders import (
    empirical_standard_error,
    enumerate_words,
    format_word,
    is_admissible,
    measure,
    outer_cylinder,
    parse_word,
    recurrence_time,
    return_probability_exact,
    select_test_cylinders,
    self_intersection_measure,
    shifted_return_probability_exact,
)
from returnlab.exceptions import (
    EnumerationCapError,
    InvalidInputError,
    UnsatisfiableConstraintError,
)
from returnlab.models.measure import Empirical, MarkovChain
from returnlab.models.stream import SymbolStream
from returnlab.models.systems import SftSystem
from returnlab.models.word import Word


@pytest.mark.parametrize(
    "text, expected",
    [("0000000000", 1), ("0000000001", 10), ("0101", 2), ("0110", 3),
     ("1", 1), ("01", 2)],
)
def test_recurrence_time_on_full_shift(text, expected):
    assert recurrence_time(text) == expected


@pytest.mark.parametrize("text, expected", [("1", 2), ("10", 2), ("101", 2),
                                            ("0", 1)])
def test_recurrence_time_on_golden_mean(golden_mean, text, expected):
    assert recurrence_time(text, golden_mean) == expected


def test_recurrence_time_rejects_inadmissible_word(golden_mean):
    with pytest.raises(InvalidInputError):
        recurrence_time("0110", golden_mean)


def test_word_formats():
    assert parse_word("12-0-3").symbols == (12, 0, 3)
    assert format_word((12, 0, 3)) == "12-0-3"
    assert format_word("0110") == "0110"
    assert Word((1, 2)).format(alphabet_size=12) == "1-2"
    with pytest.raises(InvalidInputError):
        parse_word("01a")


def test_outer_cylinder_is_suffix():
    assert outer_cylinder("0110", 2) == Word((1, 0))
    with pytest.raises(InvalidInputError):
        outer_cylinder("0110", 5)


def test_measures(coin, two_state_chain):
    assert measure("0000000001", coin) == 2.0**-10

    pi = two_state_chain.stationary
    assert pi == pytest.approx([0.8, 0.2])
    assert measure("011", two_state_chain) == pytest.approx(0.8 * 0.1 * 0.6)


def test_empirical_measure_counts_sliding_windows():
    reference = SymbolStream(np.array([0, 1, 0, 1]), alphabet_size=2)
    assert measure("01", Empirical(reference)) == pytest.approx(2 / 3)


def test_admissibility(golden_mean):
    assert is_admissible("0101", golden_mean)
    assert not is_admissible("0110", golden_mean)
    assert is_admissible("0110")


def test_enumerate_words(golden_mean):
    assert len(enumerate_words(3, 2)) == 8
    words = enumerate_words(3, 2, golden_mean.transition)
    assert sorted(str(word) for word in words) == [
        "000", "001", "010", "100", "101"
    ]
    with pytest.raises(EnumerationCapError):
        enumerate_words(21, 2)


def test_select_test_cylinders_respects_constraint(coin):
    selected = select_test_cylinders(10, 20, coin, seed=123)
    again = select_test_cylinders(10, 20, coin, seed=123)

    assert len(selected) == 20
    assert [c.word for c in selected] == [c.word for c in again]
    assert all(c.r_A > 5 for c in selected)
    assert all(c.mu == 2.0**-10 for c in selected)
    assert len({c.word for c in selected}) == 20


def test_select_test_cylinders_unsatisfiable(coin):
    # No binary 2-word has r_A above 2
    with pytest.raises(UnsatisfiableConstraintError) as error:
        select_test_cylinders(2, 1, coin, seed=0, constraint=5)
    assert error.value.type_ == "constraint_error"


def test_self_intersection_on_fair_coin(coin):
    assert self_intersection_measure("01", 1, coin) == 0.0
    assert self_intersection_measure("00", 1, coin) == 0.125
    # Disjoint coordinates are independent
    assert self_intersection_measure("01", 2, coin) == pytest.approx(1 / 16)
    assert self_intersection_measure("01", 5, coin) == pytest.approx(1 / 16)


def _brute_self_intersection(word, k, model):
    """Sum of path measures over all strings of length k + n."""
    n = len(word)
    total = 0.0
    for tail in itertools.product(range(2), repeat=k):
        path = tuple(word) + tail
        if path[k:k + n] == tuple(word):
            total += measure(Word(path), model)
    return total


@pytest.mark.parametrize("text", ["0", "01", "011", "0100"])
@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_self_intersection_matches_enumeration(two_state_chain, text, k):
    word = parse_word(text).symbols
    assert self_intersection_measure(text, k, two_state_chain) == (
        pytest.approx(_brute_self_intersection(word, k, two_state_chain),
                      abs=1e-15)
    )


def test_return_probabilities(coin):
    assert return_probability_exact("0", 1, coin) == 0.5
    assert return_probability_exact("01", 2, coin) == pytest.approx(0.25)
    assert return_probability_exact("0", 0, coin) == 0.0
    # Returns of "0" within three steps: 1 - 2^{-3}
    assert return_probability_exact("0", 3, coin) == pytest.approx(0.875)


def test_shifted_return_probabilities(coin):
    assert shifted_return_probability_exact("0", 1, coin) == 0.5
    assert shifted_return_probability_exact("01", 0, coin) == 0.0
    # From time n-1 = 1 on, "01" is seen at shift 2 or 3, never both
    assert shifted_return_probability_exact("01", 2, coin) == (
        pytest.approx(0.5)
    )


def test_return_probability_enumeration_cap(coin):
    with pytest.raises(EnumerationCapError):
        return_probability_exact("01", 17, coin)


def test_exact_oracles_need_exact_model():
    reference = SymbolStream(np.array([0, 1, 0, 1]), alphabet_size=2)
    with pytest.raises(InvalidInputError):
        self_intersection_measure("01", 2, Empirical(reference))


def test_empirical_standard_error_is_inflated():
    # Twice the i.i.d. variance of a frequency over 10**4 windows
    assert empirical_standard_error(0.5, 10**4) == pytest.approx(
        np.sqrt(2 * 0.25 / 10**4)
    )


CYCLE = SftSystem(
    transition=np.array([[0, 1, 0], [0, 0, 1], [1, 1, 0]]),
    sampling_chain=np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0],
                             [0.5, 0.5, 0.0]]),
)


def _brute_force_recurrence(symbols, allowed, alphabet_size):
    """Smallest j with an admissible word of length n + j read as A...A."""
    n = len(symbols)
    for j in range(1, n + alphabet_size + 1):
        if j < n:
            if symbols[j:] != symbols[:n - j]:
                continue
            candidates = [symbols + symbols[n - j:]]
        else:
            candidates = [
                symbols + gap + symbols
                for gap in itertools.product(range(alphabet_size),
                                             repeat=j - n)
            ]
        for candidate in candidates:
            if all(allowed[a, b] for a, b in zip(candidate, candidate[1:])):
                return j
    return None


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("system", ["full", "golden", "cycle"])
def test_recurrence_time_matches_brute_force(golden_mean, system, n):
    context = {"full": None, "golden": golden_mean, "cycle": CYCLE}[system]
    allowed = (np.ones((2, 2), dtype=bool) if context is None
               else context.transition > 0)
    alphabet_size = allowed.shape[0]

    words = enumerate_words(n, alphabet_size, allowed)
    assert words
    for word in words:
        expected = _brute_force_recurrence(
            word.symbols, allowed, alphabet_size
        )
        assert recurrence_time(word, context) == expected, str(word)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize(
    "model", ["coin", "biased_coin", "two_state_chain", "golden_chain"]
)
def test_measure_sums_to_one_over_words(request, golden_mean, model, n):
    if model == "golden_chain":
        model = MarkovChain(golden_mean.sampling_chain)
        words = enumerate_words(n, 2, golden_mean.transition)
    else:
        model = request.getfixturevalue(model)
        words = enumerate_words(n, 2)

    total = sum(measure(word, model) for word in words)
    assert total == pytest.approx(1.0, abs=1e-12)
