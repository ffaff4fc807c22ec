import itertools

import numpy as np
import pytest

from returnlab.cylinders import measure
from returnlab.exceptions import EnumerationCapError, InvalidInputError
from returnlab.mixing import (
    alpha,
    alpha_at_gap,
    alpha_bar,
    alpha_bar_bracket,
    alpha_empirical,
    delta_A,
    mixing_table,
    recurrence_upper_bound,
)
from returnlab.models.mixing_profile import (
    ExactZero,
    Exponential,
    Polynomial,
    Table,
)
from returnlab.models.word import Word


def test_profile_values():
    assert alpha(ExactZero(), 3) == 0.0
    assert alpha(Exponential(2.0, 0.5), 3) == 0.25
    assert alpha(Polynomial(1.0, 2.0), 4) == 1 / 16
    assert alpha(Table((0.5, 0.25, 0.125)), 2) == 0.25
    with pytest.raises(InvalidInputError):
        alpha(ExactZero(), 0)


def test_alpha_at_zero_gap():
    assert alpha_at_gap(ExactZero(), 0) == 0.0
    assert alpha_at_gap(Exponential(1.0, 0.5), 0) == 1.0
    assert alpha_at_gap(Exponential(1.0, 0.5), 2) == 0.25


def test_table_extrapolates_geometrically():
    table = Table((0.5, 0.25, 0.125))
    assert alpha(table, 5) == pytest.approx(0.125 * 0.25)
    assert alpha_bar(table, 1) == pytest.approx(1.0)
    assert alpha_bar(Table((0.5, 0.0)), 1) == 0.5


def test_profile_validation():
    with pytest.raises(InvalidInputError):
        Exponential(1.0, 1.0)
    with pytest.raises(InvalidInputError):
        Polynomial(1.0, 0.0)
    with pytest.raises(InvalidInputError):
        Table((0.1, 0.2))


def test_alpha_bar_closed_forms():
    assert alpha_bar(ExactZero(), 4) == 0.0
    assert alpha_bar(Exponential(1.0, 0.5), 3) == pytest.approx(0.25)

    profile = Polynomial(1.0, 3.0)
    ks = np.arange(5, 10**6 + 1, dtype=float)
    brute = (ks**-3.0).sum() + 0.5 * 10.0**-12
    assert alpha_bar(profile, 5) == pytest.approx(brute, abs=1e-9)

    with pytest.raises(InvalidInputError):
        alpha_bar(Polynomial(1.0, 1.0), 1)


@pytest.mark.parametrize("n", [1, 2, 10, 100])
def test_alpha_bar_inside_bracket(n):
    profile = Polynomial(2.0, 2.5)
    lower, upper = alpha_bar_bracket(profile, n)
    assert lower <= alpha_bar(profile, n) <= upper


def _brute_alpha(model, n, k, b_max):
    """sup over A, B of |mu(A and T^{-n-k} B)/mu(B) - mu(A)| by paths."""
    worst = 0.0
    size = model.alphabet_size
    for a in itertools.product(range(size), repeat=n):
        mu_a = measure(Word(a), model)
        for length in range(1, b_max + 1):
            for b in itertools.product(range(size), repeat=length):
                mu_b = measure(Word(b), model)
                if mu_b == 0:
                    continue
                joint = 0.0
                for gap in itertools.product(range(size), repeat=k):
                    joint += measure(Word(a + gap + b), model)
                worst = max(worst, abs(joint / mu_b - mu_a))
    return worst


@pytest.mark.parametrize("k", range(1, 9))
def test_alpha_empirical_matches_enumeration(two_state_chain, k):
    assert alpha_empirical(two_state_chain, 1, k, b_max=3) == pytest.approx(
        _brute_alpha(two_state_chain, 1, k, 3), abs=1e-12
    )


@pytest.mark.parametrize("k", range(1, 9))
def test_alpha_empirical_vanishes_for_products(coin, biased_coin, k):
    assert alpha_empirical("doubling", 1, k) <= 1e-14
    assert alpha_empirical(biased_coin, 1, k) <= 1e-14


def test_alpha_empirical_cap(coin):
    with pytest.raises(EnumerationCapError):
        alpha_empirical(coin, 20, 1, b_max=6)


def test_mixing_table_is_non_increasing(two_state_chain):
    table = mixing_table(two_state_chain, 1, 8)
    values = np.asarray(table.values)

    assert table.k_max == 8
    assert np.all(np.diff(values) <= 0)
    # Second eigenvalue of the chain is 0.5
    assert values[-1] < values[0] * 0.5**5


def test_delta_A_on_fair_coin(coin):
    assert delta_A("000000", 3, ExactZero(), coin) == (0.125, 3)
    assert delta_A("000000", 10, ExactZero(), coin) == (2.0**-6, 6)
    value, w = delta_A("0001", 4, Exponential(1.0, 0.5), coin)
    # w = 1: 1/2 + 1/8, w = 2: 1/4 + 1/4, w = 3: 1/8 + 1/2, w = 4: 1/16 + 1
    assert (value, w) == (0.5, 2)


def test_recurrence_upper_bound(coin):
    assert recurrence_upper_bound("000", ExactZero(), coin) == 3
    assert recurrence_upper_bound("000", Exponential(1.0, 0.5), coin) == 7
