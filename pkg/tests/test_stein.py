import math

import numpy as np
import pytest

from returnlab.exceptions import InvalidInputError
from returnlab.stein import (
    erlang_tail,
    event_mass,
    poisson_characterization_residual,
    poisson_pmf,
    poisson_pmf_array,
    stein_apply,
    stein_bound_pointwise,
    stein_bound_sum,
    stein_distance,
    stein_representation,
    stein_residual,
    stein_solve,
)

T_VALUES = [0.5, 1.0, 5.0, 20.0]


def _random_events(seed, count=50, top=50):
    rng = np.random.default_rng(seed)
    return [np.flatnonzero(rng.random(top + 1) < 0.5) for _ in range(count)]


def test_poisson_pmf():
    assert poisson_pmf(2.0, 3) == pytest.approx(math.exp(-2) * 8 / 6)
    assert poisson_pmf_array(1.0, 4).sum() == pytest.approx(
        sum(math.exp(-1) / math.factorial(i) for i in range(5))
    )


def test_erlang_tail():
    assert erlang_tail(1.5, 1) == pytest.approx(math.exp(-1.5))
    assert erlang_tail(1.5, 2) == pytest.approx(math.exp(-1.5) * 2.5)
    assert erlang_tail(0.0, 3) == 1.0


def test_event_mass():
    assert event_mass(1.0, {0}) == pytest.approx(math.exp(-1))
    assert event_mass(1.0, []) == 0.0
    with pytest.raises(InvalidInputError):
        event_mass(1.0, {-1})


@pytest.mark.parametrize("t", T_VALUES)
def test_stein_equation_residual(t):
    for event in _random_events(int(t * 10)):
        solution = stein_solve(t, event, 100)
        assert stein_residual(solution) <= 1e-10


@pytest.mark.parametrize("t", T_VALUES)
def test_stein_solution_bounds(t):
    for event in _random_events(int(t * 10) + 1):
        solution = stein_solve(t, event, 100)
        magnitudes = np.abs(solution.values[1:])
        partial = np.cumsum(magnitudes)
        for k in range(1, 101):
            assert magnitudes[k - 1] <= stein_bound_pointwise(t, k) * (
                1 + 1e-12
            )
            assert partial[k - 1] <= stein_bound_sum(t, k) * (1 + 1e-12)


@pytest.mark.parametrize("t, k", [(0.5, 1), (1.0, 3), (5.0, 2), (5.0, 9),
                                  (20.0, 25)])
def test_representations_agree(t, k):
    event = {0, 2, 3, 7}
    finite = stein_representation(t, event, k, "finite")
    tail = stein_representation(t, event, k, "tail")
    solution = stein_solve(t, event, 40)

    assert finite == pytest.approx(tail, abs=1e-12)
    assert solution.f(k) == pytest.approx(tail, abs=1e-10)


def test_stein_apply_recovers_centered_indicator():
    solution = stein_solve(2.0, {1, 4}, 30)
    mu0 = solution.mu0_event

    assert stein_apply(solution, 1) == pytest.approx(1 - mu0)
    assert stein_apply(solution, 2) == pytest.approx(-mu0)
    with pytest.raises(InvalidInputError):
        stein_apply(solution, 30)


def test_stein_solution_model():
    solution = stein_solve(1.0, {0}, 5)

    assert solution.k_max == 5
    assert solution.f0 == 0.0
    assert solution.indicator(0) == 1.0
    assert len(solution.to_dict()["values"]) == 5


def test_stein_distance_sides_agree():
    counts = np.random.default_rng(3).poisson(1.3, size=5000)
    for event in ({0}, {1, 2}, {0, 3, 5}):
        direct, through_stein = stein_distance(counts, 1.3, event)
        assert direct == pytest.approx(through_stein, abs=1e-10)


def test_stein_distance_rejects_non_counts():
    with pytest.raises(InvalidInputError):
        stein_distance(np.array([0.5, 1.0]), 1.0, {0})


def test_poisson_characterization():
    solution = stein_solve(5.0, {2, 3, 11}, 100)
    assert abs(poisson_characterization_residual(5.0, solution.values)) < (
        1e-12
    )


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_non_positive_t_rejected(t):
    with pytest.raises(InvalidInputError):
        stein_solve(t, {0}, 10)


def test_k_max_cap():
    with pytest.raises(InvalidInputError):
        stein_solve(1.0, {0}, 10**6 + 1)
