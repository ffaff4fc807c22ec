"""
Chen-Stein toolkit for the Poisson law: mass and tail functions, the Stein
operator (Sf)(k) = t f(k+1) - k f(k), the solution of the Stein equation for
indicator events, and the explicit bounds on that solution.
"""

import logging
import math

import mpmath
import numpy as np
from scipy import special, stats

from returnlab.exceptions import InvalidInputError
from returnlab.models.stein_solution import SteinSolution


logger = logging.getLogger(__name__)

STEIN_K_MAX = 10**6
LOG_SPACE_FROM = 20
REFERENCE_DPS = 50


def _check_t(t, allow_zero=False):
    if t < 0 or (t == 0 and not allow_zero) or not math.isfinite(t):
        raise InvalidInputError(
            f"Poisson parameter must be positive, got {t!r}.", loc=["t"]
        )


def tail_truncation(t, k):
    """Last index kept when the tail representation is summed from k."""
    return k + max(50, math.ceil(10 * t))


def poisson_pmf(t, i):
    """e^{-t} t^i / i!, in log space for i > 20."""
    _check_t(t)
    if i < 0:
        raise InvalidInputError("i must be non-negative.", loc=["i"])
    if i > LOG_SPACE_FROM:
        return math.exp(-t + i * math.log(t) - math.lgamma(i + 1))
    return math.exp(-t) * t**i / math.factorial(i)


def poisson_pmf_array(t, k_max):
    """pmf(0), ..., pmf(k_max) as an array."""
    _check_t(t)
    return stats.poisson.pmf(np.arange(k_max + 1), t)


def erlang_tail(t, k):
    """
    sum_{i=0}^{k-1} e^{-t} t^i / i!, the limit law of P(tau^k > t / mu(A)).

    Evaluated as the regularized upper incomplete gamma function Q(k, t); at
    t = 0 it is 1.
    """
    _check_t(t, allow_zero=True)
    if k < 1:
        raise InvalidInputError("k must be at least 1.", loc=["k"])
    return float(special.gammaincc(k, t))


def _event_array(event):
    event = np.asarray(sorted(set(int(e) for e in event)), dtype=np.int64)
    if event.size and event[0] < 0:
        raise InvalidInputError(
            "Events are subsets of the non-negative integers.", loc=["event"]
        )
    return event


def event_mass(t, event):
    """mu_0(E), the Poisson(t) mass of a finite event."""
    _check_t(t)
    event = _event_array(event)
    if event.size == 0:
        return 0.0
    return float(stats.poisson.pmf(event, t).sum())


def _tail_value(t, indicator, mu0, k):
    """
    f(k) = -(k-1)!/t^k sum_{i>=k} (1_E(i) - mu_0(E)) t^i / i!, truncated.

    Weights (k-1)! t^{i-k} / i! are formed in log space.
    """
    i = np.arange(k, tail_truncation(t, k) + 1)
    log_weights = special.gammaln(k) - special.gammaln(i + 1) + (i - k) * (
        math.log(t)
    )
    centered = indicator[i] - mu0
    return float(-(centered * np.exp(log_weights)).sum())


def stein_solve(t, event, k_max):
    """
    Tabulate the solution of t f(k+1) - k f(k) = 1_E(k) - mu_0(E).

    Values up to t follow the finite-sum representation, which is the
    recursion run forwards from f(1) = (1_E(0) - mu_0(E)) / t. Values above t
    follow the tail representation: f(k_max) is summed directly and the
    recursion is run backwards, where it contracts by t/k per step. f(0) is
    set to 0.

    Raises:
        InvalidInputError: If t <= 0, k_max < 1 or k_max > 10**6.
    """
    _check_t(t)
    if int(k_max) != k_max or k_max < 1:
        raise InvalidInputError(
            "k_max must be a positive integer.", loc=["k_max"]
        )
    if k_max > STEIN_K_MAX:
        raise InvalidInputError(
            f"k_max must not exceed {STEIN_K_MAX}.", loc=["k_max"]
        )
    k_max = int(k_max)
    event_idx = _event_array(event)
    mu0 = event_mass(t, event_idx)

    top = tail_truncation(t, k_max)
    indicator = np.zeros(top + 1)
    indicator[event_idx[event_idx <= top]] = 1.0
    centered = (indicator - mu0).tolist()

    values = [0.0] * (k_max + 1)
    split = min(int(math.floor(t)), k_max)
    if split >= 1:
        values[1] = centered[0] / t
        for k in range(1, split):
            values[k + 1] = (k * values[k] + centered[k]) / t
    if k_max > split:
        values[k_max] = _tail_value(t, indicator, mu0, k_max)
        for k in range(k_max - 1, split, -1):
            values[k] = (t * values[k + 1] - centered[k]) / k

    return SteinSolution(
        t=float(t),
        event=frozenset(int(e) for e in event_idx),
        values=np.asarray(values),
        mu0_event=mu0,
    )


def stein_representation(t, event, k, representation="finite",
                         dps=REFERENCE_DPS):
    """
    f(k) from one closed form, evaluated at `dps` decimal digits.

    'finite' sums (k-1)!/t^k (1_E(i) - mu_0(E)) t^i / i! over i < k; 'tail'
    sums the negated terms over i >= k up to tail_truncation(t, k). Both are
    exact solutions, so at high precision they agree.
    """
    _check_t(t)
    if k < 1:
        raise InvalidInputError("k must be at least 1.", loc=["k"])
    if representation not in ("finite", "tail"):
        raise InvalidInputError(
            f"Unknown representation {representation!r}.",
            loc=["representation"],
        )
    members = set(int(e) for e in _event_array(event))
    with mpmath.workdps(dps):
        t_mp = mpmath.mpf(t)
        mu0 = mpmath.fsum(
            mpmath.exp(-t_mp) * t_mp**e / mpmath.factorial(e) for e in members
        )
        if representation == "finite":
            indices = range(0, k)
            sign = 1
        else:
            indices = range(k, tail_truncation(t, k) + 1)
            sign = -1
        total = mpmath.fsum(
            ((1 if i in members else 0) - mu0) * t_mp**i / mpmath.factorial(i)
            for i in indices
        )
        value = sign * mpmath.factorial(k - 1) / t_mp**k * total
        return float(value)


def stein_apply(solution, k):
    """(Sf)(k) = t f(k+1) - k f(k) for 1 <= k < k_max."""
    if not 1 <= k < solution.k_max:
        raise InvalidInputError(
            f"k must lie in [1, {solution.k_max - 1}].", loc=["k"]
        )
    return solution.t * solution.values[k + 1] - k * solution.values[k]


def stein_residual(solution):
    """max_k |(Sf)(k) - (1_E(k) - mu_0(E))| over 1 <= k < k_max."""
    if solution.k_max < 2:
        return 0.0
    k = np.arange(1, solution.k_max)
    applied = solution.t * solution.values[2:] - k * solution.values[1:-1]
    indicator = np.isin(k, list(solution.event)).astype(float)
    return float(np.max(np.abs(applied - (indicator - solution.mu0_event))))


def stein_bound_pointwise(t, k):
    """1 if k <= t, else (2 + t)/k."""
    _check_t(t)
    if k < 1:
        raise InvalidInputError("k must be at least 1.", loc=["k"])
    if k <= t:
        return 1.0
    return (2.0 + t) / k


def stein_bound_sum(t, m):
    """Bound on sum_{i=1}^m |f(i)|: m if m <= t, else t + (2+t) log(m/t)."""
    _check_t(t)
    if m < 1:
        raise InvalidInputError("m must be at least 1.", loc=["m"])
    if m <= t:
        return float(m)
    return t + (2.0 + t) * math.log(m / t)


def stein_distance(counts, t, event):
    """
    Both sides of |P(W in E) - mu_0(E)| = |E[(Sf)(W)]| on a count sample.

    Args:
        counts: EmpiricalLaw of visit counts or an array of counts.
        t (float): Poisson parameter.
        event: Finite event E.

    Returns:
        tuple: (direct deviation, Stein-operator expectation), both
        non-negative.
    """
    samples = getattr(counts, "samples", counts)
    samples = np.asarray(samples)
    if samples.size == 0:
        raise InvalidInputError("Need at least one count.", loc=["counts"])
    if np.any(samples < 0) or np.any(samples != np.round(samples)):
        raise InvalidInputError(
            "Counts must be non-negative integers.", loc=["counts"]
        )
    samples = samples.astype(np.int64)
    solution = stein_solve(t, event, int(samples.max()) + 1)
    members = np.isin(samples, list(solution.event))
    direct = abs(float(members.mean()) - solution.mu0_event)
    applied = t * solution.values[samples + 1] - samples * (
        solution.values[samples]
    )
    return direct, abs(float(applied.mean()))


def poisson_characterization_residual(t, f_values):
    """
    sum_{k=0}^{K-1} (Sf)(k) pmf(k) for f given at 0..K.

    Vanishes for the Poisson law up to the boundary term K f(K) pmf(K).
    """
    _check_t(t)
    f_values = np.asarray(f_values, dtype=float)
    if f_values.size < 2:
        raise InvalidInputError(
            "Need f at two or more points.", loc=["f_values"]
        )
    k = np.arange(f_values.size - 1)
    applied = t * f_values[1:] - k * f_values[:-1]
    return float(applied @ poisson_pmf_array(t, f_values.size - 2))
