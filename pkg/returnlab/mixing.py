"""
Mixing sequences alpha(k): parametric profiles, their tails alpha_bar(n),
exact values for product and Markov measures by enumeration, and the
correlation functional delta_A(k).
"""

import logging
import math

import numpy as np
from scipy import special

from returnlab.cylinders import as_word, enumerate_words, measure, outer_cylinder
from returnlab.exceptions import (
    EnumerationCapError,
    InvalidInputError,
)
from returnlab.models.measure import BernoulliProduct, MarkovChain
from returnlab.models.mixing_profile import (
    ExactZero,
    Exponential,
    Polynomial,
    Table,
)
from returnlab.models.systems import SftSystem
from returnlab.utils.markov_utils import gap_matrix
from returnlab.utils.stats_utils import log_linear_fit


logger = logging.getLogger(__name__)

PAIR_CAP = 10**7
DEFAULT_B_MAX = 6
TABLE_FIT_POINTS = 5
SEARCH_CHUNK = 4096
SEARCH_LIMIT = 10**8


def _table_rate(profile):
    """
    Geometric rate theta fitted to the last positive tabulated values.

    Returns None when the table ends at 0 (the tail vanishes) and 1.0 when no
    decay can be fitted.
    """
    values = np.asarray(profile.values)
    if values[-1] == 0.0:
        return None
    tail = values[-TABLE_FIT_POINTS:]
    tail = tail[tail > 0]
    if tail.size < 2:
        return 1.0
    slope, _, _ = log_linear_fit(np.arange(tail.size), tail)
    return min(1.0, math.exp(slope))


def alpha_array(profile, ks):
    """alpha(k) for an array of k >= 1."""
    ks = np.asarray(ks, dtype=float)
    if np.any(ks < 1):
        raise InvalidInputError(
            "alpha(k) is defined for k >= 1.", loc=["k"]
        )
    if isinstance(profile, ExactZero):
        return np.zeros_like(ks)
    if isinstance(profile, Exponential):
        return profile.c * profile.theta**ks
    if isinstance(profile, Polynomial):
        return profile.c * ks ** (-profile.beta)
    if isinstance(profile, Table):
        values = np.asarray(profile.values)
        result = np.empty_like(ks)
        inside = ks <= profile.k_max
        result[inside] = values[ks[inside].astype(np.int64) - 1]
        if np.any(~inside):
            rate = _table_rate(profile)
            logger.warning(
                "alpha(k) extrapolated beyond the table (k_max=%d, rate=%s)",
                profile.k_max, rate,
            )
            if rate is None:
                result[~inside] = 0.0
            else:
                result[~inside] = values[-1] * rate ** (
                    ks[~inside] - profile.k_max
                )
        return result
    raise InvalidInputError(
        f"Unknown mixing profile {type(profile).__name__}.", loc=["profile"]
    )


def alpha(profile, k):
    """
    Evaluate the mixing profile at k >= 1.

    Tables are extended beyond k_max geometrically from the last value, with
    a warning.
    """
    if k < 1:
        raise InvalidInputError(
            "alpha(0) is not part of the mixing sequence.", loc=["k"]
        )
    return float(alpha_array(profile, [k])[0])


def alpha_at_gap(profile, gap):
    """
    alpha(gap) including gap 0.

    At gap 0 nothing separates the two sets: independent processes give 0,
    every other profile the trivial bound 1.
    """
    if gap == 0:
        return 0.0 if isinstance(profile, ExactZero) else 1.0
    return alpha(profile, gap)


def alpha_bar(profile, n):
    """
    Tail sum sum_{j >= n} alpha(j).

    Exponential: c theta^n / (1 - theta). Polynomial: the Hurwitz zeta value
    c zeta(beta, n). Table: exact partial sum plus the geometric extension.

    Raises:
        InvalidInputError: If the profile is not summable.
    """
    if n < 1:
        raise InvalidInputError("n must be at least 1.", loc=["n"])
    if isinstance(profile, ExactZero):
        return 0.0
    if isinstance(profile, Exponential):
        return profile.c * profile.theta**n / (1.0 - profile.theta)
    if isinstance(profile, Polynomial):
        if not profile.summable:
            raise InvalidInputError(
                f"Polynomial profile with beta={profile.beta} is not "
                "summable.",
                loc=["beta"],
            )
        return float(profile.c * special.zeta(profile.beta, n))
    if isinstance(profile, Table):
        values = np.asarray(profile.values)
        inside = float(values[n - 1:].sum()) if n <= profile.k_max else 0.0
        rate = _table_rate(profile)
        if rate is None:
            return inside
        if rate >= 1.0:
            raise InvalidInputError(
                "Tabulated profile has no summable extension.",
                loc=["values"],
            )
        start = max(n, profile.k_max + 1)
        tail = values[-1] * rate ** (start - profile.k_max) / (1.0 - rate)
        return inside + float(tail)
    raise InvalidInputError(
        f"Unknown mixing profile {type(profile).__name__}.", loc=["profile"]
    )


def alpha_bar_bracket(profile, n):
    """
    Integral-comparison bracket for a polynomial tail.

    Returns:
        tuple: (c n^{1-beta}/(beta-1), c (n-1)^{1-beta}/(beta-1)); for n = 1
        the upper end is c beta/(beta-1).
    """
    if not isinstance(profile, Polynomial):
        raise InvalidInputError(
            "Brackets are defined for polynomial profiles.", loc=["profile"]
        )
    if not profile.summable:
        raise InvalidInputError(
            f"Polynomial profile with beta={profile.beta} is not summable.",
            loc=["beta"],
        )
    if n < 1:
        raise InvalidInputError("n must be at least 1.", loc=["n"])
    c, beta = profile.c, profile.beta
    lower = c * n ** (1.0 - beta) / (beta - 1.0)
    if n == 1:
        upper = c * beta / (beta - 1.0)
    else:
        upper = c * (n - 1) ** (1.0 - beta) / (beta - 1.0)
    return lower, upper


def exact_chain(system):
    """(P, pi) of a system or model with exact transition structure."""
    if isinstance(system, str) and system == "doubling":
        system = BernoulliProduct(np.array([0.5, 0.5]))
    model = getattr(system, "model", system)
    if isinstance(model, SftSystem):
        return model.sampling_chain, model.stationary
    if isinstance(model, (BernoulliProduct, MarkovChain)):
        return model.chain()
    raise InvalidInputError(
        "Exact mixing coefficients need a doubling, SFT, Bernoulli or "
        "Markov system.",
        loc=["system"],
    )


def alpha_empirical(system, n, k, b_max=DEFAULT_B_MAX):
    """
    Exact sup over n-words A and b-words B (b <= b_max) of
    |mu(A intersect T^{-n-k} B)/mu(B) - mu(A)|.

    The joint measure is mu(A) P^{k+1}[a_last, b_0] mu(B)/pi(b_0), so the
    ratio depends on B only through its first symbol. The result restricts B
    to cylinders and is a certified lower bound on alpha(k).

    Raises:
        EnumerationCapError: If more than 10**7 (A, B) pairs would be
        enumerated.
    """
    if n < 1 or k < 1 or b_max < 1:
        raise InvalidInputError(
            "n, k and b_max must be at least 1.", loc=["n", "k"]
        )
    matrix, stationary = exact_chain(system)
    size = matrix.shape[0]
    pairs = size**n * sum(size**length for length in range(1, b_max + 1))
    if pairs > PAIR_CAP:
        raise EnumerationCapError(
            f"{pairs} (A, B) pairs exceed the cap {PAIR_CAP}.",
            loc=["n"],
            ctx={"cap": PAIR_CAP},
        )
    chain = MarkovChain(matrix, stationary)
    words = enumerate_words(n, size)
    mu = np.array([measure(word, chain) for word in words])
    last = np.array([word.symbols[-1] for word in words])
    charged = mu > 0
    mu, last = mu[charged], last[charged]
    # Every symbol of positive stationary mass starts a positive-measure B
    starts = stationary > 0
    ratio = gap_matrix(matrix, k + 1)[:, starts] / stationary[starts]
    deviation = np.abs(mu[:, None] * (ratio[last] - 1.0))
    return float(deviation.max())


def mixing_table(system, n, k_max, b_max=DEFAULT_B_MAX):
    """
    Table profile from exact values alpha_empirical(k), k = 1..k_max.

    The smallest non-increasing majorant of the values is returned.
    """
    values = np.array(
        [alpha_empirical(system, n, k, b_max) for k in range(1, k_max + 1)]
    )
    envelope = np.maximum.accumulate(values[::-1])[::-1]
    return Table(tuple(envelope.tolist()))


def delta_A(word, k, profile, model):
    """
    delta_A(k) = min over 1 <= w <= min(k, n) of mu(A^(w)) + alpha(k - w).

    Returns:
        tuple: (value, w) with w the first minimizer.
    """
    word = as_word(word)
    if k < 1:
        raise InvalidInputError("k must be at least 1.", loc=["k"])
    best_value, best_w = math.inf, None
    for w in range(1, min(k, word.n) + 1):
        value = measure(outer_cylinder(word, w), model) + alpha_at_gap(
            profile, k - w
        )
        if value < best_value:
            best_value, best_w = value, w
    return best_value, best_w


def recurrence_upper_bound(word, profile, model):
    """
    n + min{l >= 0 : alpha(l) < mu(A)}.

    A and T^{-(n+l)} A are forced to intersect once alpha(l) < mu(A), so this
    bounds r_A from above.

    Raises:
        InvalidInputError: If mu(A) is 0 or the profile never drops below it.
    """
    word = as_word(word)
    mu = measure(word, model)
    if mu <= 0:
        raise InvalidInputError(
            "The cylinder has measure 0.", loc=["word"]
        )
    if alpha_at_gap(profile, 0) < mu:
        return word.n
    start = 1
    while start < SEARCH_LIMIT:
        ks = np.arange(start, start + SEARCH_CHUNK)
        below = np.flatnonzero(alpha_array(profile, ks) < mu)
        if below.size:
            return word.n + int(ks[below[0]])
        start += SEARCH_CHUNK
    raise InvalidInputError(
        f"alpha(l) stays above mu(A) = {mu:.3e} up to l = {SEARCH_LIMIT}.",
        loc=["profile"],
    )
