"""
Evaluable error bounds for Poisson approximation of return times.

Every unspecified constant is set to 1, so the values are rate certificates:
their dependence on n, the gap and t is meaningful, their absolute size is
not. Each BoundReport carries constant_free=True.
"""

import logging
import math

import numpy as np

from returnlab.cylinders import (
    as_word,
    measure,
    recurrence_time,
    self_intersection_measure,
)
from returnlab.exceptions import InvalidInputError
from returnlab.mixing import alpha, alpha_bar, delta_A
from returnlab.models.bound import BoundInput, BoundReport, RateDescriptor
from returnlab.models.measure import fair_coin
from returnlab.models.mixing_profile import ExactZero, Exponential, Polynomial
from returnlab.models.word import Word
from returnlab.utils.stats_utils import log_linear_fit


logger = logging.getLogger(__name__)

GRID_POINTS = 64
DEFAULT_EPSILON = 0.1
GRID_FLAG_RATIO = 2.0
PREFACTOR_MODES = ("t_max", "max")
# Prescribed gaps within this relative distance of an integer snap to it
INTEGER_SNAP = 1e-9


def _snap_ceil(x):
    nearest = round(x)
    if abs(x - nearest) <= INTEGER_SNAP * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


def prefactor(t, mode="t_max"):
    """t * max(t, 1) ('t_max') or max(t, 1) ('max')."""
    if mode == "t_max":
        return t * max(t, 1.0)
    if mode == "max":
        return max(t, 1.0)
    raise InvalidInputError(
        f"Unknown prefactor mode {mode!r}; use one of {PREFACTOR_MODES}.",
        loc=["prefactor_mode"],
    )


def bound_input_for_word(
    word, t, profile, model, k=1, eta=1.0, system=None
):
    """
    BoundInput for a concrete cylinder: mu(A), r_A, delta_A(n),
    delta_A(r_A) and the measure of A-tilde, the prefix cylinder of length
    min(r_A, n).
    """
    word = as_word(word)
    mu = measure(word, model)
    r_A = recurrence_time(word, system if system is not None else model)
    delta_n, _ = delta_A(word, word.n, profile, model)
    delta_rA, _ = delta_A(word, r_A, profile, model)
    tilde = Word(word.symbols[:min(r_A, word.n)])
    return BoundInput(
        mu_A=mu,
        n=word.n,
        r_A=r_A,
        t=t,
        profile=profile,
        k=k,
        eta=eta,
        mu_A_outer=measure(tilde, model),
        delta_n=delta_n,
        delta_rA=delta_rA,
    )


def theorem1_bound(inp, delta, prefactor_mode="t_max"):
    """
    t max(t,1) [(delta+n) mu(A) + n(delta_A(n) + delta_A(r_A)) + alpha_bar(n)
    + alpha(delta)/mu(A)] |log mu(A)|, with the constant set to 1.

    The assembled (delta+n) mu(A) summand dominates the displayed
    delta mu(A); both are reported.
    """
    if delta < 1:
        raise InvalidInputError("delta must be at least 1.", loc=["delta"])
    if inp.delta_n is None or inp.delta_rA is None:
        raise InvalidInputError(
            "delta_A(n) and delta_A(r_A) must be supplied.",
            loc=["delta_n", "delta_rA"],
        )
    breakdown = {
        "delta_mu": (delta + inp.n) * inp.mu_A,
        "delta_mu_display": delta * inp.mu_A,
        "n_delta_n": inp.n * inp.delta_n,
        "n_delta_rA": inp.n * inp.delta_rA,
        "alpha_bar": alpha_bar(inp.profile, inp.n),
        "alpha_over_mu": alpha(inp.profile, delta) / inp.mu_A,
        "log_factor": inp.log_factor,
        "prefactor": prefactor(inp.t, prefactor_mode),
    }
    summands = (
        breakdown["delta_mu"]
        + breakdown["n_delta_n"]
        + breakdown["n_delta_rA"]
        + breakdown["alpha_bar"]
        + breakdown["alpha_over_mu"]
    )
    value = breakdown["prefactor"] * summands * breakdown["log_factor"]
    return BoundReport(
        value=value,
        delta_star=int(delta),
        breakdown=breakdown,
        mode="theorem1",
        extra={"prefactor_mode": prefactor_mode},
    )


def prescribed_gap(inp, epsilon=DEFAULT_EPSILON):
    """
    Gap suggested by the rate analysis.

    Polynomial: round(mu(A)^{-2/(beta+1)}). Exponential:
    ceil((1+epsilon) |log mu(A)| / |log theta|).
    """
    profile = inp.profile
    if isinstance(profile, Polynomial):
        return max(1, int(round(inp.mu_A ** (-2.0 / (profile.beta + 1.0)))))
    if isinstance(profile, Exponential):
        ratio = (1.0 + epsilon) * inp.log_factor / abs(
            math.log(profile.theta)
        )
        return max(1, _snap_ceil(ratio))
    raise InvalidInputError(
        "Gap optimization needs an exponential or polynomial profile; an "
        "exactly independent process is optimal at delta = 1.",
        loc=["profile"],
    )


def gap_grid(low, high, points=GRID_POINTS, include=()):
    """Geometric integer grid over [low, high] plus the given points."""
    if high < low:
        raise InvalidInputError(
            "Empty gap range.", loc=["delta"]
        )
    grid = np.unique(np.round(np.geomspace(low, high, points)).astype(int))
    extra = [int(g) for g in include if low <= g <= high]
    return np.unique(np.concatenate([grid, np.asarray(extra, dtype=int)]))


def optimize_gap(inp, epsilon=DEFAULT_EPSILON, prefactor_mode="t_max"):
    """
    theorem1_bound at the prescribed gap, alongside a 64-point geometric
    grid search over [1, 10 * prescribed].

    Returns:
        BoundReport: The prescribed-gap report; `extra` holds the grid
        optimum and `grid_beats_prescription`, set when the grid value is
        below half the prescribed one.
    """
    chosen = prescribed_gap(inp, epsilon)
    at_prescribed = theorem1_bound(inp, chosen, prefactor_mode)
    grid = gap_grid(1, 10 * chosen, include=(chosen,))
    values = [theorem1_bound(inp, int(g), prefactor_mode).value for g in grid]
    best = int(np.argmin(values))
    grid_gap, grid_value = int(grid[best]), float(values[best])
    beaten = at_prescribed.value > GRID_FLAG_RATIO * grid_value
    if beaten:
        logger.warning(
            "Grid gap %d beats the prescribed gap %d by more than %.0fx",
            grid_gap, chosen, GRID_FLAG_RATIO,
        )
    at_prescribed.extra.update(
        {
            "prescribed_gap": chosen,
            "epsilon": epsilon,
            "grid_gap": grid_gap,
            "grid_value": grid_value,
            "grid_points": int(grid.size),
            "grid_beats_prescription": bool(beaten),
        }
    )
    return at_prescribed


def theorem2_rate(n, eta, profile, t=1.0, epsilon=DEFAULT_EPSILON):
    """
    Rate family of the Poisson approximation error.

    Polynomial profiles give the exact exponent beta - 1 - eta. Exponential
    profiles give gamma fitted by log-linear regression of the bound against
    n, evaluated on the fair-coin cylinders 0^{n-1}1 at the grid-optimal gap
    (the fit at the prescribed gap is reported in the details).

    Args:
        n: Sequence of word lengths for the fit (exponential profiles); a
        single length for polynomial profiles.
        eta (float): Exponent with |log mu(A)| <= K n^eta.
        profile: Exponential or Polynomial mixing profile.

    Raises:
        InvalidInputError: If beta <= 1 + eta, or the profile has no rate
        family.
    """
    if isinstance(profile, Polynomial):
        if profile.beta <= 1.0 + eta:
            raise InvalidInputError(
                f"Polynomial rate needs beta > 1 + eta, got beta="
                f"{profile.beta} and eta={eta}.",
                loc=["beta"],
            )
        return RateDescriptor(
            family="polynomial",
            exponent=profile.beta - 1.0 - eta,
            details={"beta": profile.beta, "eta": eta},
        )
    if not isinstance(profile, Exponential):
        raise InvalidInputError(
            "Rate families exist for exponential and polynomial profiles.",
            loc=["profile"],
        )
    lengths = np.atleast_1d(np.asarray(n, dtype=int))
    if lengths.size < 2:
        raise InvalidInputError(
            "An exponential rate fit needs at least two word lengths.",
            loc=["n"],
        )
    model = fair_coin()
    prescribed, optimal = [], []
    for length in lengths:
        word = Word((0,) * (int(length) - 1) + (1,))
        inp = bound_input_for_word(word, t, profile, model, eta=eta)
        report = optimize_gap(inp, epsilon)
        prescribed.append(report.value)
        optimal.append(report.extra["grid_value"])
    slope, _, r_squared = log_linear_fit(lengths, optimal)
    p_slope, _, p_r_squared = log_linear_fit(lengths, prescribed)
    return RateDescriptor(
        family="exponential",
        exponent=-slope,
        r_squared=r_squared,
        details={
            "n": lengths.tolist(),
            "grid_values": optimal,
            "prescribed_values": prescribed,
            "prescribed_exponent": -p_slope,
            "prescribed_r_squared": p_r_squared,
            "eta": eta,
            "t": t,
        },
    )


def _decay(p, k):
    if isinstance(p, ExactZero):
        return 0.0
    return alpha(p, k)


def young_bound(delta, inp, p):
    """
    delta mu(A-tilde) + (2 + t) p(delta - n) / mu(A) log m, constant-free.

    Raises:
        InvalidInputError: Unless n < delta < m, or when mu(A-tilde) is
        missing.
    """
    if inp.mu_A_outer is None:
        raise InvalidInputError(
            "The tower bound needs mu(A-tilde).", loc=["mu_A_outer"]
        )
    if not inp.n < delta < inp.m:
        raise InvalidInputError(
            f"delta must lie strictly between n={inp.n} and m={inp.m}.",
            loc=["delta"],
        )
    breakdown = {
        "delta_mu_outer": delta * inp.mu_A_outer,
        "decay_term": (2.0 + inp.t) * _decay(p, delta - inp.n) / inp.mu_A
        * math.log(inp.m),
        "log_m": math.log(inp.m),
    }
    return BoundReport(
        value=breakdown["delta_mu_outer"] + breakdown["decay_term"],
        delta_star=int(delta),
        breakdown=breakdown,
        mode="young",
    )


def young_optimize_gap(inp, p, points=GRID_POINTS):
    """Smallest young_bound on a geometric grid over (n, m)."""
    if inp.m - inp.n < 2:
        raise InvalidInputError(
            "No admissible gap between n and m.", loc=["t", "mu_A"]
        )
    grid = gap_grid(inp.n + 1, inp.m - 1, points)
    reports = [young_bound(int(g), inp, p) for g in grid]
    best = min(reports, key=lambda report: report.value)
    best.extra["grid_points"] = int(grid.size)
    return best


def young_prescribed_gap(n, rho, p, regime="exponential_measure", gamma=None):
    """
    Gap regime for the tower bound.

    With mu(A) ~ rho^n: n (1 + 1.5 |log rho| / |log theta|) for
    p = theta^k, rho^{-3n / (2(beta+1))} for p = k^{-beta}. With
    mu(A) ~ n^{-gamma}: n^{2 gamma / (beta+1)} for p = k^{-beta}, log n for
    p = theta^k.
    """
    if regime == "exponential_measure":
        if not 0 < rho < 1:
            raise InvalidInputError("rho must lie in (0, 1).", loc=["rho"])
        if isinstance(p, Exponential):
            gap = n * (1.0 + 1.5 * abs(math.log(rho)) / abs(math.log(p.theta)))
        elif isinstance(p, Polynomial):
            gap = rho ** (-3.0 * n / (2.0 * (p.beta + 1.0)))
        else:
            raise InvalidInputError(
                "Decay must be exponential or polynomial.", loc=["p"]
            )
    elif regime == "polynomial_measure":
        if isinstance(p, Polynomial):
            if gamma is None:
                raise InvalidInputError(
                    "The polynomial-measure regime needs gamma.",
                    loc=["gamma"],
                )
            gap = n ** (2.0 * gamma / (p.beta + 1.0))
        elif isinstance(p, Exponential):
            gap = math.log(n)
        else:
            raise InvalidInputError(
                "Decay must be exponential or polynomial.", loc=["p"]
            )
    else:
        raise InvalidInputError(
            f"Unknown gap regime {regime!r}.", loc=["regime"]
        )
    return max(1, int(round(gap)))


def young_rate(n, rho, p, t):
    """
    (t v 1) n rho^{n/2} for exponential p, (t v 1) n rho^{(n/2)(beta-2)/
    (beta+1)} for polynomial p with beta > 2.
    """
    scale = max(t, 1.0) * n
    if isinstance(p, Exponential):
        return scale * rho ** (n / 2.0)
    if isinstance(p, Polynomial):
        if p.beta <= 2.0:
            raise InvalidInputError(
                "The polynomial tower rate needs beta > 2.", loc=["beta"]
            )
        return scale * rho ** ((n / 2.0) * (p.beta - 2.0) / (p.beta + 1.0))
    raise InvalidInputError(
        "Decay must be exponential or polynomial.", loc=["p"]
    )


def cylinder_lemma_bound(word, k, profile, model):
    """mu(A) delta_A(k), the bound on mu(A intersect T^{-k} A)."""
    value, _ = delta_A(word, k, profile, model)
    return measure(word, model) * value


def recurrence_lemma_bound(word, t, profile, model, system=None):
    """2n (delta_A(n) + delta_A(r_A)) + t mu(A) + alpha_bar(n)."""
    word = as_word(word)
    r_A = recurrence_time(word, system if system is not None else model)
    delta_n, _ = delta_A(word, word.n, profile, model)
    delta_rA, _ = delta_A(word, r_A, profile, model)
    return (
        2 * word.n * (delta_n + delta_rA)
        + t * measure(word, model)
        + alpha_bar(profile, word.n)
    )


def shifted_return_lemma_bound(word, M, profile, model):
    """n delta_A(n) + M mu(A) + alpha_bar(n); only the first term for M <= n."""
    word = as_word(word)
    delta_n, _ = delta_A(word, word.n, profile, model)
    value = word.n * delta_n
    if M > word.n:
        value += M * measure(word, model) + alpha_bar(profile, word.n)
    return value


def cylinder_lemma_violations(words, ks, profile, model):
    """
    (word, k) pairs where mu(A intersect T^{-k} A) exceeds mu(A) delta_A(k).

    A relative slack of 1e-12 absorbs rounding.
    """
    violations = []
    for word in words:
        for k in ks:
            exact = self_intersection_measure(word, k, model)
            bound = cylinder_lemma_bound(word, k, profile, model)
            if exact > bound * (1.0 + 1e-12):
                violations.append((str(word), int(k), exact, bound))
    return violations
