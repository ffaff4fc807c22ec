"""
Markov towers: branch specifications, the Gaspard-Wang ladder and tower,
invariant level masses, i.i.d.-base simulation, and the Ulam discretization
of interval-map transfer operators with its decay estimate p(k).
"""

import logging
import math
import re

import numpy as np
from scipy import optimize, sparse

from returnlab.dynamics import check_ladder
from returnlab.exceptions import ConvergenceError, InvalidInputError
from returnlab.models.stream import TowerStream
from returnlab.models.systems import GwSystem
from returnlab.models.tower import TowerSpec, UlamOperator
from returnlab.utils.rng_utils import make_rng
from returnlab.utils.stats_utils import (
    aggregate_ratio_deviation,
    binomial_standard_error,
    log_linear_fit,
    log_log_fit,
    ratio_deviation,
)


logger = logging.getLogger(__name__)

DEFAULT_I_MAX = 10**5
TRUNCATION_WARNING = 0.01
DEFAULT_BINS = 4096
INVERSE_TOLERANCE = 1e-13
POWER_TOLERANCE = 1e-12
POWER_MAX_STEPS = 10**5
DECAY_FLOOR = 1e-12
OCCUPANCY_TOLERANCE = 0.01
OCCUPANCY_MIN_MASS = 1e-3
OCCUPANCY_SIGMAS = 4.0
# Upper end of the Poisson regime of the Gaspard-Wang family
POISSON_ALPHA_LIMIT = 1.0 / 3.0

_GW_MAP_ID = re.compile(r"^gw\((?P<alpha>[0-9.eE+-]+)\)$")


def _check_alpha(alpha_gw):
    if not 0.0 < alpha_gw < 1.0:
        raise InvalidInputError(
            "Gaspard-Wang exponent must lie in (0, 1).", loc=["alpha_gw"]
        )


def gw_ladder(alpha_gw, i_max):
    """
    Solve a_i + 2^alpha a_i^{1+alpha} = a_{i-1} from a_0 = 1/2.

    Each root is bracketed by [a_{i-1} - 2^alpha a_{i-1}^{1+alpha}, a_{i-1}]
    and found by bisection to 1e-14 relative to a_{i-1}.

    Args:
        alpha_gw (float): Intermittency exponent in (0, 1).
        i_max (int): Number of ladder steps.

    Returns:
        GwSystem: The map with boundaries a_0 > ... > a_{i_max}.
    """
    _check_alpha(alpha_gw)
    if i_max < 1:
        raise InvalidInputError("i_max must be at least 1.", loc=["i_max"])
    scale = 2.0**alpha_gw
    ladder = [0.5]
    previous = 0.5
    for _ in range(int(i_max)):
        low = max(0.0, previous - scale * previous ** (1.0 + alpha_gw))
        root = optimize.bisect(
            lambda a, target=previous: a + scale * a ** (1.0 + alpha_gw)
            - target,
            low,
            previous,
            xtol=1e-14 * previous,
        )
        ladder.append(root)
        previous = root
    system = GwSystem(alpha_gw=alpha_gw, boundaries=np.asarray(ladder))
    logger.debug(
        "Ladder alpha=%s, i_max=%d, residual %.2e",
        alpha_gw, i_max, check_ladder(system, tolerance=math.inf),
    )
    return system


def gw_tower(alpha_gw, i_max=DEFAULT_I_MAX):
    """
    Tower of the Gaspard-Wang map: branch i is A_i with weight
    a_{i-1} - a_i (a_{-1} := 1) and return time i + 1.

    The lost mass a_{i_max} is recorded as truncation_mass and the weights
    are renormalized; a warning is logged when it exceeds 1%.
    """
    return ladder_tower(gw_ladder(alpha_gw, i_max))


def ladder_tower(system):
    """gw_tower for an already computed ladder."""
    ladder = system.boundaries
    alpha_gw = system.alpha_gw
    i_max = system.i_max
    weights = -np.diff(np.concatenate([[1.0], ladder]))
    lost = float(ladder[-1])
    if lost > TRUNCATION_WARNING:
        logger.warning(
            "Tower truncation at i_max=%d loses %.2f%% of the base mass",
            i_max, 100.0 * lost,
        )
    return TowerSpec(
        branch_weights=weights / weights.sum(),
        return_times=np.arange(1, ladder.size + 1),
        truncation_mass=lost,
        tail_exponent=1.0 / alpha_gw,
        label=f"gaspard_wang({alpha_gw})",
    )


def branch_tower(branches, label="branches"):
    """TowerSpec from [{'weight': w, 'return_time': R}, ...]."""
    if not branches:
        raise InvalidInputError("Need at least one branch.", loc=["branches"])
    weights = np.array([branch["weight"] for branch in branches], dtype=float)
    if np.any(weights < 0) or weights.sum() <= 0:
        raise InvalidInputError(
            "Branch weights must be non-negative with positive total.",
            loc=["branches", "weight"],
        )
    return TowerSpec(
        branch_weights=weights / weights.sum(),
        return_times=[branch["return_time"] for branch in branches],
        label=label,
    )


def tail_masses(spec):
    """nu(R > j) for j = 0, ..., max R - 1."""
    mass = np.bincount(spec.return_times, weights=spec.branch_weights)
    at_least = np.cumsum(mass[::-1])[::-1]
    return at_least[1:]


def tower_invariant(spec):
    """
    Invariant mass of each tower level, nu(R > j) / E[R].

    Raises:
        InvalidInputError: If R is not integrable.
    """
    if not spec.integrable:
        raise InvalidInputError(
            f"Return time with tail exponent {spec.tail_exponent} is not "
            "integrable.",
            loc=["tail_exponent"],
        )
    return tail_masses(spec) / spec.mean_return


def tail_slope(spec, n_lo, n_hi):
    """
    Log-log regression slope of nu(R > n) over integers n in [n_lo, n_hi].

    Returns:
        tuple: (slope, r_squared).
    """
    if not 1 <= n_lo < n_hi:
        raise InvalidInputError(
            "Need 1 <= n_lo < n_hi.", loc=["n_lo", "n_hi"]
        )
    tails = tail_masses(spec)
    if n_hi >= tails.size or tails[n_hi] <= 0:
        raise InvalidInputError(
            f"nu(R > {n_hi}) vanishes on this truncation.", loc=["n_hi"]
        )
    ns = np.arange(n_lo, n_hi + 1)
    slope, _, r_squared = log_log_fit(ns, tails[ns])
    return slope, r_squared


def poisson_regime(alpha_gw):
    """True when the Gaspard-Wang exponent lies in (0, 1/3)."""
    return 0.0 < alpha_gw < POISSON_ALPHA_LIMIT


def tower_simulate(spec, length, seed):
    """
    Orbit on the tower started at the base.

    Levels climb by one per step; at the top of branch i the orbit returns
    to level 0 of a branch drawn afresh with probabilities nu.
    """
    if length < 1:
        raise InvalidInputError("length must be at least 1.", loc=["length"])
    rng = make_rng(seed)
    mean = spec.mean_return
    branches, filled = [], 0
    while filled < length:
        draws = int(math.ceil(1.1 * (length - filled) / mean)) + 16
        chosen = rng.choice(
            spec.branch_weights.size, size=draws, p=spec.branch_weights
        )
        branches.append(chosen)
        filled += int(spec.return_times[chosen].sum())
    chosen = np.concatenate(branches)
    heights = spec.return_times[chosen]
    steps = np.repeat(chosen, heights)[:length]
    starts = np.repeat(np.cumsum(heights) - heights, heights)[:length]
    levels = np.arange(length) - starts
    return TowerStream(branches=steps, levels=levels, seed=seed)


def level_occupancy(stream, spec, min_mass=OCCUPANCY_MIN_MASS):
    """
    Compare level frequencies of a tower orbit with tower_invariant.

    Levels with invariant mass >= min_mass are scored; each passes when its
    relative error is within max(1%, 4 binomial standard errors).

    Returns:
        dict: Per-level expected and observed masses, relative errors and
        tolerances, plus the max per-level deviation and the deviation of
        the aggregated mass (never larger).
    """
    expected = tower_invariant(spec)
    observed = np.bincount(stream.levels, minlength=expected.size)[
        :expected.size
    ] / stream.length
    levels = np.flatnonzero(expected >= min_mass)
    if levels.size == 0:
        raise InvalidInputError(
            f"No level carries mass >= {min_mass}.", loc=["min_mass"]
        )
    exp, obs = expected[levels], observed[levels]
    relative = np.abs(obs / exp - 1.0)
    tolerance = np.maximum(
        OCCUPANCY_TOLERANCE,
        OCCUPANCY_SIGMAS * np.array(
            [binomial_standard_error(p, stream.length) for p in exp]
        ) / exp,
    )
    if np.all(obs > 0):
        max_deviation = ratio_deviation(obs, exp)
    else:
        max_deviation = float(relative.max())
    return {
        "levels": levels.tolist(),
        "expected": exp.tolist(),
        "observed": obs.tolist(),
        "relative_error": relative.tolist(),
        "tolerance": tolerance.tolist(),
        "max_relative_error": max_deviation,
        "aggregate_deviation": aggregate_ratio_deviation(obs, exp),
        "passed": bool(np.all(relative <= tolerance)),
    }


def branch_lag_correlation(stream):
    """Lag-1 correlation of the branches drawn at successive returns."""
    drawn = stream.return_branches().astype(float)
    if drawn.size < 3 or drawn[:-1].std() == 0 or drawn[1:].std() == 0:
        return 0.0
    return float(np.corrcoef(drawn[:-1], drawn[1:])[0, 1])


def parse_map_id(map_id):
    """
    ('doubling', None) or ('gw', alpha) from 'doubling' or 'gw(<alpha>)'.

    Raises:
        InvalidInputError: For any other map name.
    """
    if map_id == "doubling":
        return "doubling", None
    match = _GW_MAP_ID.match(str(map_id))
    if match:
        alpha_gw = float(match.group("alpha"))
        _check_alpha(alpha_gw)
        return "gw", alpha_gw
    raise InvalidInputError(
        f"Unknown map {map_id!r}; use 'doubling' or 'gw(<alpha>)'.",
        loc=["map_id"],
    )


def _gw_left_inverse(y, alpha_gw):
    """Preimage in [0, 1/2] of y under x + 2^alpha x^{1+alpha}."""
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 0.5
    scale = 2.0**alpha_gw
    return optimize.bisect(
        lambda a: a + scale * a ** (1.0 + alpha_gw) - y,
        0.0,
        0.5,
        xtol=INVERSE_TOLERANCE,
    )


def _branch_entries(preimages, bins):
    """
    (source bin, target bin, normalized length) of one increasing branch.

    `preimages` are the branch inverses of the B + 1 bin edges; between two
    consecutive breakpoints both the source and the target bin are constant.
    """
    edges = np.arange(bins + 1) / bins
    inner = edges[(edges > preimages[0]) & (edges < preimages[-1])]
    points = np.union1d(preimages, inner)
    left, right = points[:-1], points[1:]
    keep = right > left
    left, right = left[keep], right[keep]
    middle = 0.5 * (left + right)
    source = np.minimum((middle * bins).astype(np.int64), bins - 1)
    target = np.clip(
        np.searchsorted(preimages, middle, side="right") - 1, 0, bins - 1
    )
    return source, target, (right - left) * bins


def ulam_build(map_id, bins=DEFAULT_BINS):
    """
    Ulam matrix of the doubling map or a Gaspard-Wang map.

    Entry (b, b') is the fraction of bin b mapped into bin b', computed
    from the branch inverses of the bin edges: x/2 and (x+1)/2 for the
    doubling map, the bisected left inverse and (x+1)/2 for Gaspard-Wang.
    """
    if bins < 2:
        raise InvalidInputError("bins must be at least 2.", loc=["bins"])
    kind, alpha_gw = parse_map_id(map_id)
    edges = np.arange(bins + 1) / bins
    if kind == "doubling":
        left_branch = edges / 2.0
    else:
        left_branch = np.array(
            [_gw_left_inverse(y, alpha_gw) for y in edges]
        )
    right_branch = (edges + 1.0) / 2.0
    parts = [_branch_entries(left_branch, bins),
             _branch_entries(right_branch, bins)]
    source = np.concatenate([part[0] for part in parts])
    target = np.concatenate([part[1] for part in parts])
    lengths = np.concatenate([part[2] for part in parts])
    matrix = sparse.coo_matrix(
        (lengths, (source, target)), shape=(bins, bins)
    ).tocsr()
    label = "doubling" if kind == "doubling" else f"gw({alpha_gw})"
    operator = UlamOperator(bins=int(bins), matrix=matrix, map_id=label)
    logger.debug(
        "Ulam operator %s: %d bins, %d nonzeros, row sum error %.2e",
        label, bins, matrix.nnz, np.max(np.abs(operator.row_sums() - 1.0)),
    )
    return operator


def ulam_invariant(op, tolerance=POWER_TOLERANCE, max_steps=POWER_MAX_STEPS):
    """
    Leading eigenvector h of the discretized operator, as bin masses.

    Power iteration from the uniform density until successive iterates are
    within `tolerance` in L1.

    Raises:
        ConvergenceError: If that does not happen within max_steps.
    """
    current = np.full(op.bins, 1.0 / op.bins)
    for step in range(1, int(max_steps) + 1):
        following = op.push(current)
        following /= following.sum()
        if np.abs(following - current).sum() <= tolerance:
            logger.debug("Power iteration converged after %d steps", step)
            return following
        current = following
    raise ConvergenceError(
        f"Power iteration did not reach {tolerance:.0e} in {max_steps} "
        "steps.",
        loc=["bins"],
        ctx={"max_steps": max_steps},
    )


def ramp_density(bins):
    """Bin masses of the density 2x."""
    b = np.arange(bins)
    return (2.0 * b + 1.0) / bins**2


def ulam_decay(op, initial=None, k_max=50, h=None):
    """
    Estimated decay function p(k) = ||L^k initial - h||_1, k = 0..k_max.

    The default start is the linear ramp 2x, not a smoothed point mass. For
    the doubling map on 2^j dyadic bins it gives p(k) = 2^{-k} / 2 exactly
    until the uniform density is reached after j steps.

    Args:
        op (UlamOperator): The discretized transfer operator.
        initial: Bin masses summing to 1; defaults to the ramp 2x.
        k_max (int): Last iterate.
        h: Invariant masses; computed with ulam_invariant when omitted.

    Returns:
        np.ndarray: The estimates p(0), ..., p(k_max).
    """
    if initial is None:
        initial = ramp_density(op.bins)
    initial = np.asarray(initial, dtype=float)
    if initial.shape != (op.bins,):
        raise InvalidInputError(
            f"Initial density needs {op.bins} bin masses.", loc=["initial"]
        )
    if np.any(initial < 0) or abs(initial.sum() - 1.0) > 1e-10:
        raise InvalidInputError(
            "Initial density must be non-negative and sum to 1.",
            loc=["initial"],
        )
    if k_max < 0:
        raise InvalidInputError("k_max must be non-negative.", loc=["k_max"])
    if h is None:
        h = ulam_invariant(op)
    decay = np.empty(int(k_max) + 1)
    current = initial
    for k in range(int(k_max) + 1):
        decay[k] = np.abs(current - h).sum()
        current = op.push(current)
    return decay


def ulam_fit_decay(p_table, k_lo=2, k_hi=20, floor=DECAY_FLOOR):
    """
    Log-linear fit of p(k) over k in [k_lo, k_hi], ignoring entries at or
    below the numerical floor.

    Returns:
        tuple: (slope, r_squared, points used).
    """
    p_table = np.asarray(p_table, dtype=float)
    ks = np.arange(p_table.size)
    used = (ks >= k_lo) & (ks <= k_hi) & (p_table > floor)
    if used.sum() < 2:
        raise InvalidInputError(
            f"Fewer than two decay values above {floor:.0e} in "
            f"[{k_lo}, {k_hi}].",
            loc=["p_table"],
        )
    slope, _, r_squared = log_linear_fit(ks[used], p_table[used])
    return slope, r_squared, int(used.sum())
