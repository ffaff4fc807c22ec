"""
Observables of a symbolic orbit: visit counts W_m, k-th return times, the
gap split of W_m around a time i, empirical laws harvested from simulated
systems, and their distances to the Poisson and Erlang limits.
"""

import logging
import math

import numpy as np
from scipy import stats

from returnlab.cylinders import (
    as_word,
    measure,
    occurrence_mask,
    recurrence_time,
)
from returnlab.exceptions import InvalidInputError, SimulationError
from returnlab.models.visit import (
    COUNT_LAW,
    RESCALED_RETURN_LAW,
    EmpiricalLaw,
    ReturnTimes,
    VisitRecord,
)
from returnlab.stein import erlang_tail, poisson_pmf_array
from returnlab.utils.report_utils import atomic_write, csv_text
from returnlab.utils.rng_utils import make_rng


logger = logging.getLogger(__name__)

TV_TAIL = 1e-12
BATCH_ELEMENTS = 2**22
MIN_CHUNK = 64
MAX_CHUNK = 2**16
# Blocks longer than this multiple of k / mu(A) are treated as a failure
MAX_BLOCK_FACTOR = 1000
STREAM_MARGIN = 1.2


def default_t_grid():
    """30 log-spaced points in [0.05, 5]."""
    return np.geomspace(0.05, 5.0, 30)


def _symbols(stream):
    return np.asarray(getattr(stream, "symbols", stream), dtype=np.int64)


def count_visits(stream, word, m):
    """
    W_m: hits at times j in [1, m], where T^j x lies in A iff
    stream[j:j+n] equals the word. Overlapping hits all count.

    Raises:
        InvalidInputError: If the stream is shorter than m + n.
    """
    word = as_word(word)
    symbols = _symbols(stream)
    if m < 0:
        raise InvalidInputError("m must be non-negative.", loc=["m"])
    if symbols.size < m + word.n:
        raise InvalidInputError(
            f"Stream of length {symbols.size} is shorter than m + n = "
            f"{m + word.n}.",
            loc=["stream"],
        )
    if m == 0:
        return VisitRecord(word, 0, np.zeros(0, dtype=np.int64))
    mask = occurrence_mask(symbols[1:m + word.n], word)
    return VisitRecord(word, m, np.flatnonzero(mask) + 1)


def return_times(stream, word, k_max, start_in_A=False):
    """
    Successive entrance times tau^1 < tau^2 < ... up to k_max of them.

    With start_in_A the origin is moved to the first occurrence of the word,
    which conditions the orbit on A (return law); otherwise times are
    hitting times from time 0. A stream with fewer hits returns what it has
    with truncated=True.
    """
    word = as_word(word)
    if k_max < 1:
        raise InvalidInputError("k_max must be at least 1.", loc=["k_max"])
    positions = np.flatnonzero(occurrence_mask(_symbols(stream), word))
    if start_in_A:
        if positions.size == 0:
            return ReturnTimes(np.zeros(0, dtype=np.int64), truncated=True)
        times = positions[1:] - positions[0]
    else:
        times = positions[positions >= 1]
    times = times[:k_max]
    return ReturnTimes(times, truncated=times.size < k_max)


def first_hit_time(rows_mask):
    """First hitting time per row (column index + 1), or -1 when absent."""
    found = rows_mask.any(axis=1)
    first = rows_mask.argmax(axis=1) + 1
    return np.where(found, first, -1)


def survival_curve(law, t_grid=None):
    """Fraction of samples strictly above each t of the grid."""
    if t_grid is None:
        t_grid = default_t_grid()
    ordered = np.sort(law.samples)
    above = ordered.size - np.searchsorted(
        ordered, np.asarray(t_grid), side="right"
    )
    return above / ordered.size


def sup_deviation(law, t_grid=None, k=1):
    """sup over the grid of |empirical survival - Erlang tail of order k|."""
    if t_grid is None:
        t_grid = default_t_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    limit = np.array([erlang_tail(t, k) for t in t_grid])
    return float(np.max(np.abs(survival_curve(law, t_grid) - limit)))


def tv_distance(law, t=None):
    """
    Total variation between an empirical count law and Poisson(t).

    t defaults to the sample mean (matched-mean Poisson).
    """
    counts = np.asarray(law.samples)
    if np.any(counts != np.round(counts)):
        raise InvalidInputError(
            "Total variation needs integer counts.", loc=["law"]
        )
    counts = counts.astype(np.int64)
    if t is None:
        t = float(counts.mean())
    if t <= 0:
        raise InvalidInputError(
            "Poisson parameter must be positive.", loc=["t"]
        )
    top = int(max(counts.max(), stats.poisson.isf(TV_TAIL, t)))
    empirical = np.bincount(counts, minlength=top + 1) / counts.size
    poisson = poisson_pmf_array(t, top)
    beyond = float(stats.poisson.sf(top, t))
    return 0.5 * (float(np.abs(empirical - poisson).sum()) + beyond)


def ks_distance(law, reference=None):
    """
    sup |empirical survival - e^{-t}| over the sample points.

    With a reference law the two-sample statistic is returned instead, which
    is 0 for a law against itself.
    """
    if reference is not None:
        return float(stats.ks_2samp(law.samples, reference.samples).statistic)
    return float(stats.kstest(law.samples, "expon").statistic)


def gap_split(record, i, delta):
    """
    Split the hits around time i into four bands.

    Returns:
        tuple: Counts on [1, i-delta-1], [i-delta, i-1], [i+1, i+delta] and
        [i+delta+1, m]. A hit at i itself is left out.
    """
    if not 1 <= i <= record.m:
        raise InvalidInputError(
            f"i must lie in [1, {record.m}].", loc=["i"]
        )
    if delta < 0:
        raise InvalidInputError("delta must be non-negative.", loc=["delta"])
    hits = record.hit_times
    w_minus = int(np.count_nonzero(hits <= i - delta - 1))
    u_minus = int(np.count_nonzero((hits >= i - delta) & (hits <= i - 1)))
    u_plus = int(np.count_nonzero((hits >= i + 1) & (hits <= i + delta)))
    w_plus = int(np.count_nonzero(hits >= i + delta + 1))
    return w_minus, u_minus, u_plus, w_plus


def neighbor_frequencies(record, delta):
    """
    Frequencies of hits with another hit at most delta steps before (b-)
    and after (b+).

    Only hits in [delta + 1, m - delta] are scored, so both neighbourhoods
    lie inside the window; frequencies are per scored time step.
    """
    if delta < 1:
        raise InvalidInputError("delta must be at least 1.", loc=["delta"])
    interior = record.m - 2 * delta
    if interior < 1:
        raise InvalidInputError(
            "Window too short for this delta.", loc=["delta"]
        )
    hits = record.hit_times
    if hits.size == 0:
        return 0.0, 0.0
    gaps = np.diff(hits)
    has_before = np.concatenate([[False], gaps <= delta])
    has_after = np.concatenate([gaps <= delta, [False]])
    scored = (hits >= delta + 1) & (hits <= record.m - delta)
    b_minus = np.count_nonzero(has_before & scored) / interior
    b_plus = np.count_nonzero(has_after & scored) / interior
    return float(b_minus), float(b_plus)


def kac_statistic(return_samples, mu_A=None):
    """
    mean(tau_A) * mu(A); Kac's lemma puts it at 1 for conditioned returns.

    A rescaled return law already carries the factor mu(A).
    """
    if getattr(return_samples, "kind", None) == RESCALED_RETURN_LAW:
        return return_samples.mean()
    if mu_A is None:
        raise InvalidInputError(
            "Raw return times need mu_A.", loc=["mu_A"]
        )
    samples = np.asarray(return_samples)
    if samples.size == 0:
        raise InvalidInputError(
            "Need at least one return time.", loc=["return_samples"]
        )
    return float(samples.mean() * mu_A)


def _row_occurrences(rows, pattern):
    """Occurrence mask over start columns of every row."""
    n = pattern.size
    starts = rows.shape[1] - n + 1
    mask = rows[:, :starts] == pattern[0]
    for offset in range(1, n):
        mask &= rows[:, offset:offset + starts] == pattern[offset]
    return mask


def _law_metadata(source, word, mu_A, seed, **extra):
    r_A = None
    if source.name != "gw":
        try:
            r_A = recurrence_time(word, source.transition)
        except InvalidInputError:
            logger.warning("Word %s has no finite recurrence time", word)
    return {
        "system": source.name,
        "word": word.format(source.alphabet_size),
        "n": word.n,
        "mu_A": mu_A,
        "r_A": r_A,
        "seed": seed,
        **extra,
    }


def _resolve_mu(source, word, mu_A):
    if mu_A is not None:
        if not 0 < mu_A < 1:
            raise InvalidInputError(
                "mu_A must lie in (0, 1).", loc=["mu_A"]
            )
        return float(mu_A)
    if source.model is None:
        raise InvalidInputError(
            f"The {source.name} source has no exact measure; pass mu_A.",
            loc=["mu_A"],
        )
    mu = measure(word, source.model)
    if mu <= 0:
        raise InvalidInputError(
            f"Word {word} has measure 0.", loc=["word"]
        )
    return mu


def _block_returns(source, pattern, k, rows, rng, chunk, limit):
    """
    k-th return time of `rows` independent orbits started inside A.

    Rows grow in lockstep by `chunk` symbols; each scan keeps the last n - 1
    symbols of the previous one so that occurrences straddling two chunks
    are seen exactly once.
    """
    n = pattern.size
    window = np.hstack(
        [np.tile(pattern, (rows, 1)),
         source.continue_rows(np.full(rows, pattern[-1]), chunk, rng)]
    )
    base = 0
    generated = n + chunk
    found = np.zeros(rows, dtype=np.int64)
    result = np.full(rows, -1, dtype=np.int64)
    active = np.arange(rows)
    origin_pending = True
    while True:
        mask = _row_occurrences(window, pattern)
        if origin_pending:
            # The occurrence at time 0 is the starting cylinder itself
            mask[:, 0] = False
            origin_pending = False
        running = found[:, None] + np.cumsum(mask, axis=1)
        reached = running[:, -1] >= k
        if np.any(reached):
            column = np.argmax(running[reached] >= k, axis=1)
            result[active[reached]] = base + column
        keep = ~reached
        active = active[keep]
        if active.size == 0:
            return result
        if generated > limit:
            raise SimulationError(
                f"No {k}-th return within {limit} steps.",
                loc=["word"],
                ctx={"limit": limit, "unfinished": int(active.size)},
            )
        found = running[keep, -1]
        carry = window[keep, window.shape[1] - (n - 1):]
        fresh = source.continue_rows(window[keep, -1], chunk, rng)
        window = np.hstack([carry, fresh])
        base = generated - (n - 1)
        generated += chunk


def harvest_return_law(
    source, word, k, samples, seed, mode="blocks", mu_A=None
):
    """
    Empirical law of mu(A) tau_A^k under the return law P_A.

    Args:
        source: A symbolic source from returnlab.dynamics.
        word: The cylinder A.
        k (int): Return index.
        samples (int): Number of samples.
        seed (int): RNG seed.
        mode (str): 'blocks' draws one independent orbit started in A per
        sample; 'stream' reads consecutive groups of k returns off one
        stationary orbit.
        mu_A (float): Measure of A, required when the source has no exact
        model.

    Returns:
        EmpiricalLaw: Rescaled return times, with word, n, mu_A, r_A, seed,
        k and mode in its metadata.
    """
    word = as_word(word)
    if k < 1 or samples < 1:
        raise InvalidInputError(
            "k and samples must be at least 1.", loc=["k", "samples"]
        )
    mu = _resolve_mu(source, word, mu_A)
    if mode == "blocks":
        rng = make_rng(seed)
        chunk = int(min(MAX_CHUNK, max(MIN_CHUNK, math.ceil(2 * k / mu))))
        batch = max(1, BATCH_ELEMENTS // chunk)
        limit = MAX_BLOCK_FACTOR * math.ceil(k / mu)
        pattern = word.as_array()
        pieces = []
        remaining = samples
        while remaining:
            rows = min(batch, remaining)
            pieces.append(
                _block_returns(source, pattern, k, rows, rng, chunk, limit)
            )
            remaining -= rows
        times = np.concatenate(pieces)
    elif mode == "stream":
        length = int(
            math.ceil(STREAM_MARGIN * (samples * k + 1) / mu) + 10 / mu
        ) + word.n
        stream = source.stream(length, seed)
        positions = np.flatnonzero(occurrence_mask(stream.symbols, word))
        groups = (positions.size - 1) // k if positions.size else 0
        if groups == 0:
            raise SimulationError(
                f"Word {word} never returned in a stream of {length} steps.",
                loc=["word"],
            )
        if groups < samples:
            logger.warning(
                "Stream held %d return groups of %d requested", groups,
                samples,
            )
        used = min(groups, samples)
        origins = positions[0:used * k:k]
        times = positions[k:used * k + 1:k] - origins
    else:
        raise InvalidInputError(
            f"Unknown harvesting mode {mode!r}.", loc=["mode"]
        )
    metadata = _law_metadata(
        source, word, mu, seed, k=k, mode=mode, samples=int(times.size)
    )
    return EmpiricalLaw(mu * times, RESCALED_RETURN_LAW, metadata)


def harvest_count_law(source, word, m, samples, seed, mode="blocks"):
    """
    Empirical law of W_m under the stationary law P.

    'blocks' draws an independent stationary orbit per sample; 'stream'
    splits one orbit into consecutive windows of m steps.
    """
    word = as_word(word)
    if m < 1 or samples < 1:
        raise InvalidInputError(
            "m and samples must be at least 1.", loc=["m", "samples"]
        )
    n = word.n
    pattern = word.as_array()
    if mode == "blocks":
        rng = make_rng(seed)
        batch = max(1, BATCH_ELEMENTS // (m + n))
        pieces = []
        remaining = samples
        while remaining:
            rows = min(batch, remaining)
            block = source.fresh_rows(rows, m + n, rng)
            pieces.append(_row_occurrences(block[:, 1:], pattern).sum(axis=1))
            remaining -= rows
        counts = np.concatenate(pieces)
    elif mode == "stream":
        stream = source.stream(samples * m + n, seed)
        positions = np.flatnonzero(occurrence_mask(stream.symbols, word))
        positions = positions[(positions >= 1) & (positions <= samples * m)]
        counts = np.bincount((positions - 1) // m, minlength=samples)
    else:
        raise InvalidInputError(
            f"Unknown harvesting mode {mode!r}.", loc=["mode"]
        )
    mu = measure(word, source.model) if source.model is not None else None
    metadata = _law_metadata(
        source, word, mu, seed, m=m, mode=mode, samples=samples
    )
    if mu is not None:
        metadata["t"] = m * mu
    return EmpiricalLaw(counts, COUNT_LAW, metadata)


def hitting_identity(source, word, steps, samples, seed):
    """
    P(tau_A > steps) and P(W_steps = 0) on one stationary ensemble.

    The first is read off first hitting times over a horizon of 2 * steps,
    the second off the visit counts of the first `steps` windows of the
    same rows. On every row the two events agree, so the frequencies
    coincide exactly.
    """
    word = as_word(word)
    steps = int(steps)
    if steps < 1:
        raise InvalidInputError("steps must be at least 1.", loc=["steps"])
    pattern = word.as_array()
    rng = make_rng(seed)
    block = source.fresh_rows(samples, 2 * steps + word.n, rng)
    first = first_hit_time(_row_occurrences(block[:, 1:], pattern))
    survived = float(np.mean((first == -1) | (first > steps)))
    w_steps = _row_occurrences(block[:, 1:steps + word.n], pattern).sum(axis=1)
    empty = float(np.mean(w_steps == 0))
    return survived, empty


def write_law_csv(law, path, metadata=None):
    """
    One sample per row under a 'sample' header, preceded by '# key=value'
    lines with the law's metadata.
    """
    header = dict(law.metadata)
    header.update(metadata or {})
    header["kind"] = law.kind
    if law.kind == COUNT_LAW:
        rows = ([int(value)] for value in law.samples)
    else:
        rows = ([float(value)] for value in law.samples)
    atomic_write(path, csv_text(["sample"], rows, header))
