"""
Cylinder words, their recurrence times, outer approximations A^(w) and
cylinder-measure oracles.

Exact oracles (product and Markov measures) work with the transition
structure directly; the empirical oracle reads sliding-window frequencies off
a reference orbit.
"""

import itertools
import logging
import math

import numpy as np

from returnlab.dynamics import markov_path
from returnlab.exceptions import (
    EnumerationCapError,
    InvalidInputError,
    UnsatisfiableConstraintError,
)
from returnlab.models.measure import BernoulliProduct, Empirical, MarkovChain
from returnlab.models.systems import SftSystem
from returnlab.models.word import SelectedCylinder, Word
from returnlab.utils.markov_utils import gap_matrix
from returnlab.utils.rng_utils import make_rng


logger = logging.getLogger(__name__)

ENUMERATION_CAP = 2**16
WORD_LIST_CAP = 2**20
MAX_REJECTION_RATE = 0.999
MIN_SELECTION_ATTEMPTS = 1000
# Overlapping windows of one orbit are not independent
EMPIRICAL_VARIANCE_INFLATION = 2.0


def as_word(word):
    """Accept a Word, its plain-string form or a symbol sequence."""
    if isinstance(word, Word):
        return word
    if isinstance(word, str):
        return Word.parse(word)
    return Word(tuple(word))


def parse_word(text):
    return Word.parse(text)


def format_word(word, alphabet_size=None):
    return as_word(word).format(alphabet_size)


def admissibility_matrix(system):
    """
    Boolean matrix of allowed transitions, or None for the full shift.

    Args:
        system: None (full shift), an SftSystem, a measure model, or a 0/1
        matrix.
    """
    if system is None:
        return None
    if isinstance(system, SftSystem):
        return system.transition > 0
    if isinstance(system, MarkovChain):
        return system.matrix > 0
    if isinstance(system, BernoulliProduct):
        return np.tile(system.weights > 0, (system.alphabet_size, 1))
    if isinstance(system, Empirical):
        return None
    matrix = np.asarray(system)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(
            "Admissibility context must be a square matrix.", loc=["system"]
        )
    return matrix > 0


def is_admissible(word, system=None):
    """True if every symbol exists and every adjacent pair is allowed."""
    allowed = admissibility_matrix(system)
    symbols = as_word(word).as_array()
    if allowed is None:
        return True
    if symbols.max() >= allowed.shape[0]:
        return False
    return bool(allowed[symbols[:-1], symbols[1:]].all())


def _require_admissible(word, system):
    if not is_admissible(word, system):
        raise InvalidInputError(
            f"Word {word} is not admissible and names the empty set.",
            loc=["word"],
        )


def _overlaps(symbols, shift):
    """symbols[i + shift] == symbols[i] for all valid i."""
    return symbols[shift:] == symbols[: len(symbols) - shift]


def recurrence_time(word, system=None):
    """
    Smallest j >= 1 with A intersecting T^{-j} A.

    For j < n this is the self-overlap rule. For j >= n the cylinder meets
    its shifted copy iff there is an admissible path of j - n + 1 steps from
    the last symbol back to the first.

    Raises:
        InvalidInputError: If the word is inadmissible or no finite
        recurrence time exists (the word's ends sit in non-communicating
        classes).
    """
    word = as_word(word)
    _require_admissible(word, system)
    symbols = word.symbols
    n = word.n
    allowed = admissibility_matrix(system)

    for shift in range(1, n):
        if _overlaps(symbols, shift):
            merged = symbols + symbols[n - shift:]
            if allowed is None or is_admissible(merged, allowed):
                return shift

    if allowed is None:
        return n
    last, first = symbols[-1], symbols[0]
    step = allowed.astype(np.int64)
    reach = step.copy()
    # Shortest path, if any, has at most alphabet_size steps
    for steps in range(1, allowed.shape[0] + 1):
        if reach[last, first]:
            return n + steps - 1
        reach = ((reach @ step) > 0).astype(np.int64)
    raise InvalidInputError(
        f"Word {word} has no finite recurrence time: its last symbol cannot "
        "reach its first.",
        loc=["word"],
    )


def outer_cylinder(word, w):
    """A^(w): the smallest w-cylinder in final coordinates containing A."""
    word = as_word(word)
    if not 1 <= w <= word.n:
        raise InvalidInputError(
            f"w must lie in [1, {word.n}].", loc=["w"]
        )
    return word.suffix(w)


def occurrence_mask(symbols, word):
    """
    Boolean mask over start positions p with symbols[p:p+n] == word.

    A linear scan: one comparison pass per word symbol.
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    pattern = as_word(word).as_array()
    starts = symbols.size - pattern.size + 1
    if starts <= 0:
        return np.zeros(0, dtype=bool)
    mask = symbols[:starts] == pattern[0]
    for offset in range(1, pattern.size):
        mask &= symbols[offset:offset + starts] == pattern[offset]
    return mask


def _check_alphabet(word, alphabet_size):
    if max(word.symbols) >= alphabet_size:
        raise InvalidInputError(
            f"Word {word} uses a symbol outside the alphabet of size "
            f"{alphabet_size}.",
            loc=["word"],
        )


def measure(word, model):
    """
    Cylinder measure mu(A).

    Bernoulli: product of weights. Markov: pi(s_0) * prod P[s_i][s_{i+1}],
    with probability-zero paths returning 0. Empirical: sliding-window
    frequency in the reference stream.
    """
    word = as_word(word)
    symbols = word.as_array()
    if isinstance(model, BernoulliProduct):
        _check_alphabet(word, model.alphabet_size)
        return float(np.prod(model.weights[symbols]))
    if isinstance(model, MarkovChain):
        _check_alphabet(word, model.alphabet_size)
        steps = model.matrix[symbols[:-1], symbols[1:]]
        return float(model.stationary[symbols[0]] * np.prod(steps))
    if isinstance(model, Empirical):
        mask = occurrence_mask(model.reference.symbols, word)
        if mask.size == 0:
            raise InvalidInputError(
                "Reference stream is shorter than the word.",
                loc=["reference"],
            )
        return float(mask.mean())
    raise InvalidInputError(
        f"Unknown measure model {type(model).__name__}.", loc=["model"]
    )


def empirical_standard_error(mu, windows):
    """Standard error quoted for an empirical measure over `windows` windows."""
    return math.sqrt(EMPIRICAL_VARIANCE_INFLATION * mu * (1.0 - mu) / windows)


def enumerate_words(n, alphabet_size, transition=None):
    """
    All admissible words of length n.

    Raises:
        EnumerationCapError: If alphabet_size**n exceeds 2**20.
    """
    if n < 1 or alphabet_size < 1:
        raise InvalidInputError(
            "Word length and alphabet size must be positive.", loc=["n"]
        )
    if alphabet_size**n > WORD_LIST_CAP:
        raise EnumerationCapError(
            f"{alphabet_size}**{n} words exceed the cap {WORD_LIST_CAP}.",
            loc=["n"],
            ctx={"cap": WORD_LIST_CAP},
        )
    words = (
        Word(symbols)
        for symbols in itertools.product(range(alphabet_size), repeat=n)
    )
    return [word for word in words if is_admissible(word, transition)]


def _sample_word(model, n, rng):
    if isinstance(model, BernoulliProduct):
        return rng.choice(model.alphabet_size, size=n, p=model.weights)
    if isinstance(model, MarkovChain):
        return markov_path(model.matrix, model.stationary, n, rng)
    if isinstance(model, Empirical):
        reference = model.reference.symbols
        if reference.size < n:
            raise InvalidInputError(
                "Reference stream is shorter than the word.",
                loc=["reference"],
            )
        start = int(rng.integers(0, reference.size - n + 1))
        return reference[start:start + n]
    raise InvalidInputError(
        f"Unknown measure model {type(model).__name__}.", loc=["model"]
    )


def select_test_cylinders(
    n, how_many, model, seed, constraint=None, system=None, distinct=True
):
    """
    Sample words of length n from the model with r_A above a threshold.

    Args:
        n (int): Word length, at least 2.
        how_many (int): Number of cylinders to return.
        model: Measure model the words are drawn from.
        seed (int): RNG seed.
        constraint (float): Words need r_A > constraint (default n / 2).
        system: Admissibility context for recurrence times.
        distinct (bool): Repeated words count as rejections.

    Returns:
        list[SelectedCylinder]: Accepted words with mu(A) and r_A.

    Raises:
        UnsatisfiableConstraintError: If more than 99.9% of candidates are
        rejected.
    """
    if n < 2:
        raise InvalidInputError("n must be at least 2.", loc=["n"])
    if how_many < 1:
        raise InvalidInputError(
            "how_many must be positive.", loc=["how_many"]
        )
    if constraint is None:
        constraint = n / 2
    if system is None and isinstance(model, MarkovChain):
        system = model
    rng = make_rng(seed)

    accepted = []
    seen = set()
    attempts = 0
    rejected = 0
    while len(accepted) < how_many:
        attempts += 1
        word = Word(tuple(_sample_word(model, n, rng)))
        mu = measure(word, model)
        keep = mu > 0 and is_admissible(word, system)
        if keep and distinct and word in seen:
            keep = False
        if keep:
            r_A = recurrence_time(word, system)
            keep = r_A > constraint
        if keep:
            accepted.append(SelectedCylinder(word, mu, r_A))
            seen.add(word)
        else:
            rejected += 1
        if (
            attempts >= MIN_SELECTION_ATTEMPTS
            and rejected / attempts > MAX_REJECTION_RATE
        ):
            raise UnsatisfiableConstraintError(
                f"Rejected {rejected} of {attempts} candidates: r_A > "
                f"{constraint} is unsatisfiable at n = {n}.",
                loc=["constraint"],
                ctx={"n": n, "attempts": attempts, "accepted": len(accepted)},
            )
    logger.debug(
        "Selected %d cylinders of length %d after %d attempts",
        how_many, n, attempts,
    )
    return accepted


def _exact_chain(model):
    if not isinstance(model, (BernoulliProduct, MarkovChain)):
        raise InvalidInputError(
            "Exact joint measures need a Bernoulli or Markov model.",
            loc=["model"],
        )
    return model.chain()


def self_intersection_measure(word, k, model):
    """
    Exact mu(A intersect T^{-k} A).

    For k < n the two copies overlap and the set is the cylinder of the
    merged word (empty if the overlap disagrees). For k >= n the copies are
    joined through the (k - n + 1)-step transition matrix.
    """
    word = as_word(word)
    if k < 1:
        raise InvalidInputError("k must be at least 1.", loc=["k"])
    matrix, stationary = _exact_chain(model)
    n = word.n
    if k < n:
        if not _overlaps(word.symbols, k):
            return 0.0
        return measure(Word(word.symbols + word.symbols[n - k:]), model)
    mu = measure(word, model)
    first, last = word.symbols[0], word.symbols[-1]
    bridge = gap_matrix(matrix, k - n + 1)[last, first]
    return float(mu * bridge * mu / stationary[first])


def _continuation_hits(word, model, horizon, shifts):
    """
    P_A(T^j x in A for some j in shifts), enumerating `horizon` more symbols.
    """
    matrix, _ = _exact_chain(model)
    alphabet = matrix.shape[0]
    _check_alphabet(word, alphabet)
    if horizon <= 0:
        return 0.0
    if alphabet**horizon > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"{alphabet}**{horizon} continuations exceed the cap "
            f"{ENUMERATION_CAP}.",
            loc=["t"],
            ctx={"cap": ENUMERATION_CAP},
        )
    n = word.n
    pattern = word.as_array()
    tails = np.array(
        list(itertools.product(range(alphabet), repeat=horizon)),
        dtype=np.int64,
    )
    paths = np.hstack([np.tile(pattern, (tails.shape[0], 1)), tails])
    weights = matrix[paths[:, n - 1:-1], paths[:, n:]].prod(axis=1)
    hit = np.zeros(paths.shape[0], dtype=bool)
    for shift in shifts:
        hit |= (paths[:, shift:shift + n] == pattern).all(axis=1)
    return float(weights[hit].sum())


def return_probability_exact(word, t, model):
    """Exact P_A(tau_A <= t) by enumerating every continuation of t symbols."""
    word = as_word(word)
    if t < 0:
        raise InvalidInputError("t must be non-negative.", loc=["t"])
    return _continuation_hits(word, model, int(t), range(1, int(t) + 1))


def shifted_return_probability_exact(word, M, model):
    """Exact P_A(tau_A o T^{n-1} <= M): returns counted from time n - 1 on."""
    word = as_word(word)
    if M < 0:
        raise InvalidInputError("M must be non-negative.", loc=["M"])
    n = word.n
    if M == 0:
        return 0.0
    shifts = range(n, n + int(M))
    return _continuation_hits(word, model, n - 1 + int(M), shifts)
