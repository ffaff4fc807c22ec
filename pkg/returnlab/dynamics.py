"""
Concrete dynamical systems: the doubling map and subshifts of finite type,
simulated exactly on symbols, and the Gaspard-Wang map, iterated in floating
point and read through its countable partition.

The doubling map is never iterated in floating point: 2x mod 1 loses one bit
per step and collapses to 0 after about 53 iterations. Under Lebesgue measure
its binary itinerary is an i.i.d. fair-bit sequence and the shift on bits is
the map itself, so that is what is simulated.
"""

import logging
import math

import numpy as np

from returnlab.exceptions import InvalidInputError, SimulationError
from returnlab.models.measure import BernoulliProduct, MarkovChain, fair_coin
from returnlab.models.stream import SymbolStream
from returnlab.models.systems import GwSystem, SftSystem
from returnlab.utils.rng_utils import make_rng


logger = logging.getLogger(__name__)

LADDER_TOLERANCE = 1e-12


def _check_length(length):
    if int(length) != length or length < 1:
        raise InvalidInputError(
            "Stream length must be a positive integer.", loc=["length"]
        )
    return int(length)


def doubling_stream(length, seed):
    """
    Binary itinerary of the doubling map from a Lebesgue-random point.

    Returns:
        SymbolStream: i.i.d. fair bits, deterministic given the seed.
    """
    length = _check_length(length)
    rng = make_rng(seed)
    symbols = rng.integers(0, 2, size=length, dtype=np.int64)
    return SymbolStream(symbols, alphabet_size=2, seed=seed, system="doubling")


def _next_state_table(matrix, uniforms, states=None):
    """
    Next state for every uniform draw and every possible current state.

    Inverse-CDF sampling row by row: entry [j, s] is the state reached from
    s with the j-th draw. A zero-probability transition owns an empty
    interval of the cumulative row and is never taken.
    """
    cumulative = np.cumsum(matrix, axis=1)
    cumulative[:, -1] = 1.0
    if states is None:
        return (uniforms[:, None, None] >= cumulative[None, :, :]).sum(axis=2)
    return (uniforms[:, None] >= cumulative[states]).sum(axis=1)


def markov_path(matrix, stationary, length, rng, first=None):
    """
    Sample a path of a stationary Markov chain.

    Args:
        matrix (np.ndarray): Row-stochastic transition matrix.
        stationary (np.ndarray): Initial law (used when `first` is None).
        length (int): Number of symbols.
        rng (numpy.random.Generator): Random source.
        first (int): Fixed first symbol, if the path is conditioned.
    """
    size = matrix.shape[0]
    if first is None:
        first = int(rng.choice(size, p=stationary))
    uniforms = rng.random(length - 1)
    # Flat lookup: the successor of s at step j sits at j * size + s
    table = _next_state_table(matrix, uniforms).ravel().tolist()
    path = np.empty(length, dtype=np.int64)
    state = first
    path[0] = state
    offset = 0
    for j in range(1, length):
        state = table[offset + state]
        path[j] = state
        offset += size
    return path


def sft_stream(system, length, seed):
    """
    Itinerary of the shift on an SFT, sampled from the stationary chain.

    Every adjacent pair of the returned stream is admissible, since the
    sampling chain only charges allowed transitions.
    """
    if not isinstance(system, SftSystem):
        raise InvalidInputError(
            "sft_stream needs an SftSystem.", loc=["system"]
        )
    length = _check_length(length)
    rng = make_rng(seed)
    path = markov_path(
        system.sampling_chain, system.stationary, length, rng
    )
    return SymbolStream(
        path, alphabet_size=system.alphabet_size, seed=seed, system="sft"
    )


def gw_step(x, alpha_gw):
    """
    One step of the Gaspard-Wang map.

    T(x) = x + 2^alpha x^(1 + alpha) on [0, 1/2] and 2x - 1 on (1/2, 1].
    """
    if not 0.0 <= x <= 1.0:
        raise InvalidInputError(
            f"Point {x!r} lies outside [0, 1].", loc=["x"]
        )
    if x <= 0.5:
        return min(1.0, x + 2.0**alpha_gw * x ** (1.0 + alpha_gw))
    return 2.0 * x - 1.0


def check_ladder(system, tolerance=LADDER_TOLERANCE):
    """
    Largest back-substitution residual |T(a_i) - a_{i-1}| of a ladder.

    Raises:
        InvalidInputError: If any residual exceeds the tolerance.
    """
    a = system.boundaries
    alpha = system.alpha_gw
    images = a[1:] + 2.0**alpha * a[1:] ** (1.0 + alpha)
    residual = float(np.max(np.abs(images - a[:-1])))
    if residual > tolerance:
        raise InvalidInputError(
            f"Ladder residual {residual:.3e} exceeds {tolerance:.0e}.",
            loc=["boundaries"],
        )
    return residual


def gw_orbit(x0, alpha_gw, length):
    """Floating-point orbit x0, T(x0), ..., T^{length-1}(x0)."""
    if not 0.0 < x0 <= 1.0:
        raise InvalidInputError(
            "Initial point must lie in (0, 1].", loc=["x0"]
        )
    length = _check_length(length)
    scale = 2.0**alpha_gw
    power = 1.0 + alpha_gw
    orbit = np.empty(length)
    x = float(x0)
    for j in range(length):
        orbit[j] = x
        if x <= 0.5:
            x = x + scale * x**power
            if x > 1.0:
                x = 1.0
        else:
            x = 2.0 * x - 1.0
        if x == 1.0 or x == 0.0:
            raise SimulationError(
                f"Orbit collapsed onto the fixed point {x} at step {j + 1}.",
                loc=["x0"],
                ctx={"x0": x0, "step": j + 1},
            )
    return orbit


def classify_gw(points, system):
    """
    Partition indices of points: 0 on (1/2, 1], i on (a_i, a_{i-1}].

    Raises:
        SimulationError: If a point lies at or below a_{i_max}.
    """
    ascending = system.boundaries[::-1]
    points = np.asarray(points, dtype=float)
    below = np.searchsorted(ascending, points, side="left")
    symbols = system.boundaries.size - below
    too_deep = symbols > system.i_max
    if np.any(too_deep):
        first = int(np.flatnonzero(too_deep)[0])
        raise SimulationError(
            f"Point {points[first]:.3e} lies below the deepest boundary "
            f"a_{system.i_max} = {system.depth_limit:.3e}; precompute a "
            "deeper ladder.",
            loc=["i_max"],
            ctx={"step": first},
        )
    return symbols.astype(np.int64)


def gw_itinerary(x0, alpha_gw, length, boundaries):
    """
    Itinerary of the Gaspard-Wang orbit of x0 against the partition {A_i}.

    Symbol j at step k means T^k(x0) lies in A_j.
    """
    if not isinstance(boundaries, GwSystem):
        raise InvalidInputError(
            "Boundaries must be a precomputed GwSystem.", loc=["boundaries"]
        )
    if not math.isclose(boundaries.alpha_gw, alpha_gw):
        raise InvalidInputError(
            "Ladder was computed for a different exponent.", loc=["alpha_gw"]
        )
    orbit = gw_orbit(x0, alpha_gw, length)
    return SymbolStream(classify_gw(orbit, boundaries), system="gw")


class DoublingSource:
    """Exact symbolic source for the doubling map (fair coin)."""

    name = "doubling"

    def __init__(self):
        self.model = fair_coin()
        self.alphabet_size = 2
        self.transition = None

    def stream(self, length, seed):
        return doubling_stream(length, seed)

    def continue_rows(self, last, length, rng):
        return rng.integers(0, 2, size=(last.size, length), dtype=np.int64)

    def fresh_rows(self, rows, length, rng):
        return rng.integers(0, 2, size=(rows, length), dtype=np.int64)


class SftSource:
    """Exact symbolic source for an SFT sampled from its Markov chain."""

    name = "sft"

    def __init__(self, system):
        self.system = system
        self.model = MarkovChain(system.sampling_chain, system.stationary)
        self.alphabet_size = system.alphabet_size
        self.transition = system.transition

    def stream(self, length, seed):
        return sft_stream(self.system, length, seed)

    def continue_rows(self, last, length, rng):
        """Continue one chain per row from its last symbol, column by column."""
        matrix = self.system.sampling_chain
        rows = np.empty((last.size, length), dtype=np.int64)
        state = np.asarray(last, dtype=np.int64)
        uniforms = rng.random((length, last.size))
        for col in range(length):
            state = _next_state_table(matrix, uniforms[col], states=state)
            rows[:, col] = state
        return rows

    def fresh_rows(self, rows, length, rng):
        """Independent stationary rows: first symbol drawn from pi."""
        first = rng.choice(
            self.alphabet_size, size=rows, p=self.system.stationary
        )
        if length == 1:
            return first[:, None].astype(np.int64)
        rest = self.continue_rows(first, length - 1, rng)
        return np.hstack([first[:, None].astype(np.int64), rest])


class BernoulliSource:
    """Exact symbolic source for a general product measure."""

    name = "bernoulli"

    def __init__(self, model):
        if not isinstance(model, BernoulliProduct):
            raise InvalidInputError(
                "BernoulliSource needs a BernoulliProduct model.",
                loc=["model"],
            )
        self.model = model
        self.alphabet_size = model.alphabet_size
        self.transition = None

    def stream(self, length, seed):
        length = _check_length(length)
        rng = make_rng(seed)
        symbols = rng.choice(self.alphabet_size, size=length, p=self.model.weights)
        return SymbolStream(
            symbols, alphabet_size=self.alphabet_size, seed=seed,
            system="bernoulli",
        )

    def continue_rows(self, last, length, rng):
        return rng.choice(
            self.alphabet_size, size=(last.size, length), p=self.model.weights
        ).astype(np.int64)

    def fresh_rows(self, rows, length, rng):
        return self.continue_rows(np.empty(rows), length, rng)


class GwSource:
    """
    Floating-point source for the Gaspard-Wang map.

    There is no exact way to start inside a cylinder, so only stationary
    stream harvesting is available. Orbits start from a uniform point and
    discard a burn-in before recording.
    """

    name = "gw"

    def __init__(self, system, burn_in=1000):
        self.system = system
        self.model = None
        self.alphabet_size = None
        self.transition = None
        self.burn_in = int(burn_in)

    def stream(self, length, seed):
        length = _check_length(length)
        rng = make_rng(seed)
        x0 = 1.0 - rng.random()
        orbit = gw_orbit(x0, self.system.alpha_gw, length + self.burn_in)
        symbols = classify_gw(orbit[self.burn_in:], self.system)
        return SymbolStream(symbols, seed=seed, system="gw")

    def continue_rows(self, last, length, rng):
        raise InvalidInputError(
            "Independent-block harvesting needs an exact symbolic source; "
            "use stream mode for the Gaspard-Wang map.",
            loc=["mode"],
        )

    def fresh_rows(self, rows, length, rng):
        return self.continue_rows(None, length, rng)
