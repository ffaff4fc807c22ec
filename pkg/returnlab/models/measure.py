from dataclasses import dataclass, field

import numpy as np

from returnlab.exceptions import InvalidInputError
from returnlab.models.stream import SymbolStream
from returnlab.utils.markov_utils import (
    ROW_TOLERANCE,
    check_stochastic,
    stationary_distribution,
)


@dataclass
class BernoulliProduct:
    """
    Model representing an i.i.d. product measure on symbol sequences.

    Attributes:
        weights (np.ndarray): Probability of each symbol, summing to 1.
    """

    weights: np.ndarray
    kind = "bernoulli"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or self.weights.size < 1:
            raise InvalidInputError(
                "Weights must be a non-empty vector.", loc=["weights"]
            )
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > (
            ROW_TOLERANCE
        ):
            raise InvalidInputError(
                "Weights must be non-negative and sum to 1 within 1e-12.",
                loc=["weights"],
            )

    @property
    def alphabet_size(self):
        return int(self.weights.size)

    def chain(self):
        """The product measure seen as a Markov chain (P, pi)."""
        matrix = np.tile(self.weights, (self.alphabet_size, 1))
        return matrix, self.weights.copy()

    def to_dict(self):
        return {"kind": self.kind, "weights": self.weights.tolist()}


@dataclass
class MarkovChain:
    """
    Model representing a stationary Markov measure on symbol sequences.

    Attributes:
        matrix (np.ndarray): Row-stochastic transition matrix P.
        stationary (np.ndarray): Stationary vector pi (computed when omitted).
    """

    matrix: np.ndarray
    stationary: np.ndarray = field(default=None)
    kind = "markov"

    def __post_init__(self):
        self.matrix = check_stochastic(self.matrix, name="matrix")
        if self.stationary is None:
            self.stationary = stationary_distribution(self.matrix)
        self.stationary = np.asarray(self.stationary, dtype=float)
        if self.stationary.shape != (self.matrix.shape[0],) or abs(
            self.stationary.sum() - 1.0
        ) > ROW_TOLERANCE:
            raise InvalidInputError(
                "Stationary vector must match the matrix and sum to 1.",
                loc=["stationary"],
            )

    @property
    def alphabet_size(self):
        return int(self.matrix.shape[0])

    def chain(self):
        return self.matrix, self.stationary

    def to_dict(self):
        return {
            "kind": self.kind,
            "matrix": self.matrix.tolist(),
            "stationary": self.stationary.tolist(),
        }


@dataclass
class Empirical:
    """
    Model representing cylinder frequencies read off a reference orbit.

    Attributes:
        reference (SymbolStream): The stream whose sliding-window frequencies
        stand in for mu.
    """

    reference: SymbolStream
    kind = "empirical"

    def __post_init__(self):
        if self.reference.length < 1:
            raise InvalidInputError(
                "Empirical model needs a non-empty reference stream.",
                loc=["reference"],
            )

    @property
    def alphabet_size(self):
        if self.reference.alphabet_size is not None:
            return self.reference.alphabet_size
        return int(self.reference.symbols.max()) + 1

    def chain(self):
        raise InvalidInputError(
            "Empirical models have no exact transition structure.",
            loc=["model"],
        )

    def to_dict(self):
        return {"kind": self.kind, "reference": self.reference.to_dict()}


def fair_coin():
    """Lebesgue measure on binary itineraries of the doubling map."""
    return BernoulliProduct(np.array([0.5, 0.5]))
