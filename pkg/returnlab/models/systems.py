from dataclasses import dataclass, field

import numpy as np

from returnlab.exceptions import InvalidInputError
from returnlab.utils.markov_utils import (
    ROW_TOLERANCE,
    check_stochastic,
    stationary_distribution,
)


@dataclass
class SftSystem:
    """
    Model representing a one-sided subshift of finite type with the
    stationary Markov chain it is sampled from.

    Attributes:
        transition (np.ndarray): m x m matrix M with entries in {0, 1}.
        sampling_chain (np.ndarray): m x m row-stochastic matrix P with
        P[i][j] > 0 only where M[i][j] = 1.
        stationary (np.ndarray): Probability vector fixed by P, computed on
        construction.
    """

    transition: np.ndarray
    sampling_chain: np.ndarray
    stationary: np.ndarray = field(init=False)

    def __post_init__(self):
        self.transition = np.asarray(self.transition, dtype=np.int64)
        if self.transition.ndim != 2 or (
            self.transition.shape[0] != self.transition.shape[1]
        ):
            raise InvalidInputError(
                "Transition matrix must be square.", loc=["transition"]
            )
        if not np.isin(self.transition, (0, 1)).all():
            raise InvalidInputError(
                "Transition matrix entries must be 0 or 1.",
                loc=["transition"],
            )
        self.sampling_chain = check_stochastic(
            self.sampling_chain, name="sampling_chain"
        )
        if self.sampling_chain.shape != self.transition.shape:
            raise InvalidInputError(
                "Sampling chain and transition matrix sizes differ.",
                loc=["sampling_chain"],
            )
        if np.any((self.sampling_chain > 0) & (self.transition == 0)):
            raise InvalidInputError(
                "Sampling chain puts mass on a forbidden transition.",
                loc=["sampling_chain"],
            )
        self.stationary = stationary_distribution(self.sampling_chain)
        residual = np.abs(self.stationary @ self.sampling_chain - self.stationary)
        if residual.max() > ROW_TOLERANCE:
            raise InvalidInputError(
                "Stationary vector does not solve pi P = pi within 1e-12.",
                loc=["sampling_chain"],
            )

    @property
    def alphabet_size(self):
        return int(self.transition.shape[0])

    def is_admissible(self, symbols):
        """True if every adjacent pair of symbols is allowed by M."""
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.size and (
            symbols.min() < 0 or symbols.max() >= self.alphabet_size
        ):
            return False
        if symbols.size < 2:
            return True
        return bool(self.transition[symbols[:-1], symbols[1:]].all())

    def to_dict(self):
        """
        Converts the system into a dictionary format.

        Returns:
            dict: The system attributes with keys 'transition',
                  'sampling_chain' and 'stationary'.
        """
        return {
            "transition": self.transition.tolist(),
            "sampling_chain": self.sampling_chain.tolist(),
            "stationary": self.stationary.tolist(),
        }


@dataclass
class GwSystem:
    """
    Model representing the Gaspard-Wang map with its precomputed partition.

    Attributes:
        alpha_gw (float): Intermittency exponent in (0, 1).
        boundaries (np.ndarray): Decreasing ladder a_0 = 1/2 > a_1 > ... >
        a_{i_max}, where A_0 = (1/2, 1] and A_i = (a_i, a_{i-1}].
    """

    alpha_gw: float
    boundaries: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.alpha_gw < 1.0:
            raise InvalidInputError(
                "Gaspard-Wang exponent must lie in (0, 1).", loc=["alpha_gw"]
            )
        self.boundaries = np.asarray(self.boundaries, dtype=float)
        if self.boundaries.size < 2 or self.boundaries[0] != 0.5:
            raise InvalidInputError(
                "Ladder must start at a_0 = 1/2 and hold at least a_1.",
                loc=["boundaries"],
            )
        if np.any(np.diff(self.boundaries) >= 0) or self.boundaries[-1] <= 0:
            raise InvalidInputError(
                "Ladder must be strictly decreasing inside (0, 1/2].",
                loc=["boundaries"],
            )

    @property
    def i_max(self):
        return int(self.boundaries.size - 1)

    @property
    def depth_limit(self):
        """The deepest precomputed boundary a_{i_max}."""
        return float(self.boundaries[-1])

    def to_dict(self):
        return {
            "alpha_gw": self.alpha_gw,
            "i_max": self.i_max,
            "depth_limit": self.depth_limit,
        }
