from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from returnlab.exceptions import InvalidInputError


@dataclass
class TowerSpec:
    """
    Model representing a Markov (Young) tower by its base branches.

    Attributes:
        branch_weights (np.ndarray): Probabilities nu_i of the base sets
        Omega_{0,i}, renormalized over the truncation.
        return_times (np.ndarray): Return time R_i >= 1 of each branch.
        truncation_mass (float): Base mass lost by truncating the branches.
        tail_exponent (float): Exponent b with nu(R > n) ~ n**(-b) when the
        tower comes from a map with a known polynomial tail, else None.
        label (str): Name of the tower (e.g., 'gaspard_wang(0.25)').
    """

    branch_weights: np.ndarray
    return_times: np.ndarray
    truncation_mass: float = 0.0
    tail_exponent: Optional[float] = None
    label: str = "tower"

    def __post_init__(self):
        self.branch_weights = np.asarray(self.branch_weights, dtype=float)
        self.return_times = np.asarray(self.return_times, dtype=np.int64)
        if (
            self.branch_weights.ndim != 1
            or self.branch_weights.size == 0
            or self.branch_weights.shape != self.return_times.shape
        ):
            raise InvalidInputError(
                "Each branch needs exactly one weight and one return time.",
                loc=["branches"],
            )
        if np.any(self.branch_weights < 0) or abs(
            self.branch_weights.sum() - 1.0
        ) > 1e-12:
            raise InvalidInputError(
                "Branch weights must be non-negative and sum to 1.",
                loc=["branches", "weight"],
            )
        if np.any(self.return_times < 1):
            raise InvalidInputError(
                "Return times must be at least 1.",
                loc=["branches", "return_time"],
            )

    @property
    def mean_return(self):
        """E[R] = sum_i nu_i R_i."""
        return float(self.branch_weights @ self.return_times)

    @property
    def integrable(self):
        return self.tail_exponent is None or self.tail_exponent > 1.0

    def tail(self, j):
        """nu(R > j)."""
        return float(self.branch_weights[self.return_times > j].sum())

    def to_dict(self):
        """
        Converts the tower into a dictionary format.

        Returns:
            dict: The tower attributes with keys 'label', 'branches',
                  'mean_return', 'truncation_mass' and 'tail_exponent'.
        """
        return {
            "label": self.label,
            "branches": int(self.branch_weights.size),
            "mean_return": self.mean_return,
            "truncation_mass": self.truncation_mass,
            "tail_exponent": self.tail_exponent,
        }


@dataclass
class UlamOperator:
    """
    Model representing the Ulam discretization of a transfer operator.

    Attributes:
        bins (int): Number B of equal bins of [0, 1].
        matrix (scipy.sparse.csr_matrix): Row-stochastic B x B matrix; entry
        (b, b') is the fraction of bin b mapped into bin b'.
        map_id (str): The discretized map ('doubling' or 'gw(<alpha>)').
    """

    bins: int
    matrix: sparse.csr_matrix
    map_id: str

    def push(self, mass):
        """One step of the discretized transfer operator on bin masses."""
        return self.matrix.T @ mass

    def row_sums(self):
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def to_dict(self):
        return {
            "bins": self.bins,
            "map_id": self.map_id,
            "nonzeros": int(self.matrix.nnz),
        }
