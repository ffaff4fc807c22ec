import numpy as np

from returnlab.exceptions import InvalidInputError


ROW_TOLERANCE = 1e-12


def check_stochastic(matrix, name="matrix"):
    """
    Validate a square row-stochastic matrix and return it as a float array.

    Raises:
        InvalidInputError: If the matrix is not square, has negative entries
        or a row that does not sum to 1 within 1e-12.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"{name} must be a square matrix.", loc=[name])
    if np.any(matrix < 0):
        raise InvalidInputError(
            f"{name} must have non-negative entries.", loc=[name]
        )
    if np.any(np.abs(matrix.sum(axis=1) - 1.0) > ROW_TOLERANCE):
        raise InvalidInputError(
            f"Rows of {name} must sum to 1 within {ROW_TOLERANCE}.",
            loc=[name],
        )
    return matrix


def stationary_distribution(matrix):
    """
    Stationary vector of an irreducible row-stochastic matrix.

    Grassmann-Taksar-Heyman elimination: no subtractions, so nearly
    decomposable chains come out to machine precision.

    Raises:
        InvalidInputError: If the chain is reducible (a censored state has no
        way back to the states eliminated before it).
    """
    work = np.array(matrix, dtype=float)
    size = work.shape[0]
    for state in range(size - 1, 0, -1):
        escape = work[state, :state].sum()
        if escape <= 0.0:
            raise InvalidInputError(
                "Stationary vector undefined: the sampling chain is "
                "reducible.",
                loc=["sampling_chain"],
            )
        work[:state, state] /= escape
        work[:state, :state] += np.outer(
            work[:state, state], work[state, :state]
        )

    pi = np.zeros(size)
    pi[0] = 1.0
    for state in range(1, size):
        pi[state] = pi[:state] @ work[:state, state]
    pi /= pi.sum()

    if np.any(pi <= 0.0):
        raise InvalidInputError(
            "Stationary vector undefined: the sampling chain is reducible.",
            loc=["sampling_chain"],
        )
    return pi


def gap_matrix(matrix, steps):
    """Transition probabilities over `steps` steps (identity for 0)."""
    return np.linalg.matrix_power(np.asarray(matrix, dtype=float), steps)
