import numpy as np
from scipy import stats

from returnlab.exceptions import InvalidInputError


def linear_fit(x, y):
    """
    Least-squares line through (x, y).

    Returns:
        tuple: (slope, intercept, r_squared).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise InvalidInputError(
            "A linear fit needs at least two points.", loc=["x"]
        )
    result = stats.linregress(x, y)
    return float(result.slope), float(result.intercept), float(
        result.rvalue**2
    )


def log_linear_fit(x, y):
    """Fit log(y) against x; y must be strictly positive."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise InvalidInputError(
            "Log-linear fits need strictly positive values.", loc=["y"]
        )
    return linear_fit(x, np.log(y))


def log_log_fit(x, y):
    """Fit log(y) against log(x); both must be strictly positive."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidInputError(
            "Log-log fits need strictly positive abscissae.", loc=["x"]
        )
    return log_linear_fit(np.log(x), y)


def ratio_deviation(a, b):
    """
    Largest relative deviation max_i |1 - a_i/b_i| of two positive sequences.

    It dominates the deviation of the aggregated ratio |1 - sum(a)/sum(b)|.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise InvalidInputError(
            "Ratio deviation needs two non-empty sequences of equal length.",
            loc=["a", "b"],
        )
    if np.any(a <= 0) or np.any(b <= 0):
        raise InvalidInputError(
            "Ratio deviation is defined for positive reals only.",
            loc=["a", "b"],
        )
    return float(np.max(np.abs(1.0 - a / b)))


def aggregate_ratio_deviation(a, b):
    """|1 - sum(a)/sum(b)|, the quantity bounded by ratio_deviation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(abs(1.0 - a.sum() / b.sum()))


def binomial_standard_error(p, trials):
    """Standard error of an empirical frequency with success probability p."""
    return float(np.sqrt(p * (1.0 - p) / trials))
