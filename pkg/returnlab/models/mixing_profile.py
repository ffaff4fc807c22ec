from dataclasses import dataclass

import numpy as np

from returnlab.exceptions import InvalidInputError


@dataclass(frozen=True)
class ExactZero:
    """Mixing model of an independent process: alpha(k) = 0."""

    kind = "exact_zero"

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Exponential:
    """
    Mixing model alpha(k) = c * theta**k.

    Attributes:
        c (float): Non-negative constant.
        theta (float): Rate in (0, 1).
    """

    c: float
    theta: float
    kind = "exponential"

    def __post_init__(self):
        if self.c < 0:
            raise InvalidInputError("c must be non-negative.", loc=["c"])
        if not 0.0 < self.theta < 1.0:
            raise InvalidInputError(
                "theta must lie in (0, 1).", loc=["theta"]
            )

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "theta": self.theta}


@dataclass(frozen=True)
class Polynomial:
    """
    Mixing model alpha(k) = c * k**(-beta).

    Attributes:
        c (float): Non-negative constant.
        beta (float): Decay exponent; the sequence is summable iff beta > 1.
    """

    c: float
    beta: float
    kind = "polynomial"

    def __post_init__(self):
        if self.c < 0:
            raise InvalidInputError("c must be non-negative.", loc=["c"])
        if self.beta <= 0:
            raise InvalidInputError(
                "beta must be positive for a decreasing sequence.",
                loc=["beta"],
            )

    @property
    def summable(self):
        return self.beta > 1.0

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "beta": self.beta}


@dataclass(frozen=True)
class Table:
    """
    Mixing model given by tabulated values alpha(1), ..., alpha(k_max).

    Attributes:
        values (tuple[float, ...]): Non-negative, non-increasing values.
    """

    values: tuple
    kind = "table"

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidInputError(
                "A tabulated profile needs at least one value.",
                loc=["values"],
            )
        array = np.asarray(values)
        if np.any(array < 0) or np.any(np.diff(array) > 0):
            raise InvalidInputError(
                "Tabulated alpha must be non-negative and non-increasing.",
                loc=["values"],
            )
        object.__setattr__(self, "values", values)

    @property
    def k_max(self):
        return len(self.values)

    def to_dict(self):
        return {"kind": self.kind, "values": list(self.values)}
