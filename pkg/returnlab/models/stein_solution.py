from dataclasses import dataclass

import numpy as np

from returnlab.exceptions import InvalidInputError


@dataclass(frozen=True)
class SteinSolution:
    """
    Model representing the tabulated solution of the Poisson Stein equation
    t f(k+1) - k f(k) = 1_E(k) - mu_0(E).

    Attributes:
        t (float): Poisson parameter.
        event (frozenset[int]): The event E.
        values (np.ndarray): f(0), f(1), ..., f(k_max), with f(0) = 0.
        mu0_event (float): Poisson mass mu_0(E).
    """

    t: float
    event: frozenset
    values: np.ndarray
    mu0_event: float

    @property
    def k_max(self):
        return int(self.values.size - 1)

    @property
    def f0(self):
        return float(self.values[0])

    def f(self, k):
        if not 0 <= k <= self.k_max:
            raise InvalidInputError(
                f"k must lie in [0, {self.k_max}].", loc=["k"]
            )
        return float(self.values[k])

    def indicator(self, k):
        return 1.0 if k in self.event else 0.0

    def to_dict(self):
        """
        Converts the solution into a dictionary format.

        Returns:
            dict: The solution with keys 't', 'event', 'mu0_event' and
                  'values' (f(1) ... f(k_max)).
        """
        return {
            "t": self.t,
            "event": sorted(self.event),
            "mu0_event": self.mu0_event,
            "values": np.asarray(self.values[1:]).tolist(),
        }
