import math
from dataclasses import dataclass, field
from typing import Optional

from returnlab.exceptions import InvalidInputError


@dataclass
class BoundInput:
    """
    Model representing the quantities the error bounds are evaluated at.

    Attributes:
        mu_A (float): Cylinder measure, 0 < mu_A < 1.
        n (int): Word length.
        r_A (int): Recurrence time.
        t (float): Rescaled time.
        profile: Mixing profile alpha(k).
        k (int): Return index.
        eta (float): Exponent with |log mu(A)| <= K n**eta.
        mu_A_outer (float): Measure of the smallest min(r_A, n)-cylinder
        union containing A (tower bound only).
        delta_n (float): delta_A(n) supplied by the mixing module.
        delta_rA (float): delta_A(r_A) supplied by the mixing module.
        m (int): Window length floor(t / mu_A), derived.
    """

    mu_A: float
    n: int
    r_A: int
    t: float
    profile: object
    k: int = 1
    eta: float = 1.0
    mu_A_outer: Optional[float] = None
    delta_n: Optional[float] = None
    delta_rA: Optional[float] = None
    m: int = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.mu_A < 1.0:
            raise InvalidInputError("mu_A must lie in (0, 1).", loc=["mu_A"])
        if self.n < 1:
            raise InvalidInputError("n must be at least 1.", loc=["n"])
        if self.r_A < 1:
            raise InvalidInputError("r_A must be at least 1.", loc=["r_A"])
        if self.t <= 0:
            raise InvalidInputError("t must be positive.", loc=["t"])
        if self.k < 1:
            raise InvalidInputError("k must be at least 1.", loc=["k"])
        self.m = int(math.floor(self.t / self.mu_A))

    @property
    def log_factor(self):
        """|log mu(A)|."""
        return abs(math.log(self.mu_A))

    def to_dict(self):
        return {
            "mu_A": self.mu_A,
            "mu_A_outer": self.mu_A_outer,
            "n": self.n,
            "r_A": self.r_A,
            "t": self.t,
            "k": self.k,
            "eta": self.eta,
            "m": self.m,
            "profile": self.profile.to_dict(),
            "delta_n": self.delta_n,
            "delta_rA": self.delta_rA,
        }


@dataclass
class BoundReport:
    """
    Model representing one evaluation of an error bound.

    Attributes:
        value (float): The bound.
        delta_star (int): The gap Delta the bound was evaluated at.
        breakdown (dict): Named summands (delta_mu, n_delta_n, n_delta_rA,
        alpha_bar, alpha_over_mu, log_factor, ...).
        mode (str): 'theorem1', 'young', ...
        constant_free (bool): Always True: unspecified constants are 1.
        extra (dict): Mode-specific details (prescribed gap, grid result).
    """

    value: float
    delta_star: int
    breakdown: dict
    mode: str = "theorem1"
    constant_free: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "value": self.value,
            "delta_star": self.delta_star,
            "breakdown": dict(self.breakdown),
            "mode": self.mode,
            "constant_free": self.constant_free,
            "extra": dict(self.extra),
        }


@dataclass
class RateDescriptor:
    """
    Model representing the rate family of the Poisson approximation error.

    Attributes:
        family (str): 'exponential' or 'polynomial'.
        exponent (float): gamma for exponential rates (fitted at the
        grid-optimal gap), beta - 1 - eta for polynomial rates.
        r_squared (float): Goodness of the log-linear fit (None if exact).
        details (dict): Prescribed-gap fit and the evaluated bounds.
    """

    family: str
    exponent: float
    r_squared: Optional[float] = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "family": self.family,
            "exponent": self.exponent,
            "r_squared": self.r_squared,
            "details": dict(self.details),
        }
