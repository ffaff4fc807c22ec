from dataclasses import dataclass, field

import numpy as np

from returnlab.exceptions import InvalidInputError
from returnlab.models.word import Word


COUNT_LAW = "count-law"
RESCALED_RETURN_LAW = "rescaled-return-law"


@dataclass
class VisitRecord:
    """
    Model representing the visits of one orbit to a cylinder.

    Attributes:
        word (Word): The cylinder A.
        m (int): Window length.
        hit_times (np.ndarray): Sorted times j in [1, m] with T^j x in A.
    """

    word: Word
    m: int
    hit_times: np.ndarray

    def __post_init__(self):
        self.hit_times = np.asarray(self.hit_times, dtype=np.int64)
        if self.hit_times.size and (
            self.hit_times[0] < 1
            or self.hit_times[-1] > self.m
            or np.any(np.diff(self.hit_times) <= 0)
        ):
            raise InvalidInputError(
                "Hit times must be strictly increasing inside [1, m].",
                loc=["hit_times"],
            )

    @property
    def w_m(self):
        """W_m, the number of visits."""
        return int(self.hit_times.size)

    def to_dict(self):
        return {
            "word": str(self.word),
            "m": self.m,
            "w_m": self.w_m,
            "hit_times": self.hit_times.tolist(),
        }


@dataclass
class ReturnTimes:
    """
    Model representing successive entrance times tau^1 < tau^2 < ...

    Attributes:
        times (np.ndarray): Strictly increasing return (or hitting) times.
        truncated (bool): True if the stream ended before k_max visits.
    """

    times: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.int64)

    def __len__(self):
        return int(self.times.size)


@dataclass
class EmpiricalLaw:
    """
    Model representing realizations of W_m or of mu(A) * tau^k.

    Attributes:
        samples (np.ndarray): Non-negative finite samples.
        kind (str): 'count-law' or 'rescaled-return-law'.
        metadata (dict): Word, n, mu(A), r_A, seed, m, k as applicable.
    """

    samples: np.ndarray
    kind: str = RESCALED_RETURN_LAW
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.kind not in (COUNT_LAW, RESCALED_RETURN_LAW):
            raise InvalidInputError(
                f"Unknown law kind {self.kind!r}.", loc=["kind"]
            )
        if self.samples.size == 0:
            raise InvalidInputError(
                "An empirical law needs at least one sample.",
                loc=["samples"],
            )
        if not np.all(np.isfinite(self.samples)) or np.any(self.samples < 0):
            raise InvalidInputError(
                "Samples must be finite and non-negative.", loc=["samples"]
            )

    @property
    def size(self):
        return int(self.samples.size)

    def mean(self):
        return float(self.samples.mean())

    def merge(self, other):
        """
        Pool two laws of the same kind.

        Samples are kept sorted, so merging is associative and independent
        of the order in which ensemble members finish.
        """
        if other.kind != self.kind:
            raise InvalidInputError(
                "Cannot merge laws of different kinds.", loc=["kind"]
            )
        pooled = np.sort(np.concatenate([self.samples, other.samples]))
        return EmpiricalLaw(pooled, self.kind, dict(self.metadata))

    def to_dict(self):
        return {
            "kind": self.kind,
            "size": self.size,
            "mean": self.mean(),
            **self.metadata,
        }
