from dataclasses import dataclass
from typing import Tuple

import numpy as np

from returnlab.exceptions import InvalidInputError


@dataclass(frozen=True)
class Word:
    """
    Model representing a finite symbol string naming an n-cylinder.

    Attributes:
        symbols (tuple[int, ...]): Partition-element indices, first symbol
        first.
    """

    symbols: Tuple[int, ...]

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        if not symbols:
            raise InvalidInputError(
                "A word needs at least one symbol.", loc=["word"]
            )
        if any(s < 0 for s in symbols):
            raise InvalidInputError(
                "Word symbols must be non-negative partition indices.",
                loc=["word"],
            )
        object.__setattr__(self, "symbols", symbols)

    @property
    def n(self):
        return len(self.symbols)

    def as_array(self):
        return np.asarray(self.symbols, dtype=np.int64)

    def suffix(self, w):
        """The last w symbols of the word."""
        return Word(self.symbols[self.n - w:])

    @classmethod
    def parse(cls, text):
        """
        Parse a word from its plain-string form.

        "0101" names four binary symbols; "12-0-3" uses '-' separators, which
        alphabets larger than 10 need.
        """
        text = str(text).strip()
        if not text:
            raise InvalidInputError("Empty word string.", loc=["word"])
        try:
            if "-" in text:
                return cls(tuple(int(part) for part in text.split("-")))
            return cls(tuple(int(ch) for ch in text))
        except ValueError:
            raise InvalidInputError(
                f"Cannot parse word {text!r}.", loc=["word"]
            ) from None

    def format(self, alphabet_size=None):
        """Plain-string form; '-' separated when any symbol exceeds 9."""
        wide = max(self.symbols) > 9 or (
            alphabet_size is not None and alphabet_size > 10
        )
        if wide:
            return "-".join(str(s) for s in self.symbols)
        return "".join(str(s) for s in self.symbols)

    def __str__(self):
        return self.format()

    def to_dict(self):
        """
        Converts the word into a dictionary format.

        Returns:
            dict: The word with keys 'word' and 'n'.
        """
        return {"word": self.format(), "n": self.n}


@dataclass(frozen=True)
class SelectedCylinder:
    """
    Model representing a test cylinder accepted by the selection procedure.

    Attributes:
        word (Word): The cylinder A.
        mu (float): Its measure mu(A) under the sampling model.
        r_A (int): Its recurrence time.
    """

    word: Word
    mu: float
    r_A: int

    def to_dict(self):
        return {
            "word": self.word.format(),
            "n": self.word.n,
            "mu": self.mu,
            "r_A": self.r_A,
        }
