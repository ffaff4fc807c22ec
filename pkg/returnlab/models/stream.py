from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class SymbolStream:
    """
    Model representing the itinerary of one simulated orbit.

    Attributes:
        symbols (np.ndarray): Partition-element indices, one per time step.
        alphabet_size (int): Number of partition elements of the system
        (None for the countable Gaspard-Wang partition).
        seed (int): The RNG seed the stream was generated from.
        system (str): Name of the generating system ('doubling', 'sft',
        'gw', 'tower').
    """

    symbols: np.ndarray
    alphabet_size: Optional[int] = None
    seed: Optional[int] = None
    system: str = "doubling"

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64)

    @property
    def length(self):
        return int(self.symbols.size)

    def __len__(self):
        return self.length

    def to_dict(self):
        """
        Converts the stream metadata into a dictionary format.

        Returns:
            dict: The stream attributes with keys 'system', 'length',
                  'alphabet_size' and 'seed' (symbols are not included).
        """
        return {
            "system": self.system,
            "length": self.length,
            "alphabet_size": self.alphabet_size,
            "seed": self.seed,
        }


@dataclass
class TowerStream:
    """
    Model representing an orbit on a Markov tower as (branch, level) pairs.

    Attributes:
        branches (np.ndarray): Base branch index i of the current excursion.
        levels (np.ndarray): Tower level j, 0 <= j < R_i.
        seed (int): The RNG seed the orbit was generated from.
    """

    branches: np.ndarray
    levels: np.ndarray
    seed: Optional[int] = None

    @property
    def length(self):
        return int(self.levels.size)

    def return_branches(self):
        """Branch drawn at each return to the base, in time order."""
        return self.branches[self.levels == 0]

    def to_dict(self):
        return {"length": self.length, "seed": self.seed}
