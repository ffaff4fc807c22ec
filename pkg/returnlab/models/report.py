from dataclasses import dataclass, field
from typing import Optional


@dataclass
class Check:
    """
    Model representing one acceptance threshold of an experiment.

    Attributes:
        name (str): What is being checked (e.g., 'sup_deviation[0101...]').
        value (float): The measured quantity.
        lower (float): Smallest accepted value, if bounded below.
        upper (float): Largest accepted value, if bounded above.
    """

    name: str
    value: float
    lower: Optional[float] = None
    upper: Optional[float] = None

    @property
    def passed(self):
        if self.lower is not None and not self.value >= self.lower:
            return False
        if self.upper is not None and not self.value <= self.upper:
            return False
        return True

    def to_dict(self):
        return {
            "name": self.name,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "passed": self.passed,
        }


@dataclass
class ExperimentResult:
    """
    Model representing what an experiment hands to the artifact writer.

    Attributes:
        header (list[str]): Column names of the samples CSV.
        rows (list[list]): Rows of the samples CSV.
        summary (dict): Distances, fits and bound reports for the JSON file.
        checks (list[Check]): Acceptance thresholds enforced under --check.
    """

    header: list
    rows: list
    summary: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def failed_checks(self):
        return [check for check in self.checks if not check.passed]
