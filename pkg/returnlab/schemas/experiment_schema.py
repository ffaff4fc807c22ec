from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from returnlab.schemas.bound_schema import BoundCaseSchema, TowerBoundSchema
from returnlab.schemas.profile_schema import (
    ExactZeroProfileSchema,
    ExponentialProfileSchema,
    ProfileSchema,
)
from returnlab.schemas.system_schema import DoublingSystemSchema, SystemSchema
from returnlab.schemas.tower_schema import TowerSchema


class ExperimentSchema(BaseModel):
    """
    Fields shared by every experiment config.

    Attributes:
        name (Optional[str]): Artifact name (default: the experiment name).
        out (Optional[str]): Output directory.
        seeds (List[int]): Non-empty list of 64-bit RNG seeds.
    """

    name: Optional[str] = Field(
        None, description="Artifact name (default: the experiment name)."
    )
    out: Optional[str] = Field(None, description="Output directory.")
    seeds: List[int] = Field(
        ...,
        min_length=1,
        description="RNG seeds; each one is an ensemble member.",
    )

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def seeds_fit(self):
        if any(not 0 <= seed < 2**64 for seed in self.seeds):
            raise ValueError("Seeds must fit in 64 unsigned bits.")
        return self


class ReturnLawConfig(ExperimentSchema):
    """
    Config of the k-th return law experiment.

    Attributes:
        system: Symbolic system the cylinders live in.
        n (int): Word length.
        k_values (List[int]): Return indices.
        cylinders (int): Number of test cylinders.
        min_recurrence (Optional[float]): Cylinders need r_A above this
        (default n/2).
        samples (int): Samples per cylinder, return index and seed.
        mode (str): 'blocks' or 'stream'.
        t_grid (Optional[List[float]]): Rescaled times of the survival curve.
    """

    experiment: Literal["return_law"] = Field(
        ..., description="Experiment name."
    )
    system: SystemSchema = Field(
        default_factory=lambda: DoublingSystemSchema(kind="doubling"),
        description="Symbolic system.",
    )
    n: int = Field(10, ge=2, description="Word length.")
    k_values: List[int] = Field(
        [1, 2, 3], min_length=1, description="Return indices k."
    )
    cylinders: int = Field(20, ge=1, description="Number of cylinders.")
    min_recurrence: Optional[float] = Field(
        None, description="Require r_A above this (default n/2)."
    )
    samples: int = Field(
        50000, ge=1, description="Samples per cylinder, k and seed."
    )
    mode: Literal["blocks", "stream"] = Field(
        "blocks", description="Harvesting mode."
    )
    reference_length: int = Field(
        10**7,
        ge=1,
        description="Reference orbit length for Gaspard-Wang cylinder "
        "frequencies.",
    )
    t_grid: Optional[List[float]] = Field(
        None, description="Rescaled times (default 30 points in [0.05, 5])."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "return_law",
                "system": {"kind": "doubling"},
                "n": 10,
                "k_values": [1, 2, 3],
                "cylinders": 20,
                "samples": 50000,
                "seeds": [20240601],
            }
        }
    )


class CountLawConfig(ExperimentSchema):
    """
    Config of the visit-count law experiment.

    Attributes:
        words (List[str]): Cylinders, as plain or '-' separated strings.
        t (float): Rescaled window; m = floor(t / mu(A)).
        max_tv (Optional[float]): Acceptance threshold on the distance to
        Poisson(t).
    """

    experiment: Literal["count_law"] = Field(
        ..., description="Experiment name."
    )
    system: SystemSchema = Field(
        default_factory=lambda: DoublingSystemSchema(kind="doubling"),
        description="Symbolic system with an exact measure.",
    )
    words: List[str] = Field(..., min_length=1, description="Cylinders.")
    t: float = Field(1.0, gt=0, description="Rescaled window length.")
    samples: int = Field(20000, ge=1, description="Windows per word and seed.")
    mode: Literal["blocks", "stream"] = Field(
        "blocks", description="Harvesting mode."
    )
    max_tv: Optional[float] = Field(
        None, gt=0, description="Largest accepted TV distance to Poisson(t)."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "count_law",
                "words": ["0110100110"],
                "t": 1.0,
                "samples": 20000,
                "seeds": [7],
            }
        }
    )


class PeriodicCounterexampleConfig(ExperimentSchema):
    """
    Config of the periodic-cylinder experiment: a word with r_A = 1 against a
    control word, both on the doubling map.

    Attributes:
        periodic_word (str): Word of a short periodic orbit.
        control_word (str): Word with r_A > n/2.
        min_tv (float): Smallest accepted matched-mean TV distance of the
        periodic word.
    """

    experiment: Literal["periodic_counterexample"] = Field(
        ..., description="Experiment name."
    )
    periodic_word: str = Field("0000000000", description="Periodic word.")
    control_word: str = Field("0000000001", description="Control word.")
    t: float = Field(1.0, gt=0, description="Rescaled window length.")
    samples: int = Field(20000, ge=1, description="Windows per seed.")
    min_tv: float = Field(
        0.05, gt=0, description="Smallest accepted TV of the periodic word."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "periodic_counterexample",
                "periodic_word": "0000000000",
                "t": 1.0,
                "samples": 20000,
                "seeds": [11],
            }
        }
    )


class GwTailConfig(ExperimentSchema):
    """
    Config of the Gaspard-Wang ladder and tail experiment.

    Attributes:
        alphas (List[float]): Intermittency exponents.
        i_max (int): Ladder depth; must reach ratio_window[1].
        fit_window (List[int]): n range of the tail regression.
        ratio_window (List[int]): i range of the a_i i^{1/alpha} check.
    """

    experiment: Literal["gw_tail"] = Field(..., description="Experiment name.")
    alphas: List[float] = Field(
        [0.5, 0.75], min_length=1, description="Exponents in (0, 1)."
    )
    i_max: int = Field(20000, ge=2, description="Ladder depth.")
    fit_window: List[int] = Field(
        [50, 500], min_length=2, max_length=2, description="Tail fit range."
    )
    ratio_window: List[int] = Field(
        [1000, 10000],
        min_length=2,
        max_length=2,
        description="Range of the a_i i^{1/alpha} flatness check.",
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "gw_tail",
                "alphas": [0.5, 0.75],
                "i_max": 20000,
                "seeds": [0],
            }
        }
    )

    @model_validator(mode="after")
    def windows_inside_ladder(self):
        if any(not 0 < alpha < 1 for alpha in self.alphas):
            raise ValueError("Exponents must lie in (0, 1).")
        for window in (self.fit_window, self.ratio_window):
            if not 1 <= window[0] < window[1] < self.i_max:
                raise ValueError("Windows must lie inside [1, i_max).")
        return self


class TowerOccupancyConfig(ExperimentSchema):
    """
    Config of the tower level-occupancy experiment.

    Attributes:
        tower: Tower specification.
        length (int): Steps simulated per seed.
        min_mass (float): Levels below this invariant mass are not scored.
    """

    experiment: Literal["tower_occupancy"] = Field(
        ..., description="Experiment name."
    )
    tower: TowerSchema = Field(..., description="Tower specification.")
    length: int = Field(10**7, ge=1, description="Steps per seed.")
    min_mass: float = Field(
        1e-3, gt=0, lt=1, description="Smallest scored level mass."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "tower_occupancy",
                "tower": {"gaspard_wang": {"alpha": 0.5, "i_max": 100000}},
                "length": 10000000,
                "seeds": [3],
            }
        }
    )


class UlamDecayConfig(ExperimentSchema):
    """
    Config of the Ulam decay experiment.

    Attributes:
        map_id (str): 'doubling' or 'gw(<alpha>)'.
        bins (int): Number of bins.
        k_max (int): Last iterate of the decay table.
        initial (str): 'ramp' (density 2x) or 'bump' (uniform on an
        interval).
        bump (List[float]): Interval of the bump density.
        fit_window (List[int]): k range of the log-linear fit.
    """

    experiment: Literal["ulam_decay"] = Field(
        ..., description="Experiment name."
    )
    map_id: str = Field("doubling", description="'doubling' or 'gw(<alpha>)'.")
    bins: int = Field(4096, ge=2, description="Number of bins.")
    k_max: int = Field(40, ge=1, description="Last iterate.")
    initial: Literal["ramp", "bump"] = Field(
        "ramp", description="Initial density."
    )
    bump: List[float] = Field(
        [0.3, 0.35],
        min_length=2,
        max_length=2,
        description="Support of the bump density.",
    )
    fit_window: List[int] = Field(
        [2, 20], min_length=2, max_length=2, description="Fit range of k."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "ulam_decay",
                "map_id": "doubling",
                "bins": 1024,
                "k_max": 40,
                "seeds": [0],
            }
        }
    )

    @model_validator(mode="after")
    def bump_inside_interval(self):
        low, high = self.bump
        if not 0 <= low < high <= 1:
            raise ValueError("The bump must be a subinterval of [0, 1].")
        return self


class BoundTableConfig(ExperimentSchema):
    """
    Config of the bound table.

    Attributes:
        system: System with an exact measure; words are drawn from it.
        profile: Mixing profile of the system.
        n_values (List[int]): Word lengths of the family 0^{n-1}1.
        t (float): Rescaled time.
        eta (float): Exponent with |log mu(A)| <= K n^eta.
        epsilon (float): Slack of the exponential gap prescription.
        cases (List[BoundCaseSchema]): Bounds at given quantities.
        tower (Optional[TowerBoundSchema]): Tower bound case.
    """

    experiment: Literal["bound_table"] = Field(
        ..., description="Experiment name."
    )
    system: SystemSchema = Field(
        default_factory=lambda: DoublingSystemSchema(kind="doubling"),
        description="System with an exact measure.",
    )
    profile: ProfileSchema = Field(
        default_factory=lambda: ExponentialProfileSchema(
            kind="exponential", c=1.0, theta=0.5
        ),
        description="Mixing profile.",
    )
    n_values: List[int] = Field(
        list(range(10, 41)), min_length=2, description="Word lengths."
    )
    t: float = Field(1.0, gt=0, description="Rescaled time.")
    eta: float = Field(1.0, gt=0, description="Exponent eta.")
    epsilon: float = Field(
        0.1, gt=0, description="Slack of the exponential prescription."
    )
    cases: List[BoundCaseSchema] = Field(
        [], description="Bounds at given quantities."
    )
    tower: Optional[TowerBoundSchema] = Field(
        None, description="Tower bound case."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "bound_table",
                "profile": {"kind": "exponential", "c": 1.0, "theta": 0.5},
                "n_values": [10, 15, 20, 25, 30, 35, 40],
                "seeds": [0],
            }
        }
    )


class LemmaCheckConfig(ExperimentSchema):
    """
    Config of the exhaustive lemma check over all short words.

    Attributes:
        system: System with an exact measure.
        profiles (list): Mixing profiles to check against.
        max_n (int): Longest word length enumerated.
        k_max (int): Largest self-intersection shift.
        t_max (int): Largest return horizon.
        m_max (int): Largest shifted-return horizon.
    """

    experiment: Literal["lemma_check"] = Field(
        ..., description="Experiment name."
    )
    system: SystemSchema = Field(
        default_factory=lambda: DoublingSystemSchema(kind="doubling"),
        description="System with an exact measure.",
    )
    profiles: List[ProfileSchema] = Field(
        default_factory=lambda: [
            ExactZeroProfileSchema(kind="exact_zero"),
            ExponentialProfileSchema(kind="exponential", c=1.0, theta=0.5),
        ],
        min_length=1,
        description="Mixing profiles.",
    )
    max_n: int = Field(6, ge=1, le=8, description="Longest word length.")
    k_max: int = Field(12, ge=1, description="Largest shift k.")
    t_max: int = Field(12, ge=1, le=16, description="Largest horizon t.")
    m_max: int = Field(8, ge=1, description="Largest shifted horizon M.")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "lemma_check",
                "max_n": 6,
                "seeds": [0],
            }
        }
    )


class SteinSelftestConfig(ExperimentSchema):
    """
    Config of the Stein equation self-test.

    Attributes:
        t_values (List[float]): Poisson parameters.
        events (int): Random events per parameter.
        event_max (int): Events are subsets of [0, event_max].
        k_max (int): Solutions are tabulated up to k_max.
        reference_points (List[int]): k where the two closed forms are
        compared at high precision.
    """

    experiment: Literal["stein_selftest"] = Field(
        ..., description="Experiment name."
    )
    t_values: List[float] = Field(
        [0.5, 1.0, 5.0, 20.0], min_length=1, description="Poisson parameters."
    )
    events: int = Field(50, ge=1, description="Random events per t.")
    event_max: int = Field(50, ge=0, description="Largest event element.")
    k_max: int = Field(100, ge=2, description="Tabulation range.")
    reference_points: List[int] = Field(
        [1, 5, 25, 60], description="k compared across representations."
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "experiment": "stein_selftest",
                "t_values": [0.5, 1.0, 5.0, 20.0],
                "events": 50,
                "seeds": [1],
            }
        }
    )

    @model_validator(mode="after")
    def positive_parameters(self):
        if any(t <= 0 for t in self.t_values):
            raise ValueError("Poisson parameters must be positive.")
        if any(not 1 <= k < self.k_max for k in self.reference_points):
            raise ValueError("Reference points must lie in [1, k_max).")
        return self
