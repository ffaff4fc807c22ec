import json
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Annotated

from returnlab.dynamics import (
    BernoulliSource,
    DoublingSource,
    GwSource,
    SftSource,
)
from returnlab.models.measure import BernoulliProduct
from returnlab.models.systems import SftSystem
from returnlab.tower import gw_ladder


class DoublingSystemSchema(BaseModel):
    """Schema for the doubling map x -> 2x mod 1 with Lebesgue measure."""

    kind: Literal["doubling"] = Field(..., description="System kind.")

    model_config = ConfigDict(
        extra="forbid", json_schema_extra={"example": {"kind": "doubling"}}
    )

    def to_source(self):
        return DoublingSource()


class BernoulliSystemSchema(BaseModel):
    """
    Schema for a one-sided full shift with a product measure.

    Attributes:
        weights (List[float]): Symbol probabilities, summing to 1.
    """

    kind: Literal["bernoulli"] = Field(..., description="System kind.")
    weights: List[float] = Field(
        ..., min_length=1, description="Symbol probabilities, summing to 1."
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"kind": "bernoulli", "weights": [0.3, 0.7]}
        },
    )

    def to_source(self):
        return BernoulliSource(BernoulliProduct(self.weights))


class SftSystemSchema(BaseModel):
    """
    Schema for a subshift of finite type sampled from a Markov chain.

    Either the matrices are given inline or `file` names a JSON document
    holding 'transition' and optionally 'sampling_chain'. Without a sampling
    chain every allowed transition out of a symbol is equally likely.

    Attributes:
        transition (Optional[List[List[int]]]): 0/1 transition matrix M.
        sampling_chain (Optional[List[List[float]]]): Stochastic matrix P
        supported on M.
        file (Optional[str]): Path of a JSON document with the matrices.
    """

    kind: Literal["sft"] = Field(..., description="System kind.")
    transition: Optional[List[List[int]]] = Field(
        None, description="0/1 transition matrix M."
    )
    sampling_chain: Optional[List[List[float]]] = Field(
        None,
        description=(
            "Row-stochastic matrix supported on M (default: uniform over "
            "allowed transitions)."
        ),
    )
    file: Optional[str] = Field(
        None, description="JSON file holding 'transition' (and chain)."
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "kind": "sft",
                "transition": [[1, 1], [1, 0]],
                "sampling_chain": [[0.5, 0.5], [1.0, 0.0]],
            }
        },
    )

    @model_validator(mode="after")
    def resolve_matrices(self):
        if self.file is not None:
            path = Path(self.file)
            if not path.is_file():
                raise ValueError(f"SFT file {self.file!r} does not exist.")
            document = json.loads(path.read_text(encoding="utf-8"))
            self.transition = document["transition"]
            self.sampling_chain = document.get("sampling_chain")
        if self.transition is None:
            raise ValueError("An SFT needs 'transition' or 'file'.")
        if self.sampling_chain is None:
            self.sampling_chain = [
                [entry / sum(row) if sum(row) else 0.0 for entry in row]
                for row in self.transition
            ]
        return self

    def to_system(self):
        return SftSystem(self.transition, self.sampling_chain)

    def to_source(self):
        return SftSource(self.to_system())


class GwSystemSchema(BaseModel):
    """
    Schema for the Gaspard-Wang map.

    Attributes:
        alpha (float): Intermittency exponent in (0, 1).
        i_max (int): Depth of the precomputed partition ladder.
        burn_in (int): Iterates discarded before recording a stream.
    """

    kind: Literal["gw"] = Field(..., description="System kind.")
    alpha: float = Field(
        ..., gt=0, lt=1, description="Intermittency exponent in (0, 1)."
    )
    i_max: int = Field(
        20000, ge=1, description="Depth of the partition ladder a_i."
    )
    burn_in: int = Field(
        1000, ge=0, description="Iterates discarded before recording."
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"kind": "gw", "alpha": 0.25, "i_max": 20000}
        },
    )

    def to_source(self):
        return GwSource(gw_ladder(self.alpha, self.i_max), self.burn_in)


SystemSchema = Annotated[
    Union[
        DoublingSystemSchema,
        BernoulliSystemSchema,
        SftSystemSchema,
        GwSystemSchema,
    ],
    Field(discriminator="kind"),
]
