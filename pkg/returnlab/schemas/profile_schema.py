from typing import List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated

from returnlab.models.mixing_profile import (
    ExactZero,
    Exponential,
    Polynomial,
    Table,
)


class ExactZeroProfileSchema(BaseModel):
    """Schema for the mixing profile of an independent process."""

    kind: Literal["exact_zero"] = Field(
        ..., description="Profile kind: alpha(k) = 0."
    )

    model_config = ConfigDict(
        extra="forbid", json_schema_extra={"example": {"kind": "exact_zero"}}
    )

    def to_model(self):
        return ExactZero()


class ExponentialProfileSchema(BaseModel):
    """
    Schema for an exponential mixing profile alpha(k) = c theta^k.

    Attributes:
        c (float): Non-negative constant.
        theta (float): Rate in (0, 1).
    """

    kind: Literal["exponential"] = Field(
        ..., description="Profile kind: alpha(k) = c theta^k."
    )
    c: float = Field(1.0, ge=0, description="Non-negative constant.")
    theta: float = Field(..., gt=0, lt=1, description="Rate in (0, 1).")

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"kind": "exponential", "c": 1.0, "theta": 0.5}
        },
    )

    def to_model(self):
        return Exponential(self.c, self.theta)


class PolynomialProfileSchema(BaseModel):
    """
    Schema for a polynomial mixing profile alpha(k) = c k^-beta.

    Attributes:
        c (float): Non-negative constant.
        beta (float): Positive exponent.
    """

    kind: Literal["polynomial"] = Field(
        ..., description="Profile kind: alpha(k) = c k^-beta."
    )
    c: float = Field(1.0, ge=0, description="Non-negative constant.")
    beta: float = Field(..., gt=0, description="Positive exponent.")

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"kind": "polynomial", "c": 1.0, "beta": 4.0}
        },
    )

    def to_model(self):
        return Polynomial(self.c, self.beta)


class TableProfileSchema(BaseModel):
    """Schema for a tabulated profile alpha(1), ..., alpha(k_max)."""

    kind: Literal["table"] = Field(
        ..., description="Profile kind: tabulated values."
    )
    values: List[float] = Field(
        ...,
        min_length=1,
        description="Non-negative, non-increasing alpha(1..k_max).",
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"kind": "table", "values": [0.5, 0.25, 0.125]}
        },
    )

    def to_model(self):
        return Table(tuple(self.values))


ProfileSchema = Annotated[
    Union[
        ExactZeroProfileSchema,
        ExponentialProfileSchema,
        PolynomialProfileSchema,
        TableProfileSchema,
    ],
    Field(discriminator="kind"),
]
