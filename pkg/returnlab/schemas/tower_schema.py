from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from returnlab.tower import DEFAULT_I_MAX, branch_tower, gw_tower


class BranchSchema(BaseModel):
    """
    Schema for one base branch of a tower.

    Attributes:
        weight (float): Base probability of the branch.
        return_time (int): Return time R >= 1 of the branch.
    """

    weight: float = Field(..., ge=0, description="Base probability.")
    return_time: int = Field(..., ge=1, description="Return time R >= 1.")

    model_config = ConfigDict(extra="forbid")


class GaspardWangTowerSchema(BaseModel):
    """
    Schema for the tower of the Gaspard-Wang map.

    Attributes:
        alpha (float): Intermittency exponent in (0, 1).
        i_max (int): Number of branches kept before renormalizing.
    """

    alpha: float = Field(
        ..., gt=0, lt=1, description="Intermittency exponent in (0, 1)."
    )
    i_max: int = Field(
        DEFAULT_I_MAX, ge=1, description="Branch truncation."
    )

    model_config = ConfigDict(extra="forbid")


class TowerSchema(BaseModel):
    """Schema for a tower given by explicit branches or by the GW map."""

    branches: Optional[List[BranchSchema]] = Field(
        None, description="Explicit base branches."
    )
    gaspard_wang: Optional[GaspardWangTowerSchema] = Field(
        None, description="Tower of the Gaspard-Wang map."
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "branches": [
                    {"weight": 0.5, "return_time": 1},
                    {"weight": 0.5, "return_time": 2},
                ]
            }
        },
    )

    @model_validator(mode="after")
    def exactly_one(self):
        if (self.branches is None) == (self.gaspard_wang is None):
            raise ValueError(
                "Give exactly one of 'branches' and 'gaspard_wang'."
            )
        return self

    def to_spec(self):
        if self.gaspard_wang is not None:
            return gw_tower(self.gaspard_wang.alpha, self.gaspard_wang.i_max)
        return branch_tower([branch.model_dump() for branch in self.branches])
