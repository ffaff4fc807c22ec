from pydantic import BaseModel, Field, ConfigDict
from typing import Optional, List


class ValidationErrorSchema(BaseModel):
    """
    Schema for errors reported by a command.

    Attributes:
        ctx (Optional[dict]): Additional context for the error, optional.
        loc (List[str]): The location of the error (e.g., config field).
        msg (str): A computer-readable message describing the error.
        type_ (str): The category of the error.
    """

    ctx: Optional[dict] = Field(
        None,
        description=(
            "Context providing additional information about the error."
        ),
    )
    loc: List[str] = Field(
        ..., description="The location of the error (e.g., config field)."
    )
    msg: str = Field(
        ..., description="A computer-readable message describing the error."
    )
    type_: str = Field(
        ...,
        description=(
            "The category of the error (validation_error, not_found, "
            "constraint_error, capacity_error, convergence_error, "
            "simulation_error, acceptance_error)."
        ),
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "ctx": {"n": 10, "attempts": 1000, "accepted": 0},
                "loc": ["constraint"],
                "msg": (
                    "Rejected 1000 of 1000 candidates: r_A > 10 is "
                    "unsatisfiable at n = 10."
                ),
                "type_": "constraint_error",
            }
        }
    )
