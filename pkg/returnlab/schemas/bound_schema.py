from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from returnlab.models.bound import BoundInput
from returnlab.schemas.profile_schema import ProfileSchema


class BoundCaseSchema(BaseModel):
    """
    Schema for an error bound evaluated at given quantities.

    Attributes:
        mu_A (float): Cylinder measure.
        n (int): Word length.
        r_A (int): Recurrence time.
        t (float): Rescaled time.
        delta_n (float): delta_A(n).
        delta_rA (float): delta_A(r_A).
        mu_A_outer (Optional[float]): Measure of A-tilde (tower bound).
        profile: Mixing profile.
    """

    mu_A: float = Field(..., gt=0, lt=1, description="Cylinder measure.")
    n: int = Field(..., ge=1, description="Word length.")
    r_A: int = Field(..., ge=1, description="Recurrence time.")
    t: float = Field(1.0, gt=0, description="Rescaled time.")
    k: int = Field(1, ge=1, description="Return index.")
    eta: float = Field(
        1.0, gt=0, description="Exponent with |log mu(A)| <= K n^eta."
    )
    delta_n: float = Field(..., ge=0, description="delta_A(n).")
    delta_rA: float = Field(..., ge=0, description="delta_A(r_A).")
    mu_A_outer: Optional[float] = Field(
        None, gt=0, le=1, description="Measure of A-tilde (tower bound)."
    )
    profile: ProfileSchema = Field(..., description="Mixing profile.")

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "mu_A": 9.5367431640625e-07,
                "n": 20,
                "r_A": 20,
                "t": 1.0,
                "delta_n": 0.0,
                "delta_rA": 0.0,
                "profile": {"kind": "polynomial", "c": 1.0, "beta": 4.0},
            }
        },
    )

    def to_input(self):
        return BoundInput(
            mu_A=self.mu_A,
            n=self.n,
            r_A=self.r_A,
            t=self.t,
            profile=self.profile.to_model(),
            k=self.k,
            eta=self.eta,
            mu_A_outer=self.mu_A_outer,
            delta_n=self.delta_n,
            delta_rA=self.delta_rA,
        )


class TowerBoundSchema(BaseModel):
    """
    Schema for the tower (Young) bound with mu(A) ~ rho^n.

    Attributes:
        n (int): Word length.
        rho (float): Measure decay rate of cylinders.
        mu_A_outer (float): Measure of A-tilde.
        decay: Decay function p(k) of the tower.
    """

    n: int = Field(..., ge=1, description="Word length.")
    rho: float = Field(..., gt=0, lt=1, description="mu(A) ~ rho^n.")
    t: float = Field(1.0, gt=0, description="Rescaled time.")
    mu_A_outer: float = Field(
        ..., gt=0, le=1, description="Measure of A-tilde."
    )
    decay: ProfileSchema = Field(
        ..., description="Decay function p(k) of the tower."
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "n": 20,
                "rho": 0.5,
                "t": 1.0,
                "mu_A_outer": 0.0009765625,
                "decay": {"kind": "polynomial", "c": 1.0, "beta": 4.0},
            }
        },
    )

    def to_input(self):
        return BoundInput(
            mu_A=self.rho**self.n,
            n=self.n,
            r_A=self.n,
            t=self.t,
            profile=self.decay.to_model(),
            mu_A_outer=self.mu_A_outer,
        )
