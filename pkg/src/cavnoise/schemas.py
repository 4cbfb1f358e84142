"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from .errors import ParameterError


class CavityIn(BaseModel):
    """Cavity inputs; losses enter as the output-mirror transmission t2.

    r2 is accepted as an explicit reflectivity alias (r2 = 1 - t2); giving
    both is rejected.
    """

    r1: float = Field(0.95, ge=0.0, le=1.0)
    t2: float | None = Field(None, ge=0.0, le=1.0)
    r2: float | None = Field(None, ge=0.0, le=1.0)
    model: Literal["exact-airy", "lorentzian"] = "exact-airy"

    @model_validator(mode="after")
    def _exclusive_loss(self):
        if self.t2 is not None and self.r2 is not None:
            raise ValueError("give either t2 (loss transmission) or r2 (reflectivity), not both")
        return self

    @property
    def loss_t2(self) -> float:
        if self.r2 is not None:
            return 1.0 - self.r2
        return 0.003 if self.t2 is None else self.t2


class StateIn(BaseModel):
    """Input sideband noise powers, shot noise = 1."""

    sp: float = Field(0.5, gt=0.0)
    sq: float = Field(2.0, gt=0.0)


class GridIn(BaseModel):
    delta_min: float = -12.0
    delta_max: float = 12.0
    points: int = Field(2001, ge=2, le=1_000_001)


class ReflectanceRequest(BaseModel):
    cavity: CavityIn = CavityIn()
    grid: GridIn | None = None  # default: one full free spectral range


class SweepRequest(BaseModel):
    cavity: CavityIn = CavityIn()
    state: StateIn = StateIn()
    nu: float = Field(6.0, gt=0.0)
    grid: GridIn = GridIn()


class RotationRequest(BaseModel):
    cavity: CavityIn = CavityIn()
    nu: float = Field(6.0, gt=0.0)
    grid: GridIn = GridIn()


class CriticalRequest(BaseModel):
    cavity: CavityIn = CavityIn()
    state: StateIn = StateIn()
    nu: float = Field(6.0, gt=0.0)
    tol: float = Field(1e-9, gt=0.0)


class BifurcationRequest(BaseModel):
    cavity: CavityIn = CavityIn(r1=0.999, t2=0.0)
    state: StateIn = StateIn()
    nu_min: float = Field(0.2, gt=0.0)
    nu_max: float = Field(10.0, gt=0.0, le=20.0)
    steps: int = Field(99, ge=2, le=10_000)
    tol: float = Field(1e-9, gt=0.0)


class OracleRequest(BaseModel):
    cavity: CavityIn = CavityIn()
    state: StateIn = StateIn()
    nu: float = Field(6.0, gt=0.0)
    deltas: list[float] | None = None
    grid: GridIn = GridIn(points=9)
    seed: int = Field(42, ge=0, lt=2**64)
    samples: int = Field(100_000, ge=100, le=10_000_000)
    partitions: int = Field(1, ge=1, le=64)


class DatasetOut(BaseModel):
    command: str
    columns: list[str]
    rows: list[dict[str, float | str | None]]
    metadata: dict[str, float | int | str]


def resolve_cavity(cavity: CavityIn) -> tuple[float, float, str]:
    """(r1, t2, model) primitives with the t2/r2 alias resolved."""
    t2 = cavity.loss_t2
    if not 0.0 <= t2 <= 1.0:
        raise ParameterError(f"resolved loss t2 = {t2} outside [0, 1]")
    return cavity.r1, t2, cavity.model
