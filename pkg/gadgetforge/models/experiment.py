"""
Experiment-Konfiguration für die CLI-Recipes.
"""

from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class SweepSpec(BaseModel):
    """Parameter-Grid aus '--sweep param:lo:hi:n[:log]'."""

    param: str
    lo: float
    hi: float
    n: int = Field(ge=1)
    log: bool = False

    @model_validator(mode="after")
    def _positive_for_log(self) -> "SweepSpec":
        if self.log and (self.lo <= 0 or self.hi <= 0):
            raise ValueError("log-Grid braucht positive Grenzen")
        return self

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] != "log"):
            raise ValueError(f"Sweep-Format param:lo:hi:n[:log] erwartet, nicht {text!r}")
        return cls(param=parts[0], lo=float(parts[1]), hi=float(parts[2]), n=int(parts[3]), log=len(parts) == 5)

    def values(self) -> list[float]:
        if self.n == 1:
            return [self.lo]
        if self.log:
            return [float(v) for v in np.geomspace(self.lo, self.hi, self.n)]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.n)]

    def describe(self) -> str:
        return f"{self.param}:{self.lo:g}:{self.hi:g}:{self.n}" + (":log" if self.log else "")


class ExperimentConfig(BaseModel):
    """Echo der CLI-Konfiguration, landet im Sidecar."""

    recipe: str
    target_path: Optional[str] = None
    gadget: Optional[str] = None
    alphas: list[float] = Field(default_factory=list)
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    h_else_norm: float = 0.0
    sweeps: list[SweepSpec] = Field(default_factory=list)
    order: Optional[int] = None
    z_points: int = 201
    include_v3: bool = True
    include_4local: bool = True
    ot06: bool = Field(default=False, description="bound: OT06-Schranke statt der verbesserten")
    delta_mode: Optional[Literal["analytical", "optimized", "both"]] = Field(default=None, description="None: Default des Recipes")
    out: Optional[str] = None
    tol_rel: float = 1e-5
    extra: dict = Field(default_factory=dict)

    @field_validator("epsilon")
    @classmethod
    def _eps_positive(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError("eps muss positiv sein")
        return value

    @field_validator("z_points")
    @classmethod
    def _grid_non_empty(cls, value: int) -> int:
        if value < 1:
            raise ValueError("z-Grid darf nicht leer sein")
        return value

    def sweep(self, param: str) -> Optional[SweepSpec]:
        for s in self.sweeps:
            if s.param == param:
                return s
        return None


class RecipeTable(BaseModel):
    """Eine CSV-Tabelle; name=None ist die Haupttabelle unter --out."""

    name: Optional[str] = None
    fieldnames: list[str]
    rows: list[dict[str, Any]]


class RecipeOutput(BaseModel):
    recipe: str
    tables: list[RecipeTable]
    grids: dict[str, Any] = Field(default_factory=dict, description="Grid-Beschreibung für den Sidecar")
    fits: dict[str, Any] = Field(default_factory=dict)
    summary: dict[str, Any] = Field(default_factory=dict)

    @property
    def main(self) -> RecipeTable:
        return self.tables[0]

    @property
    def failures(self) -> int:
        return sum(1 for t in self.tables for r in t.rows if r.get("status", "ok") not in ("ok", "floor"))
