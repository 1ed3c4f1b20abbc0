"""
Ergebnis-Models der numerischen Schicht (Spektren, Self-Energy, Suche, Fits).
"""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class EigenSystem(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray = Field(description="Aufsteigend sortiert")
    eigenvectors: np.ndarray = Field(description="Spalten orthonormal")


class SubspaceSplit(BaseModel):
    """
    Zerlegung in L_- (unter cutoff) und L_+.

    basis_minus hat die L_- Basis als Spalten; bei Penalty-Splits sind
    das Einheitsvektoren, deren Reihenfolge der System-Basis entspricht.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    cutoff: float
    projector_minus: np.ndarray
    projector_plus: np.ndarray
    basis_minus: np.ndarray
    diagonal: bool = Field(default=False, description="True wenn Π_± diagonal in der Rechenbasis sind")

    @property
    def dim_minus(self) -> int:
        return self.basis_minus.shape[1]

    @classmethod
    def for_ancillas(cls, n_qubits: int, ancillas, cutoff: float = 0.0) -> "SubspaceSplit":
        from ..spectral import penalty_split

        return penalty_split(n_qubits, list(ancillas), cutoff)

    @classmethod
    def from_operator(cls, h, cutoff: float) -> "SubspaceSplit":
        from ..spectral import split_from_operator

        return split_from_operator(h, cutoff)


class SelfEnergyEval(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: float
    mode: Literal["exact", "series"]
    order: Optional[int] = None
    sigma: np.ndarray = Field(description="Σ_-(z) auf L_-, symmetrisiert")
    deviation: Optional[float] = Field(default=None, description="‖Σ_-(z) - H_eff‖, falls H_eff gegeben")


class SpectralReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gadget_levels: np.ndarray
    target_levels: np.ndarray
    per_level_error: np.ndarray
    max_error: float


class Theorem1Result(BaseModel):
    """Ergebnis plus Zeuge (schlechtestes z)."""

    passed: bool
    worst_z: Optional[float] = None
    worst_deviation: float
    v_norm: float
    gap: float
    max_z: float
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.passed


class DeltaSearchResult(BaseModel):
    delta_min: float
    achieved_error: float
    epsilon: float
    bracket: tuple[float, float]
    probes: int
    converged: bool
    bisected: bool = True
    fallback: Optional[Literal["grid-scan", "degenerate", "floor"]] = None
    samples: list[tuple[float, float]] = Field(default_factory=list, description="Monotonie-Proben (Delta, Fehler)")


class SlopeFit(BaseModel):
    slope: float
    intercept: float
    r_squared: float
    points: list[tuple[float, float]] = Field(description="(ln 1/ε, ln Δ_min)")

    @field_validator("r_squared")
    @classmethod
    def _unit_interval(cls, value: float) -> float:
        return min(max(value, 0.0), 1.0)


class HighOrderBoundReport(BaseModel):
    """Schranken für die Terme der Ordnung k+2 des parallelen 3->2 Gadgets."""

    v_s: float
    v_f: float
    order_bounds: dict[int, float]
    tail_bound: Optional[float] = None
    gap_condition: bool = Field(description="2 m v_f < Δ - max z")
    ratio_condition: bool = Field(description="m v_f / v_s > 1")

    @property
    def converges(self) -> bool:
        return self.gap_condition and self.ratio_condition
