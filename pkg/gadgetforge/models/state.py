"""
State Models für die k->3 Reduktion (LangGraph).

Der ReductionState fließt durch partition -> gap -> build -> measure -> checker.
"""

import operator
from typing import Annotated, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import TypedDict

from ..pauli_core import OperatorSum, PauliString
from .gadget import GadgetBuild


class IterationRecord(BaseModel):
    """Protokoll einer Reduktions-Iteration."""

    iteration: int
    partitions: list[str] = Field(description="Splits als 'A|B'")
    delta: float
    delta_mode: Literal["analytical", "optimized"]
    h_else_norm: float
    ancillas_added: int
    n_qubits: int
    measured_error: float
    duration_ms: int = 0


class ReductionTrace(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k: int
    epsilon: float
    iterations: list[IterationRecord]
    cumulative_error_budget: float = Field(description="s·ε, Dreiecksungleichung")
    measured_end_to_end_error: float
    final_gadget: GadgetBuild

    @property
    def total_ancillas(self) -> int:
        return sum(r.ancillas_added for r in self.iterations)

    @property
    def measured_step_sum(self) -> float:
        """Σ der gemessenen Fehler pro Iteration (<= cumulative_error_budget)."""
        return float(sum(r.measured_error for r in self.iterations))

    @property
    def gap_growth(self) -> list[float]:
        """Δ^(i+1) / (Δ^(i))^{3/2} pro Iterationsschritt."""
        deltas = [r.delta for r in self.iterations]
        return [b / a ** 1.5 for a, b in zip(deltas, deltas[1:])]


class ReductionState(TypedDict):
    # === Run Tracking ===
    run_id: str

    # === Input ===
    target: OperatorSum          # ursprüngliches H_targ
    epsilon: float
    delta_mode: Literal["analytical", "optimized"]
    bound_kind: Literal["parallel", "single"]
    tol_rel: float

    # === Laufender Hamiltonian H̃^(i) ===
    current: OperatorSum
    iteration: int
    ancillas: dict[str, int]
    ancilla_gaps: dict[str, float]

    # === Pro Iteration ===
    big_terms: list[tuple[float, PauliString]]
    splits: list[tuple[PauliString, PauliString]]
    h_else_norm: float
    delta: float
    gadget: Optional[GadgetBuild]

    # Annotated mit operator.add: Records werden angehängt
    records: Annotated[list[IterationRecord], operator.add]

    # === Output ===
    final_gadget: Optional[GadgetBuild]
    end_to_end_error: Optional[float]

    # === Error Handling ===
    error: Optional[str]
    error_kind: Optional[str]
