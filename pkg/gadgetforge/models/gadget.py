"""
Gadget Models: Target-Hamiltonian, konstruierte Gadgets, Kommutator-Profile.

H_targ = H_else + Σ α_i A_i ⊗ B_i (⊗ C_i)
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..pauli_core import OperatorSum, PauliString


class Interaction(BaseModel):
    """Ein Gadget-Ziel α·A⊗B(⊗C); die Faktoren wirken auf disjunkten Qubits."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    alpha: float = Field(description="Gewünschte Kopplung α")
    factors: tuple[PauliString, ...] = Field(description="Faktoren A, B(, C) oder ein ungeteilter k-body String")

    @field_validator("factors")
    @classmethod
    def _non_empty(cls, factors: tuple[PauliString, ...]) -> tuple[PauliString, ...]:
        if not factors:
            raise ValueError("mindestens ein Faktor nötig")
        for f in factors:
            if f.weight == 0:
                raise ValueError("Faktor darf nicht die Identität sein")
        return factors

    @model_validator(mode="after")
    def _disjoint(self) -> "Interaction":
        seen: set[int] = set()
        for f in self.factors:
            if seen & f.support:
                raise ValueError(f"Faktoren überlappen auf Qubits {sorted(seen & f.support)}")
            seen |= f.support
        # Bei drei Einzel-Qubit-Faktoren aufsteigende Indizes
        if len(self.factors) == 3 and all(f.weight == 1 for f in self.factors):
            q = [f.qubits[0] for f in self.factors]
            if not q[0] < q[1] < q[2]:
                raise ValueError(f"3-body Faktoren müssen aufsteigend sein, nicht {q}")
        return self

    @property
    def product(self) -> PauliString:
        """A·B·C als ein String (disjunkte Träger, also ohne Phase)."""
        pairs = [p for f in self.factors for p in f.factors]
        return PauliString.from_pairs(pairs)

    @property
    def weight(self) -> int:
        return self.product.weight

    @property
    def single_qubit_factors(self) -> bool:
        return all(f.weight == 1 for f in self.factors)

    def label(self) -> str:
        return "|".join(str(f) for f in self.factors)


class TargetSpec(BaseModel):
    """H_else plus die Wechselwirkungen, die per Gadget erzeugt werden."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    h_else: OperatorSum = Field(description="Zuschauer-Anteil, vom Gadget nicht angefasst")
    interactions: tuple[Interaction, ...] = Field(default=(), description="Gadget-Ziele")

    @model_validator(mode="after")
    def _in_range(self) -> "TargetSpec":
        n = self.h_else.n_qubits
        for i, term in enumerate(self.interactions):
            if term.product.qubits and term.product.qubits[-1] >= n:
                raise ValueError(f"interactions[{i}] liegt außerhalb von {n} Qubits")
        return self

    @property
    def n_qubits(self) -> int:
        return self.h_else.n_qubits

    @property
    def alphas(self) -> list[float]:
        return [t.alpha for t in self.interactions]

    def operator(self) -> OperatorSum:
        """H_targ auf den System-Qubits."""
        op = self.h_else
        for term in self.interactions:
            op = op + OperatorSum.from_string(self.n_qubits, term.product, term.alpha)
        return op

    @classmethod
    def single(cls, n_qubits: int, alpha: float, *factors: str, h_else: OperatorSum = None) -> "TargetSpec":
        """Kurzform: TargetSpec.single(3, 0.1, "X0", "Z1", "Z2")."""
        h_else = h_else if h_else is not None else OperatorSum.zero(n_qubits)
        term = Interaction(alpha=alpha, factors=tuple(PauliString.parse(f) for f in factors))
        return cls(h_else=h_else, interactions=(term,))


class GadgetBuild(BaseModel):
    """
    Ein konstruiertes Gadget H̃ = H + V.

    Ancillas liegen hinter den System-Qubits. ancilla_gaps hält Δ pro
    Ancilla (bei zusammengesetzten Reduktionen verschieden).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    family: str
    penalty: OperatorSum = Field(description="H = Σ Δ_a |1><1|_a")
    perturbation: OperatorSum = Field(description="V")
    total: OperatorSum = Field(description="H̃ = H + V")
    ancillas: dict[str, int] = Field(description="Label -> Qubit-Index")
    ancilla_gaps: dict[str, float]
    delta: float
    target: OperatorSum = Field(description="H_targ auf den System-Qubits")
    effective_target: OperatorSum = Field(description="H_targ ⊗ P_- auf dem vollen Register")
    system_qubits: int
    locality_cap: int
    coefficients: dict[str, float] = Field(default_factory=dict, description="κ, λ, μ, ... für Logs und Sidecars")

    @model_validator(mode="after")
    def _consistent(self) -> "GadgetBuild":
        n = self.total.n_qubits
        if self.system_qubits + len(self.ancillas) != n:
            raise ValueError("system_qubits + ancillas != n_qubits")
        if self.target.n_qubits != self.system_qubits:
            raise ValueError("target passt nicht zu system_qubits")
        return self

    @property
    def n_qubits(self) -> int:
        return self.total.n_qubits

    @property
    def n_ancillas(self) -> int:
        return len(self.ancillas)

    @property
    def ancilla_qubits(self) -> list[int]:
        return sorted(self.ancillas.values())


class CommutationProfile(BaseModel):
    """Kommutator-Flags eines Paars paralleler 3-body Terme."""

    s0: int = Field(ge=0, le=1)
    s11: int = Field(ge=0, le=1)
    s12: int = Field(ge=0, le=1)
    s1: int = Field(ge=0, le=2, description="Indikator (Default) oder Anzahl s11+s12")
    s2: int = Field(ge=0, le=1)
    case: Literal["0", "1.1", "1.2", "1.3", "1.4", "2"]
