"""
Gemeinsame Bausteine aller Gadget-Familien.

GadgetAssembler sammelt V Term für Term auf dem erweiterten Register
(System-Qubits vorne, Ancillas dahinter) und baut am Ende den GadgetBuild.
"""

import logging
from typing import Iterable, Optional, Sequence

from ..errors import ConventionError, InputError, LocalityError
from ..models import GadgetBuild, Interaction, TargetSpec
from ..pauli_core import OperatorSum, PauliAxis, PauliString, locality, projector_term

logger = logging.getLogger(__name__)


def sgn(x: float) -> float:
    """Vorzeichen mit sgn(0) = +1."""
    return -1.0 if x < 0 else 1.0


def require_delta(delta: float):
    if not delta > 0:
        raise InputError(f"Delta muss positiv sein, nicht {delta!r}")


def single_interaction(target: TargetSpec, n_factors: Optional[int] = None) -> Interaction:
    """Genau eine Wechselwirkung, optional mit fester Faktorzahl."""
    if len(target.interactions) != 1:
        raise InputError(f"genau eine Wechselwirkung erwartet, nicht {len(target.interactions)}")
    term = target.interactions[0]
    if n_factors is not None and len(term.factors) != n_factors:
        raise ConventionError(f"{n_factors} Faktoren erwartet, nicht {len(term.factors)} ({term.label()})")
    return term


def require_single_qubit_factors(term: Interaction):
    if not term.single_qubit_factors:
        raise ConventionError(f"Faktoren müssen Einzel-Qubit-Paulis sein: {term.label()}")


# ============================================
# Term-Familien
# ============================================

def in_transverse_ising_family(op: OperatorSum) -> bool:
    """Nur I, X_i, Z_i, Z_iZ_j."""
    for s in op.strings():
        axes = {axis for _, axis in s.factors}
        if s.weight == 1 and axes <= {PauliAxis.X, PauliAxis.Z}:
            continue
        if s.weight == 2 and axes == {PauliAxis.Z}:
            continue
        if s.weight == 0:
            continue
        return False
    return True


def in_zzxx_family(op: OperatorSum) -> bool:
    """Nur I, X_i, Z_i, X_iX_j, Z_iZ_j."""
    for s in op.strings():
        axes = {axis for _, axis in s.factors}
        if s.weight == 0:
            continue
        if s.weight == 1 and axes <= {PauliAxis.X, PauliAxis.Z}:
            continue
        if s.weight == 2 and axes in ({PauliAxis.X}, {PauliAxis.Z}):
            continue
        return False
    return True


# ============================================
# Assembler
# ============================================

class GadgetAssembler:
    """
    Baut H̃ = H + V für ein Target plus eine feste Liste von Ancillas.

    Usage:
        asm = GadgetAssembler(target, "subdivision", delta, ["w"])
        asm.add(asm.system(target.h_else))
        asm.add(asm.op(A) @ asm.x("w"))
        build = asm.build(locality_cap=3)
    """

    def __init__(
        self,
        target: TargetSpec,
        family: str,
        delta: float,
        ancilla_labels: Sequence[str],
        gaps: Optional[dict[str, float]] = None,
    ):
        require_delta(delta)
        if len(set(ancilla_labels)) != len(ancilla_labels):
            raise InputError(f"doppelte Ancilla-Labels: {list(ancilla_labels)}")
        self.target = target
        self.family = family
        self.delta = delta
        self.n_system = target.n_qubits
        self.n_qubits = self.n_system + len(ancilla_labels)
        self.ancillas = {label: self.n_system + i for i, label in enumerate(ancilla_labels)}
        self.gaps = {label: (gaps or {}).get(label, delta) for label in ancilla_labels}
        self.coefficients: dict[str, float] = {}
        self._v = OperatorSum.zero(self.n_qubits)

    # === Operatoren auf dem vollen Register ===

    def system(self, op: OperatorSum) -> OperatorSum:
        return op.embed(self.n_qubits)

    def op(self, string: PauliString, coeff: float = 1.0) -> OperatorSum:
        return OperatorSum.from_string(self.n_qubits, string, coeff)

    def identity(self, coeff: float = 1.0) -> OperatorSum:
        return OperatorSum.identity(self.n_qubits, coeff)

    def x(self, label: str) -> OperatorSum:
        return self.op(PauliString.single(self.ancillas[label], "X"))

    def proj(self, label: str, level: int) -> OperatorSum:
        return projector_term(self.n_qubits, self.ancillas[label], level)

    def ground_projector(self) -> OperatorSum:
        """P_- = Π_a |0><0|_a."""
        p = self.identity()
        for label in self.ancillas:
            p = p @ self.proj(label, 0)
        return p

    # === Akkumulation ===

    def add(self, *ops: OperatorSum) -> "GadgetAssembler":
        for op in ops:
            self._v = self._v + op
        return self

    def record(self, **coefficients: float) -> "GadgetAssembler":
        self.coefficients.update({k: float(v) for k, v in coefficients.items()})
        return self

    @property
    def perturbation(self) -> OperatorSum:
        return self._v

    def penalty(self) -> OperatorSum:
        h = OperatorSum.zero(self.n_qubits)
        for label, gap in self.gaps.items():
            h = h + self.proj(label, 1) * gap
        return h

    def build(self, locality_cap: int, target_op: Optional[OperatorSum] = None) -> GadgetBuild:
        penalty = self.penalty()
        total = penalty + self._v
        target_op = target_op if target_op is not None else self.target.operator()
        if locality(total) > locality_cap:
            raise LocalityError(
                f"{self.family}: locality(H̃)={locality(total)} > cap {locality_cap}"
            )
        return GadgetBuild(
            family=self.family,
            penalty=penalty,
            perturbation=self._v,
            total=total,
            ancillas=dict(self.ancillas),
            ancilla_gaps=dict(self.gaps),
            delta=self.delta,
            target=target_op,
            effective_target=self.system(target_op) @ self.ground_projector(),
            system_qubits=self.n_system,
            locality_cap=locality_cap,
            coefficients=dict(self.coefficients),
        )


def cap_with(base: int, others: Iterable[OperatorSum]) -> int:
    """Lokalitäts-Cap: max(base, locality der Zuschauer)."""
    return max([base] + [locality(o) for o in others])
