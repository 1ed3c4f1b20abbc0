"""
Checker - entscheidet nach jedem Schritt wie es weitergeht.

- Fehler im State?        → "failed" bzw. "overflow" → END
- Noch Terme > 3-body?    → "has_pending" → Partitioner (nächste Iteration)
- Alles <= 3-body?        → "all_done" → Finalize
"""

from .. import config
from ..models.state import ReductionState
from ..pauli_core import locality


def _error_decision(state: ReductionState):
    if not state.get("error"):
        return None
    if state.get("error_kind") == "DimensionOverflowError":
        return "overflow"
    return "failed"


def check_step(state: ReductionState) -> str:
    """Zwischen gap -> build -> measure: weiter oder Abbruch."""
    return _error_decision(state) or "ready"


def check_reduction_status(state: ReductionState) -> str:
    """
    Conditional Edge nach dem Measurer.

    Returns:
        "failed" / "overflow" - Fehler im State → END
        "has_pending" - noch Terme > 3-body → Partitioner
        "all_done" - fertig → Finalize
    """
    decision = _error_decision(state)
    if decision:
        return decision

    current = state["current"]
    if locality(current) > 3:
        # Nächste Iteration hätte mindestens eine Ancilla mehr
        if current.n_qubits + 1 > config.MAX_QUBITS:
            return "overflow"
        return "has_pending"
    return "all_done"
