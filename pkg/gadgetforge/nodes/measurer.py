"""
Measurer Node - vergleicht die niedrigsten 2^n Niveaus des neuen H̃^(i)
mit dem vollen Spektrum von H̃^(i-1) und schiebt die Iteration weiter.
"""

import logging
import time

from ..errors import GadgetForgeError
from ..models import IterationRecord
from ..models.state import ReductionState
from ..spectral import compare_low_spectrum

logger = logging.getLogger(__name__)


def measurer_node(state: ReductionState) -> dict:
    gadget = state["gadget"]
    previous = state["current"]
    start = time.perf_counter()
    try:
        report = compare_low_spectrum(gadget.total, previous)
    except GadgetForgeError as e:
        return {"error": str(e), "error_kind": type(e).__name__}
    duration_ms = int((time.perf_counter() - start) * 1000)

    record = IterationRecord(
        iteration=state["iteration"],
        partitions=[f"{a}|{b}" for a, b in state["splits"]],
        delta=state["delta"],
        delta_mode=state["delta_mode"],
        h_else_norm=state["h_else_norm"],
        ancillas_added=gadget.n_ancillas,
        n_qubits=gadget.n_qubits,
        measured_error=report.max_error,
        duration_ms=duration_ms,
    )

    return {
        "current": gadget.total,
        "iteration": state["iteration"] + 1,
        "ancillas": {**state["ancillas"], **gadget.ancillas},
        "ancilla_gaps": {**state["ancilla_gaps"], **gadget.ancilla_gaps},
        "records": [record],
    }
