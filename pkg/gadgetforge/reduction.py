"""
k->3 Reduktion - der LangGraph Loop.

Jede Iteration teilt alle Terme > 3-body per parallelem Subdivision-Gadget:

    ┌───────────┐
    │   START   │
    └─────┬─────┘
          ▼
    ┌───────────┐
    │ PARTITION │ ◄─────────────────────────┐  Terme > 3-body -> A|B
    └─────┬─────┘                           │
          ▼                                 │
    ┌───────────┐                           │
    │    GAP    │ ── failed ──► END         │  Δ analytisch oder optimiert
    └─────┬─────┘                           │
          ▼ ready                           │
    ┌───────────┐                           │
    │   BUILD   │ ── overflow ──► END       │  paralleles Subdivision-Gadget
    └─────┬─────┘                           │
          ▼ ready                           │
    ┌───────────┐                           │
    │  MEASURE  │ ── has_pending ───────────┘  Spektrum vs. H̃^(i-1)
    └─────┬─────┘
          ▼ all_done
    ┌───────────┐
    │ FINALIZE  │ ──► END                      End-to-End Fehler vs. H_targ
    └───────────┘
"""

import logging
import time
import uuid
from typing import Literal, Sequence

from langgraph.graph import END, StateGraph

from . import config, errors
from .errors import DimensionOverflowError, GadgetForgeError, InputError, LocalityError, NumericalError
from .gadget_lib.common import GadgetAssembler
from .logging_config import GadgetLogger
from .models import ReductionTrace, TargetSpec
from .models.state import ReductionState
from .nodes.builder import builder_node as _builder_node
from .nodes.checker import check_reduction_status as _check_reduction_status, check_step as _check_step
from .nodes.gap_selector import gap_selector_node as _gap_selector_node
from .nodes.measurer import measurer_node as _measurer_node
from .nodes.partitioner import partition_node as _partition_node, partition_term
from .pauli_core import check_dimension
from .spectral import compare_low_spectrum

logger = logging.getLogger(__name__)

# Logger pro Run (parallele Reduktionen in Sweeps)
_loggers: dict[str, GadgetLogger] = {}


def _get_logger(run_id: str = None) -> GadgetLogger:
    if run_id and run_id in _loggers:
        return _loggers[run_id]
    return GadgetLogger(run_id)


def _register_logger(run_id: str, log: GadgetLogger):
    _loggers[run_id] = log


def _cleanup_logger(run_id: str):
    _loggers.pop(run_id, None)


# ============================================
# Reine Hilfsfunktionen
# ============================================

def iterations_needed(k: int) -> int:
    """⌈log₂(k-2)⌉ für k >= 4, 0 für k = 3."""
    if k < 3:
        raise InputError(f"k muss >= 3 sein, nicht {k}")
    # ⌈log₂ n⌉ == (n-1).bit_length() für n >= 1
    return (k - 3).bit_length()


def serial_error_budget(per_step_errors: Sequence[float]) -> float:
    """Dreiecksungleichung: Summe der Einzelfehler."""
    return float(sum(per_step_errors))


# ============================================
# Logged Node Wrappers
# ============================================

def partition_node(state: ReductionState) -> dict:
    log = _get_logger(state.get("run_id"))
    result = _partition_node(state)
    log.partition_decision(state["iteration"], [f"{a}|{b}" for a, b in result["splits"]])
    return result


def gap_selector_node(state: ReductionState) -> dict:
    log = _get_logger(state.get("run_id"))
    result = _gap_selector_node(state)
    if "delta" in result:
        log.delta_chosen(state["iteration"], result["delta"], state["delta_mode"], result["h_else_norm"])
    else:
        log.error("gap", result.get("error", "unbekannt"))
    return result


def builder_node(state: ReductionState) -> dict:
    log = _get_logger(state.get("run_id"))
    result = _builder_node(state)
    gadget = result.get("gadget")
    if gadget is not None:
        log.gadget_built(gadget.family, gadget.delta, gadget.n_ancillas, gadget.n_qubits, gadget.locality_cap)
    else:
        log.error("builder", result.get("error", "unbekannt"))
    return result


def measurer_node(state: ReductionState) -> dict:
    log = _get_logger(state.get("run_id"))
    result = _measurer_node(state)
    for record in result.get("records", []):
        log.iteration_measured(record.iteration, record.measured_error, state["epsilon"], record.duration_ms)
    return result


def check_step(state: ReductionState) -> str:
    decision = _check_step(state)
    if decision != "ready":
        _get_logger(state.get("run_id")).checker_decision(decision, state.get("error"))
    return decision


def check_reduction_status(state: ReductionState) -> str:
    decision = _check_reduction_status(state)
    reason = f"Iteration {state['iteration'] - 1}, {state['current'].n_qubits} Qubits"
    _get_logger(state.get("run_id")).checker_decision(decision, reason)
    return decision


def finalize_node(state: ReductionState) -> dict:
    """Setzt den End-Gadget aus allen Iterationen zusammen."""
    target = state["target"]
    ancillas = state["ancillas"]
    labels = sorted(ancillas, key=ancillas.get)
    last_delta = state["records"][-1].delta if state["records"] else state.get("delta", 0.0)
    try:
        asm = GadgetAssembler(
            TargetSpec(h_else=target), "k-to-3", last_delta, labels, gaps=state["ancilla_gaps"]
        )
        asm.add(state["current"] - asm.penalty())
        gadget = asm.build(locality_cap=3, target_op=target)
        report = compare_low_spectrum(gadget.total, target)
    except GadgetForgeError as e:
        return {"error": str(e), "error_kind": type(e).__name__}
    return {"final_gadget": gadget, "end_to_end_error": report.max_error}


# ============================================
# Graph Builder
# ============================================

def create_reduction_graph():
    """Kompilierter LangGraph für die k->3 Reduktion."""
    graph = StateGraph(ReductionState)

    # === Nodes ===
    graph.add_node("partition", partition_node)
    graph.add_node("gap", gap_selector_node)
    graph.add_node("build", builder_node)
    graph.add_node("measure", measurer_node)
    graph.add_node("finalize", finalize_node)

    graph.set_entry_point("partition")
    graph.add_edge("partition", "gap")

    stop = {"failed": END, "overflow": END}
    graph.add_conditional_edges("gap", check_step, {"ready": "build", **stop})
    graph.add_conditional_edges("build", check_step, {"ready": "measure", **stop})
    graph.add_conditional_edges(
        "measure",
        check_reduction_status,
        {
            "has_pending": "partition",     # Loop: nächste Iteration
            "all_done": "finalize",         # alles <= 3-body
            **stop,
        },
    )
    graph.add_edge("finalize", END)

    return graph.compile()


# ============================================
# Runner
# ============================================

def _raise_from_state(state: dict):
    kind = state.get("error_kind") or "NumericalError"
    exc_type = getattr(errors, kind, None)
    if not (isinstance(exc_type, type) and issubclass(exc_type, GadgetForgeError)):
        exc_type = NumericalError
    raise exc_type(state["error"])


def reduce_k_to_3(
    target: TargetSpec,
    epsilon: float,
    delta_mode: Literal["analytical", "optimized"] = "analytical",
    bound_kind: Literal["parallel", "single"] = "parallel",
    tol_rel: float = None,
) -> ReductionTrace:
    """
    Reduziert H_else + α·(k-body String) iterativ auf <= 3-body.

    Raises:
        LocalityError: k < 4
        DimensionOverflowError: Endregister über GADGETFORGE_MAX_QUBITS
        SearchError: Δ-Suche im optimized Modus gescheitert
    """
    if not epsilon > 0:
        raise InputError(f"eps muss positiv sein, nicht {epsilon!r}")
    if delta_mode not in ("analytical", "optimized"):
        raise InputError(f"Unbekannter delta_mode {delta_mode!r}")
    if bound_kind not in ("parallel", "single"):
        raise InputError(f"Unbekannter bound_kind {bound_kind!r}")
    if len(target.interactions) != 1:
        raise InputError("genau ein k-body Term erwartet")
    k = target.interactions[0].weight
    if k < 4:
        raise LocalityError(f"Reduktion braucht k >= 4, nicht {k}")
    check_dimension(target.n_qubits + k - 3)

    run_id = str(uuid.uuid4())
    log = GadgetLogger(run_id)
    _register_logger(run_id, log)
    start = time.perf_counter()
    target_op = target.operator()

    initial_state = {
        "run_id": run_id,
        "target": target_op,
        "epsilon": epsilon,
        "delta_mode": delta_mode,
        "bound_kind": bound_kind,
        "tol_rel": tol_rel if tol_rel is not None else config.SEARCH_TOL_REL,
        "current": target_op,
        "iteration": 1,
        "ancillas": {},
        "ancilla_gaps": {},
        "big_terms": [],
        "splits": [],
        "h_else_norm": 0.0,
        "delta": 0.0,
        "gadget": None,
        "records": [],
        "error": None,
        "error_kind": None,
        "final_gadget": None,
        "end_to_end_error": None,
    }

    success = False
    try:
        graph = create_reduction_graph()
        final_state = graph.invoke(initial_state, {"recursion_limit": 8 * iterations_needed(k) + 16})

        if final_state.get("error"):
            _raise_from_state(final_state)
        if final_state.get("final_gadget") is None:
            raise DimensionOverflowError(
                f"Reduktion bräuchte mehr als {config.MAX_QUBITS} Qubits (GADGETFORGE_MAX_QUBITS)"
            )

        records = final_state["records"]
        trace = ReductionTrace(
            k=k,
            epsilon=epsilon,
            iterations=records,
            cumulative_error_budget=len(records) * epsilon,
            measured_end_to_end_error=final_state["end_to_end_error"],
            final_gadget=final_state["final_gadget"],
        )
        success = True
        return trace
    finally:
        total_ms = int((time.perf_counter() - start) * 1000)
        log.run_complete(success, total_ms, {"k": k, "mode": delta_mode})
        _cleanup_logger(run_id)


__all__ = [
    "create_reduction_graph",
    "iterations_needed",
    "partition_term",
    "reduce_k_to_3",
    "serial_error_budget",
]
