"""
Builder Node - wendet das parallele Subdivision-Gadget auf alle
großen Terme der aktuellen Iteration an.
"""

import logging

from ..errors import GadgetForgeError
from ..gadget_lib import build_parallel_subdivision_gadget
from ..models import Interaction, TargetSpec
from ..models.state import ReductionState
from ..pauli_core import check_dimension

logger = logging.getLogger(__name__)


def iteration_target(state: ReductionState) -> TargetSpec:
    """H̃^(i) = H_else^(i) + Σ α_j A_j⊗B_j, H_else^(i) = alles <= 3-body."""
    current = state["current"]
    rest = current.filter_terms(lambda s, c: s.weight <= 3)
    interactions = tuple(
        Interaction(alpha=c, factors=split)
        for (c, _), split in zip(state["big_terms"], state["splits"])
    )
    return TargetSpec(h_else=rest, interactions=interactions)


def iteration_labels(iteration: int, count: int) -> list[str]:
    return [f"w{iteration}.{j + 1}" for j in range(count)]


def builder_node(state: ReductionState) -> dict:
    iteration = state["iteration"]
    target = iteration_target(state)
    try:
        check_dimension(target.n_qubits + len(target.interactions))
        gadget = build_parallel_subdivision_gadget(
            target,
            state["delta"],
            labels=iteration_labels(iteration, len(target.interactions)),
        )
    except GadgetForgeError as e:
        logger.error(f"Builder Fehler in Iteration {iteration}: {e}")
        return {"error": str(e), "error_kind": type(e).__name__}

    return {"gadget": gadget}
