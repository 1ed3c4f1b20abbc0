"""
Gap Selector Node - wählt Δ für die aktuelle Iteration.

analytical: Schranke des parallelen Subdivision-Gadgets
            (bzw. Einzel-Schranke bei bound_kind="single" und einem Term)
optimized:  minimales Δ per Bisektion, analytische Schranke als obere Klammer
"""

import logging

from ..errors import GadgetForgeError
from ..gadget_lib import (
    build_parallel_subdivision_gadget,
    parallel_subdivision_delta_bound,
    subdivision_delta_bound,
)
from ..models.state import ReductionState
from ..spectral import operator_norm
from .builder import iteration_labels, iteration_target

logger = logging.getLogger(__name__)


def analytical_delta(alphas: list[float], h_else_norm: float, epsilon: float, bound_kind: str) -> float:
    if bound_kind == "single" and len(alphas) == 1:
        return subdivision_delta_bound(alphas[0], h_else_norm, epsilon)
    return parallel_subdivision_delta_bound(alphas, h_else_norm, epsilon)


def gap_selector_node(state: ReductionState) -> dict:
    from ..search import minimal_delta

    target = iteration_target(state)
    epsilon = state["epsilon"]
    try:
        h_else_norm = operator_norm(target.h_else)
        delta = analytical_delta(target.alphas, h_else_norm, epsilon, state["bound_kind"])

        if state["delta_mode"] == "optimized":
            labels = iteration_labels(state["iteration"], len(target.interactions))
            result = minimal_delta(
                lambda d: build_parallel_subdivision_gadget(target, d, labels=labels),
                target.operator(),
                epsilon,
                tol_rel=state["tol_rel"],
                hi=delta,
                h_else_norm=h_else_norm,
                alphas=target.alphas,
            )
            delta = result.delta_min
    except GadgetForgeError as e:
        logger.error(f"Gap-Wahl gescheitert: {e}")
        return {"error": str(e), "error_kind": type(e).__name__}

    return {"delta": delta, "h_else_norm": h_else_norm}
