"""
Partitioner Node - findet alle Terme > 3-body und teilt sie in A|B.

A nimmt die r niedrigsten Qubits, r = ⌈k/2⌉.
"""

from ..errors import LocalityError
from ..models.state import ReductionState
from ..pauli_core import PauliString


def partition_term(term: PauliString) -> tuple[PauliString, PauliString]:
    k = term.weight
    if k < 4:
        raise LocalityError(f"Partition braucht k >= 4, nicht {k} ({term})")
    r = (k + 1) // 2
    return PauliString(term.factors[:r]), PauliString(term.factors[r:])


def partition_node(state: ReductionState) -> dict:
    current = state["current"]
    big_terms = [(c, s) for s, c in current.items() if s.weight > 3]
    splits = [partition_term(s) for _, s in big_terms]
    return {
        "big_terms": big_terms,
        "splits": splits,
    }
