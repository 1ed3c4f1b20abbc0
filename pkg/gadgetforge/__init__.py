"""
gadgetforge - perturbative Hamiltonian-Gadgets.

Baut Subdivision-, 3->2-, k->3-, 5th-order ZZZ-, YY- und parallele
Gadgets, prüft ihre Spektren per exakter Diagonalisierung und
Self-Energy-Analyse, wertet die geschlossenen Δ-Schranken aus und sucht
numerisch das minimale Δ für eine Fehlertoleranz ε.

Usage:
    # Kommandozeile
    python -m gadgetforge bound --gadget subdivision --alpha 1 --eps 0.05
    python -m gadgetforge fig2 --out fig2.csv

    # Oder programmatisch
    from gadgetforge import TargetSpec, build_subdivision_gadget, spectral_error

    target = TargetSpec.single(2, 0.5, "Z0", "Z1")
    gadget = build_subdivision_gadget(target, delta=43.05)
    print(spectral_error(gadget, target.operator()).max_error)
"""

from .gadget_lib import (
    build_fifth_order_zzz_gadget,
    build_parallel_subdivision_gadget,
    build_parallel_three_to_two_gadget,
    build_subdivision_gadget,
    build_three_to_two_gadget,
    build_yy_gadget,
)
from .models import GadgetBuild, Interaction, ReductionTrace, TargetSpec
from .pauli_core import OperatorSum, PauliString
from .reduction import reduce_k_to_3
from .search import minimal_delta, scaling_slope
from .spectral import spectral_error, theorem1_check

__version__ = "1.0.0"
__all__ = [
    "GadgetBuild",
    "Interaction",
    "OperatorSum",
    "PauliString",
    "ReductionTrace",
    "TargetSpec",
    "build_fifth_order_zzz_gadget",
    "build_parallel_subdivision_gadget",
    "build_parallel_three_to_two_gadget",
    "build_subdivision_gadget",
    "build_three_to_two_gadget",
    "build_yy_gadget",
    "minimal_delta",
    "reduce_k_to_3",
    "scaling_slope",
    "spectral_error",
    "theorem1_check",
]
