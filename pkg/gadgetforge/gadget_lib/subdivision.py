"""
Subdivision-Gadgets: α A⊗B mit einer Ancilla pro Term.

κ = sgn(α)√(|α|Δ/2), λ = -√(|α|Δ/2); zweite Ordnung liefert
-(κA+λB)²/Δ = -|α| + α A⊗B, die Kompensation hebt das -|α| auf.
"""

import logging
import math
from typing import Optional, Sequence

from ..errors import ConventionError, InputError, NumericalError
from ..models import GadgetBuild, TargetSpec
from ..pauli_core import locality
from .common import GadgetAssembler, cap_with, sgn, single_interaction

logger = logging.getLogger(__name__)


def subdivision_coefficients(alpha: float, delta: float) -> tuple[float, float]:
    root = math.sqrt(abs(alpha) * delta / 2)
    return sgn(alpha) * root, -root


def _split_cap(target: TargetSpec) -> int:
    widest = max(max(f.weight for f in term.factors) for term in target.interactions)
    return cap_with(widest + 1, [target.h_else])


def build_subdivision_gadget(target: TargetSpec, delta: float, label: str = "w") -> GadgetBuild:
    """
    V = H_else + (1/Δ)(κ²A² + λ²B²)⊗|0><0|_w + (κA + λB)⊗X_w
    """
    term = single_interaction(target, 2)
    asm = GadgetAssembler(target, "subdivision", delta, [label])
    a, b = (asm.op(f) for f in term.factors)
    kappa, lam = subdivision_coefficients(term.alpha, delta)

    shift = (a @ a) * (kappa ** 2 / delta) + (b @ b) * (lam ** 2 / delta)
    if not shift.is_close(asm.identity(abs(term.alpha)), atol=1e-9 * max(1.0, abs(term.alpha))):
        raise NumericalError(f"Kompensation ist nicht |α|·I: {shift!r}")

    asm.add(
        asm.system(target.h_else),
        shift @ asm.proj(label, 0),
        (a * kappa + b * lam) @ asm.x(label),
    )
    asm.record(kappa=kappa, lam=lam)
    return asm.build(_split_cap(target))


def build_parallel_subdivision_gadget(
    target: TargetSpec,
    delta: float,
    labels: Optional[Sequence[str]] = None,
) -> GadgetBuild:
    """
    m Terme parallel, Penalty Σ Δ|1><1|_{w_i}.

    Die Kompensation (1/Δ)Σ(κ_i² + λ_i²) trägt keinen Projektor; P_- ist
    für m >= 3 nicht 2-lokal realisierbar.
    """
    m = len(target.interactions)
    if m < 1:
        raise InputError("paralleles Subdivision-Gadget braucht mindestens einen Term")
    labels = list(labels) if labels is not None else [f"w{i + 1}" for i in range(m)]
    asm = GadgetAssembler(target, "par-sub", delta, labels)
    asm.add(asm.system(target.h_else))

    for i, (term, label) in enumerate(zip(target.interactions, labels)):
        if len(term.factors) != 2:
            raise ConventionError(f"2 Faktoren erwartet, nicht {len(term.factors)} ({term.label()})")
        a, b = (asm.op(f) for f in term.factors)
        kappa, lam = subdivision_coefficients(term.alpha, delta)
        asm.add(
            (a @ a) * (kappa ** 2 / delta) + (b @ b) * (lam ** 2 / delta),
            (a * kappa + b * lam) @ asm.x(label),
        )
        asm.record(**{f"kappa_{i + 1}": kappa, f"lam_{i + 1}": lam})

    build = asm.build(_split_cap(target))
    logger.debug(f"par-sub: m={m}, Δ={delta:.6g}, locality={locality(build.total)}")
    return build
