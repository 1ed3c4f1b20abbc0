"""
3->2 Gadget: α A⊗B⊗C aus 2-lokalen Termen in dritter Ordnung.

Beide Varianten erfüllen 2κλμ/Δ² = α; sie unterscheiden sich in der
Wahl von r und in den Kompensationstermen.
"""

import logging
from typing import Literal, Optional

from ..errors import InputError
from ..models import GadgetBuild, TargetSpec
from .common import GadgetAssembler, cap_with, require_single_qubit_factors, sgn, single_interaction

logger = logging.getLogger(__name__)

DEFAULT_R = {"improved": 0.75, "ot06": 2 / 3}


def three_to_two_coefficients(
    alpha: float,
    delta: float,
    variant: Literal["improved", "ot06"] = "improved",
    r: Optional[float] = None,
) -> tuple[float, float, float]:
    """(κ, λ, μ) für die gewählte Variante."""
    if variant not in DEFAULT_R:
        raise InputError(f"Unbekannte Variante {variant!r}")
    r = DEFAULT_R[variant] if r is None else r
    if not 0.5 < r < 1:
        raise InputError(f"r muss in (1/2, 1) liegen, nicht {r!r}")
    c = (abs(alpha) / 2) ** (1 / 3)
    s = sgn(alpha)
    if variant == "improved":
        return s * c * delta ** r, c * delta ** r, c * delta ** (2 - 2 * r)
    return -c * delta ** r, c * delta ** r, -s * c * delta ** (2 - 2 * r)


def build_three_to_two_gadget(
    target: TargetSpec,
    delta: float,
    variant: Literal["improved", "ot06"] = "improved",
    r: Optional[float] = None,
    label: str = "w",
) -> GadgetBuild:
    term = single_interaction(target, 3)
    require_single_qubit_factors(term)
    kappa, lam, mu = three_to_two_coefficients(term.alpha, delta, variant, r)

    family = "3to2" if variant == "improved" else "3to2-ot06"
    asm = GadgetAssembler(target, family, delta, [label])
    a, b, c = (asm.op(f) for f in term.factors)
    flip = a * kappa + b * lam
    p0, p1 = asm.proj(label, 0), asm.proj(label, 1)
    norm2 = kappa ** 2 + lam ** 2

    asm.add(
        asm.system(target.h_else),
        (c * mu) @ p1,
        flip @ asm.x(label),
    )

    if variant == "improved":
        ab = a @ b
        # V1: zweite Ordnung plus das 1-lokale Echo der dritten
        asm.add(
            p0 * (norm2 / delta),
            ab * (2 * kappa * lam / delta),
            (c * (-norm2 * mu / delta ** 2)) @ p0,
        )
        # V2: vierte Ordnung des unprojizierten AB-Terms
        s = sgn(term.alpha)
        asm.add(
            (p0 * norm2 + ab * (2 * kappa * lam)) * (-2 * kappa * lam * s / delta ** 3),
        )
    else:
        asm.add(
            (flip @ flip) / delta,
            c * (-norm2 * mu / delta ** 2),
        )

    asm.record(kappa=kappa, lam=lam, mu=mu, r=r if r is not None else DEFAULT_R[variant])
    return asm.build(cap_with(2, [target.h_else]))
