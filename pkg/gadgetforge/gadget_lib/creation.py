"""
Creation-Gadgets: erzeugen Kopplungen, die die Hardware nicht hat.

- 5th-order ZZZ: α Z_iZ_jZ_k aus transversalem Ising {I, X, Z, ZZ}
- YY:            α Y_1Y_2 aus {I, X, Z, XX, ZZ}
"""

import logging

from ..errors import ConventionError
from ..models import GadgetBuild, Interaction, TargetSpec
from ..pauli_core import PauliAxis, PauliString
from .common import GadgetAssembler, cap_with, sgn, single_interaction

logger = logging.getLogger(__name__)


def _qubits_with_axis(term: Interaction, axis: PauliAxis, count: int) -> list[int]:
    product = term.product
    if product.weight != count or any(a is not axis for _, a in product.factors):
        raise ConventionError(f"{count}-body {axis.value}-String erwartet, nicht {product}")
    return list(product.qubits)


def build_fifth_order_zzz_gadget(target: TargetSpec, delta: float, label: str = "w") -> GadgetBuild:
    """
    μ = sgn(α)|αΔ⁴/6|^{1/5}, fünfte Ordnung liefert 6μ⁵/Δ⁴ ZZZ = α ZZZ.

    V = H_else + μ(ΣZ)⊗|1><1| + μX_w + (μ²/Δ)|0><0|
        - (μ³/Δ² + 7μ⁵/Δ⁴)(ΣZ)⊗|0><0| + (μ⁴/Δ³)(3I + 2ΣZ_iZ_j)
    """
    term = single_interaction(target)
    qubits = _qubits_with_axis(term, PauliAxis.Z, 3)
    mu = sgn(term.alpha) * abs(term.alpha * delta ** 4 / 6) ** 0.2

    asm = GadgetAssembler(target, "5th-zzz", delta, [label])
    p0, p1 = asm.proj(label, 0), asm.proj(label, 1)
    z_sum = asm.identity(0.0)
    for q in qubits:
        z_sum = z_sum + asm.op(PauliString.single(q, "Z"))
    zz_sum = asm.identity(0.0)
    for i, qi in enumerate(qubits):
        for qj in qubits[i + 1:]:
            zz_sum = zz_sum + asm.op(PauliString.from_pairs([(qi, "Z"), (qj, "Z")]))

    asm.add(
        asm.system(target.h_else),
        (z_sum * mu) @ p1,
        asm.x(label) * mu,
        p0 * (mu ** 2 / delta),
        (z_sum * -(mu ** 3 / delta ** 2 + 7 * mu ** 5 / delta ** 4)) @ p0,
        (asm.identity(3.0) + zz_sum * 2) * (mu ** 4 / delta ** 3),
    )
    asm.record(mu=mu)
    return asm.build(cap_with(2, [target.h_else]))


def build_yy_gadget(target: TargetSpec, delta: float, label: str = "w") -> GadgetBuild:
    """
    κ = (|α|Δ³/4)^{1/4}

    V0 = H_else + κ(Z1 + Z2)⊗|1><1| + κ(X1 - sgn(α)X2)⊗X_w
    V1 = 2κ²/Δ [|0><0|_w - sgn(α) X1X2]
    V2 = -4κ⁴/Δ³ Z1Z2

    Die dritte Ordnung hebt mit dem unprojizierten X1X2 das Echo der
    vierten auf; übrig bleibt +α Y1Y2.
    """
    term = single_interaction(target)
    q1, q2 = _qubits_with_axis(term, PauliAxis.Y, 2)
    s = sgn(term.alpha)
    kappa = (abs(term.alpha) * delta ** 3 / 4) ** 0.25

    asm = GadgetAssembler(target, "yy", delta, [label])
    x1, x2 = asm.op(PauliString.single(q1, "X")), asm.op(PauliString.single(q2, "X"))
    z1, z2 = asm.op(PauliString.single(q1, "Z")), asm.op(PauliString.single(q2, "Z"))

    asm.add(
        asm.system(target.h_else),
        ((z1 + z2) * kappa) @ asm.proj(label, 1),
        ((x1 - x2 * s) * kappa) @ asm.x(label),
        (asm.proj(label, 0) - (x1 @ x2) * s) * (2 * kappa ** 2 / delta),
        (z1 @ z2) * (-4 * kappa ** 4 / delta ** 3),
    )
    asm.record(kappa=kappa)
    return asm.build(cap_with(2, [target.h_else]))
