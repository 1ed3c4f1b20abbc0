"""
Paralleles 3->2 Gadget für m 3-body Terme mit Einzel-Qubit-Faktoren.

Pro Term eine Ancilla u_i:
    V = H_else + Σ μ_i C_i⊗|1><1|_{u_i} + Σ P_i⊗X_{u_i} + V1 + V2 + V3
    P_i = κ_i A_i + λ_i B_i

Flip-Operatoren verschiedener Ancillas interferieren in vierter Ordnung
und erzeugen Θ(1) Fehler -(1/2Δ³)[P_i, P_j]². V3 hebt diese auf; das
4-lokale Stück in V3 wird optional durch ein eigenes Sub-Gadget ersetzt.
"""

import logging
from typing import Literal, Optional

from ..errors import ConventionError, InputError
from ..models import CommutationProfile, GadgetBuild, Interaction, TargetSpec
from ..pauli_core import OperatorSum, commutator_square, commutes, real_polynomial
from .common import GadgetAssembler, cap_with
from .three_body import three_to_two_coefficients

logger = logging.getLogger(__name__)


def _check_three_single(term: Interaction, where: str):
    if len(term.factors) != 3 or not term.single_qubit_factors:
        raise ConventionError(f"{where}: drei Einzel-Qubit-Faktoren erwartet, nicht {term.label()}")


def commutation_profile(
    term_i: Interaction,
    term_j: Interaction,
    s1_mode: Literal["indicator", "count"] = "indicator",
) -> CommutationProfile:
    """
    Kommutator-Flags der A/B-Faktoren zweier 3-body Terme.

    s11: genau einer von [A_i, A_j], [B_i, B_j] ist ungleich Null
    s12: [A_i, B_j] oder [B_i, A_j] ungleich Null
    s2:  [A_i, A_j] und [B_i, B_j] beide ungleich Null
    """
    _check_three_single(term_i, "term_i")
    _check_three_single(term_j, "term_j")
    if s1_mode not in ("indicator", "count"):
        raise InputError(f"Unbekannter s1_mode {s1_mode!r}")
    a_i, b_i, _ = term_i.factors
    a_j, b_j, _ = term_j.factors

    aa = not commutes(a_i, a_j)
    bb = not commutes(b_i, b_j)
    ab = not commutes(a_i, b_j)
    ba = not commutes(b_i, a_j)

    s11 = int(aa != bb)
    s12 = int(ab or ba)
    s2 = int(aa and bb)
    s1 = s11 + s12 if s1_mode == "count" else min(s11 + s12, 1)

    if s2:
        case = "2"
    elif ba:
        case = "1.1"
    elif ab:
        case = "1.2"
    elif bb:
        case = "1.3"
    elif aa:
        case = "1.4"
    else:
        case = "0"
    return CommutationProfile(s0=int(s1 == 0 and s2 == 0), s11=s11, s12=s12, s1=s1, s2=s2, case=case)


def build_parallel_three_to_two_gadget(
    target: TargetSpec,
    delta: float,
    include_v3: bool = True,
    include_4local: bool = True,
    variant: Literal["improved", "ot06"] = "improved",
    s1_mode: Literal["indicator", "count"] = "indicator",
) -> GadgetBuild:
    terms = target.interactions
    m = len(terms)
    if m < 1:
        raise InputError("mindestens ein 3-body Term nötig")
    for idx, term in enumerate(terms):
        _check_three_single(term, f"interactions[{idx}]")

    coeffs = [three_to_two_coefficients(t.alpha, delta, variant) for t in terms]
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    profiles = {(i, j): commutation_profile(terms[i], terms[j], s1_mode) for i, j in pairs}

    improved = variant == "improved"
    sub_pairs = [
        (i, j) for i, j in pairs
        if improved and include_v3 and include_4local and profiles[(i, j)].s2
    ]

    labels = [f"u{i + 1}" for i in range(m)] + [f"u{i + 1}_{j + 1}" for i, j in sub_pairs]
    family = "par-3to2" if improved else "par-3to2-ot06"
    asm = GadgetAssembler(target, family, delta, labels)
    asm.add(asm.system(target.h_else))

    factors = [tuple(asm.op(f) for f in t.factors) for t in terms]
    flips: list[OperatorSum] = []
    for i, ((kappa, lam, mu), (a, b, c)) in enumerate(zip(coeffs, factors)):
        label = labels[i]
        flip = a * kappa + b * lam
        flips.append(flip)
        norm2 = kappa ** 2 + lam ** 2
        asm.add(
            (c * mu) @ asm.proj(label, 1),
            flip @ asm.x(label),
            (flip @ flip) / delta,
            c * (-norm2 * mu / delta ** 2),
        )
        if improved:
            asm.add((flip ** 4) * (-1 / delta ** 3))
        asm.record(**{f"kappa_{i + 1}": kappa, f"lam_{i + 1}": lam, f"mu_{i + 1}": mu})

    raw_four_local: list[OperatorSum] = []
    if improved and include_v3:
        for i, j in pairs:
            prof = profiles[(i, j)]
            ki, li = coeffs[i][0], coeffs[i][1]
            kj, lj = coeffs[j][0], coeffs[j][1]
            # Summe über (i,j) und (j,i); beide Richtungen sind gleich
            shift = -2 * (prof.s1 + 2 * prof.s2) * (ki * kj) ** 2 / delta ** 3
            asm.add(asm.identity(shift))
            if prof.s2 and (i, j) not in sub_pairs:
                a_i, b_i, _ = factors[i]
                a_j, b_j, _ = factors[j]
                # A_iA_j allein ist anti-hermitesch, daher als ein Produkt
                quartic = real_polynomial(
                    asm.n_qubits, [(4 * ki * kj * li * lj / delta ** 3, (a_i, a_j, b_i, b_j))]
                )
                raw_four_local.append(quartic)
                asm.add(quartic)

    sub_flips = []
    for i, j in sub_pairs:
        label = f"u{i + 1}_{j + 1}"
        sub_flips.append(_add_four_local_subgadget(asm, label, factors[i], factors[j], coeffs[i], coeffs[j]))

    # Kreuzterme der Sub-Gadgets mit allen anderen Flip-Operatoren
    for idx, q in enumerate(sub_flips):
        others = flips + sub_flips[idx + 1:]
        for g in others:
            asm.add(commutator_square(q, g) * (0.5 / delta ** 3))

    if sub_pairs:
        logger.debug(f"par-3to2: {len(sub_pairs)} 4-lokale Sub-Gadgets für Paare {sub_pairs}")
    asm.record(sub_gadgets=len(sub_pairs))
    return asm.build(cap_with(2, [target.h_else] + raw_four_local))


def _add_four_local_subgadget(asm: GadgetAssembler, label: str, factors_i, factors_j, coeffs_i, coeffs_j) -> OperatorSum:
    """
    Erzeugt +(4/Δ³) κ_iκ_jλ_iλ_j A_iA_jB_iB_j in vierter Ordnung über Q R² Q.

    Q = κ_i A_i + λ_j B_j  (an X_u)
    R = -κ_j A_j + λ_i B_i (an |1><1|_u)
    """
    a_i, b_i, _ = factors_i
    a_j, b_j, _ = factors_j
    a, d = coeffs_i[0], coeffs_i[1]
    c, b = -coeffs_j[0], coeffs_j[1]
    delta = asm.delta

    q = a_i * a + b_j * b
    r = a_j * c + b_i * d
    a_ib_j = a_i @ b_j
    a_jb_i = a_j @ b_i
    p0 = asm.proj(label, 0)
    norm_q = a ** 2 + b ** 2
    # Q R ist für antikommutierende Q, R anti-hermitesch, daher als ein Produkt
    qrq = real_polynomial(asm.n_qubits, [(1.0, (q, r, q))])

    asm.add(
        q @ asm.x(label),
        r @ asm.proj(label, 1),
        (asm.identity(norm_q / delta) - qrq / delta ** 2) @ p0,
        a_ib_j * (2 * a * b / delta),
        (a_ib_j * norm_q + asm.identity(2 * a * b)) * (-2 * a * b / delta ** 3),
        ((q @ q) * (c ** 2 + d ** 2) - a_jb_i * (2 * c * d * norm_q)) / delta ** 3,
    )
    return q
