"""
Geschlossene Schranken für die Penalty-Lücke Δ.

Alle Funktionen sind rein und nehmen ‖H_else‖ als Zahl, damit Sweeps
ohne Operatoren auskommen. Nur die *_exact Variante diagonalisiert.
"""

import logging
import math
from typing import Literal, Sequence

from ..errors import ConvergenceConditionError, InputError
from ..models import HighOrderBoundReport
from ..pauli_core import OperatorSum

logger = logging.getLogger(__name__)


def _require_eps(epsilon: float):
    if not epsilon > 0:
        raise InputError(f"eps muss positiv sein, nicht {epsilon!r}")


def _require_alphas(alphas: Sequence[float]) -> list[float]:
    values = [abs(float(a)) for a in alphas]
    if not values:
        raise InputError("mindestens ein alpha nötig")
    return values


# ============================================
# Subdivision
# ============================================

def subdivision_delta_bound(alpha: float, h_else_norm: float, epsilon: float) -> float:
    """(2|α|/ε + 1)(2‖H_else‖ + |α| + ε)"""
    _require_eps(epsilon)
    a = abs(alpha)
    return (2 * a / epsilon + 1) * (2 * h_else_norm + a + epsilon)


def ot06_subdivision_delta_bound(alpha: float, h_else_norm: float, epsilon: float) -> float:
    """(‖H_else‖ + |α| + √(2|α|))^6 / ε^2, ‖H_else + |α|I‖ per Dreiecksungleichung."""
    _require_eps(epsilon)
    a = abs(alpha)
    return (h_else_norm + a + math.sqrt(2 * a)) ** 6 / epsilon ** 2


def ot06_subdivision_delta_bound_exact(h_else: OperatorSum, alpha: float, epsilon: float) -> float:
    """Wie oben, aber mit der exakten Norm ‖H_else + |α|I‖."""
    from ..spectral import operator_norm

    _require_eps(epsilon)
    a = abs(alpha)
    norm = operator_norm(h_else + OperatorSum.identity(h_else.n_qubits, a))
    return (norm + math.sqrt(2 * a)) ** 6 / epsilon ** 2


def parallel_subdivision_delta_bound(alphas: Sequence[float], h_else_norm: float, epsilon: float) -> float:
    """[2(Σ√|α_i|)²/ε + 1](2‖H_else‖ + 2Σ|α_i| + ε)"""
    _require_eps(epsilon)
    values = _require_alphas(alphas)
    root_sum = sum(math.sqrt(a) for a in values)
    return (2 * root_sum ** 2 / epsilon + 1) * (2 * h_else_norm + 2 * sum(values) + epsilon)


# ============================================
# 3 -> 2
# ============================================

def three_to_two_delta_bound(alpha: float, h_else_norm: float, epsilon: float) -> float:
    """
    Δ >= ¼(-b + √(b² - 4c))² mit

        max z = ‖H_else‖ + |α| + ε
        η = ‖H_else‖ + 2^{2/3}|α|^{4/3}
        ξ = 2^{-1/3}|α|^{1/3} + 2^{1/3}|α|^{2/3}
        b = -[ξ + 2^{4/3}|α|^{2/3}/ε · (max z + η + ξ²)]
        c = -(1 + 2^{4/3}|α|^{2/3}ξ/ε)(max z + η)
    """
    _require_eps(epsilon)
    a = abs(alpha)
    max_z = h_else_norm + a + epsilon
    eta = h_else_norm + 2 ** (2 / 3) * a ** (4 / 3)
    xi = 2 ** (-1 / 3) * a ** (1 / 3) + 2 ** (1 / 3) * a ** (2 / 3)
    pref = 2 ** (4 / 3) * a ** (2 / 3) / epsilon
    b = -(xi + pref * (max_z + eta + xi ** 2))
    c = -(1 + pref * xi) * (max_z + eta)
    return 0.25 * (-b + math.sqrt(b * b - 4 * c)) ** 2


def f_exponent(r: float, variant: Literal["improved", "ot06"] = "improved") -> float:
    """Dominante Δ-Potenz der Fehlerterme als Funktion von r (1/2 < r < 1)."""
    if not 0.5 < r < 1:
        raise InputError(f"r muss in (1/2, 1) liegen, nicht {r!r}")
    if variant == "improved":
        return max(1 - 2 * r, 6 * r - 5)
    if variant == "ot06":
        return max(1 - 2 * r, 2 * r - 2, 4 * r - 3, 6 * r - 5)
    raise InputError(f"Unbekannte Variante {variant!r}")


# ============================================
# Paralleles 3 -> 2: Terme höherer Ordnung
# ============================================

def parallel_vs_vf(alphas: Sequence[float], h_else_norm: float, delta: float) -> tuple[float, float]:
    """Normschranken v_s (ohne Flip) und v_f (mit Flip) von V_+."""
    values = _require_alphas(alphas)
    root_delta = math.sqrt(delta)
    cross = sum(
        8 * 2 ** (-4 / 3) * ai ** (2 / 3) * aj ** (2 / 3)
        for i, ai in enumerate(values)
        for j, aj in enumerate(values)
        if i != j
    )
    v_s = (
        h_else_norm
        + 2 ** (-1 / 3) * root_delta * sum(a ** (1 / 3) for a in values)
        + 2 ** (4 / 3) * root_delta * sum(a ** (2 / 3) for a in values)
        + sum(values)
        + 2 ** (8 / 3) * sum(a ** (4 / 3) for a in values)
        + cross
    )
    v_f = 2 ** (2 / 3) * delta ** 0.75 * sum(a ** (1 / 3) for a in values)
    return v_s, v_f


def _flip_orders(k: int) -> range:
    # Gerade Flip-Anzahlen 2..k; Hin- und Rückflip müssen sich paaren
    return range(2, k + 1, 2)


def parallel_high_order_bound(
    k: int,
    m: int,
    alphas: Sequence[float],
    h_else_norm: float,
    delta: float,
    max_z: float,
) -> float:
    """Schranke für ‖V_-+ (G_+V_+)^k G_+ V_+-‖ (Ordnung k+2)."""
    if k < 1 or m < 1:
        raise InputError(f"k und m müssen >= 1 sein (k={k}, m={m})")
    d = delta - max_z
    if d <= 0:
        raise ConvergenceConditionError(f"Δ - max z = {d:.4g} <= 0")
    v_s, v_f = parallel_vs_vf(alphas, h_else_norm, delta)
    if 2 * m * v_f >= d or (v_s > 0 and m * v_f / v_s <= 1):
        logger.warning(f"Konvergenzbedingung verletzt bei Δ={delta:.6g}, Schranke nur formal")
    total = sum((m * v_f) ** kf * v_s ** (k - kf) for kf in _flip_orders(k))
    return v_f ** 2 / d * (m + 1) * (2 / d) ** k * total


def parallel_high_order_tail_bound(
    m: int,
    alphas: Sequence[float],
    h_else_norm: float,
    delta: float,
    max_z: float,
) -> float:
    """Summe aller Ordnungen k >= 3, geschlossen aufsummiert."""
    d = delta - max_z
    v_s, v_f = parallel_vs_vf(alphas, h_else_norm, delta)
    if v_f == 0:
        return 0.0
    p = 2 * m * v_f / d if d > 0 else float("inf")
    q = m * v_f / v_s if v_s > 0 else float("inf")
    if not p < 1:
        raise ConvergenceConditionError(f"2 m v_f = {2 * m * v_f:.4g} >= Δ - max z = {d:.4g}")
    if not q > 1:
        raise ConvergenceConditionError(f"m v_f / v_s = {q:.4g} <= 1")
    ratio = 1.0 if math.isinf(q) else q ** 2 / (q ** 2 - 1)
    return v_f ** 2 / d * ratio * p ** 2 / (1 - p ** 2) * (m + 1) * (p ** 2 + 2 * v_s / d)


def high_order_bound_report(
    orders: Sequence[int],
    m: int,
    alphas: Sequence[float],
    h_else_norm: float,
    delta: float,
    max_z: float,
) -> HighOrderBoundReport:
    v_s, v_f = parallel_vs_vf(alphas, h_else_norm, delta)
    d = delta - max_z
    gap_ok = d > 0 and 2 * m * v_f < d
    ratio_ok = v_s > 0 and m * v_f / v_s > 1
    order_bounds = {k: parallel_high_order_bound(k, m, alphas, h_else_norm, delta, max_z) for k in orders}
    tail = None
    if gap_ok and ratio_ok:
        tail = parallel_high_order_tail_bound(m, alphas, h_else_norm, delta, max_z)
    return HighOrderBoundReport(
        v_s=v_s,
        v_f=v_f,
        order_bounds=order_bounds,
        tail_bound=tail,
        gap_condition=gap_ok,
        ratio_condition=ratio_ok,
    )
