"""
Spektrale Werkzeuge: exakte Diagonalisierung, Normen, Resolventen,
Self-Energy Σ_-(z) (exakt und als Reihe) und der Theorem-1 Check.

Σ_-(z) = z·I_- - (Π_- (z - H̃)^{-1} Π_-)^{-1}
Reihe:  Σ_-(z) = H_- + V_- + Σ_k V_-+ (G_+ V_+)^k G_+ V_+-
"""

import logging
import warnings
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from . import config
from .errors import (
    InputError,
    NonHermitianError,
    PoleCollisionError,
    SingularResolventError,
)
from .models import EigenSystem, GadgetBuild, SelfEnergyEval, SpectralReport, SubspaceSplit, Theorem1Result
from .pauli_core import OperatorSum, check_dimension, to_matrix

logger = logging.getLogger(__name__)

MatrixLike = Union[OperatorSum, np.ndarray]


# ============================================
# Hilfsfunktionen
# ============================================

def as_matrix(op: MatrixLike) -> np.ndarray:
    if isinstance(op, OperatorSum):
        return to_matrix(op)
    m = np.asarray(op)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"Quadratische Matrix erwartet, nicht Shape {m.shape}")
    dim = m.shape[0]
    if dim > (1 << config.MAX_QUBITS):
        check_dimension(int(np.ceil(np.log2(dim))))
    return m


def check_hermitian(m: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > config.HERMITIAN_TOL * scale:
        raise NonHermitianError(f"Matrix nicht hermitesch (Abweichung {asym:.3g})")


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _is_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diag(m)))


# ============================================
# Diagonalisierung und Normen
# ============================================

def eigh(m: MatrixLike) -> EigenSystem:
    matrix = as_matrix(m)
    check_hermitian(matrix)
    values, vectors = scipy.linalg.eigh(matrix)
    return EigenSystem(eigenvalues=values, eigenvectors=vectors)


def eigvalsh(m: MatrixLike) -> np.ndarray:
    matrix = as_matrix(m)
    check_hermitian(matrix)
    return scipy.linalg.eigvalsh(matrix)


def eigvalsh_lowest(m: MatrixLike, count: int) -> np.ndarray:
    """Die niedrigsten count Eigenwerte, aufsteigend."""
    matrix = as_matrix(m)
    check_hermitian(matrix)
    dim = matrix.shape[0]
    if not 1 <= count <= dim:
        raise InputError(f"count={count} außerhalb 1..{dim}")
    if count == dim:
        return scipy.linalg.eigvalsh(matrix)
    return scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, count - 1])


def operator_norm(op: MatrixLike) -> float:
    """Spektralnorm max |λ| eines hermiteschen Operators."""
    if isinstance(op, OperatorSum) and op.is_zero:
        return 0.0
    values = eigvalsh(op)
    return float(max(abs(values[0]), abs(values[-1])))


# ============================================
# Unterräume
# ============================================

def penalty_split(n_qubits: int, ancilla_qubits: Sequence[int], cutoff: float = 0.0) -> SubspaceSplit:
    """L_- = alle Ancillas in |0>; bei angehängten Ancillas ist das der System-Block vorne."""
    check_dimension(n_qubits)
    dim = 1 << n_qubits
    mask = 0
    for q in ancilla_qubits:
        mask |= 1 << q
    minus = (np.arange(dim) & mask) == 0
    return _diagonal_split(minus, cutoff)


def _diagonal_split(minus: np.ndarray, cutoff: float) -> SubspaceSplit:
    dim = minus.size
    p_minus = np.diag(minus.astype(complex))
    basis = np.eye(dim, dtype=complex)[:, minus]
    return SubspaceSplit(
        cutoff=cutoff,
        projector_minus=p_minus,
        projector_plus=np.eye(dim, dtype=complex) - p_minus,
        basis_minus=basis,
        diagonal=True,
    )


def split_from_operator(h: MatrixLike, cutoff: float) -> SubspaceSplit:
    """Π_- projiziert auf Eigenräume von H unter cutoff."""
    matrix = as_matrix(h)
    check_hermitian(matrix)
    if _is_diagonal(matrix):
        return _diagonal_split(np.real(np.diag(matrix)) < cutoff, cutoff)
    values, vectors = scipy.linalg.eigh(matrix)
    basis = vectors[:, values < cutoff]
    p_minus = basis @ basis.conj().T
    return SubspaceSplit(
        cutoff=cutoff,
        projector_minus=p_minus,
        projector_plus=np.eye(matrix.shape[0], dtype=complex) - p_minus,
        basis_minus=basis,
    )


def restrict(m: np.ndarray, split: SubspaceSplit) -> np.ndarray:
    b = split.basis_minus
    return b.conj().T @ m @ b


def _h_eff_on_minus(h_eff: MatrixLike, split: SubspaceSplit, full_dim: int) -> np.ndarray:
    """H_eff entweder auf dem vollen Register, auf L_- oder als System-Operator."""
    d_minus = split.dim_minus
    m = as_matrix(h_eff)
    if m.shape[0] == full_dim:
        return restrict(m, split)
    if m.shape[0] == d_minus:
        return m
    raise InputError(f"H_eff Dimension {m.shape[0]} passt weder zu {full_dim} noch zu {d_minus}")


# ============================================
# Resolventen
# ============================================

def _pole_check(z: float, levels: np.ndarray):
    for level in np.atleast_1d(levels):
        if abs(z - level) <= config.POLE_TOL * max(1.0, abs(level)):
            raise PoleCollisionError(f"z={z:g} trifft Pol bei {level:g}")


def penalty_resolvent_plus(z: float, m: int, delta: float) -> np.ndarray:
    """Diagonal 1/(z - h(x)Δ) für x != 0...0, Null auf dem Grundzustand."""
    if m < 1:
        raise InputError("mindestens eine Ancilla nötig")
    strings = np.arange(1 << m)
    weights = np.array([bin(x).count("1") for x in strings], dtype=float)
    levels = weights[1:] * delta
    _pole_check(z, np.unique(levels))
    entries = np.zeros(1 << m)
    entries[1:] = 1.0 / (z - levels)
    return np.diag(entries)


def _plus_resolvent(h: np.ndarray, split: SubspaceSplit, z: float) -> Callable[[np.ndarray], np.ndarray]:
    """Liefert X -> G_+(z) X."""
    if split.diagonal and _is_diagonal(h):
        diag = np.real(np.diag(h))
        plus = np.real(np.diag(split.projector_plus)) > 0.5
        _pole_check(z, np.unique(diag[plus]))
        g = np.zeros(diag.size, dtype=complex)
        g[plus] = 1.0 / (z - diag[plus])
        return lambda x: g[:, None] * x

    values, vectors = scipy.linalg.eigh(h)
    plus = values >= split.cutoff
    _pole_check(z, values[plus])
    u = vectors[:, plus]
    inv = 1.0 / (z - values[plus])
    return lambda x: u @ (inv[:, None] * (u.conj().T @ x))


# ============================================
# Self-Energy
# ============================================

def self_energy_exact(
    h_tilde: MatrixLike,
    split: SubspaceSplit,
    z: float,
    h_eff: Optional[MatrixLike] = None,
) -> SelfEnergyEval:
    m = as_matrix(h_tilde)
    check_hermitian(m)
    dim = m.shape[0]
    basis = split.basis_minus

    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            x = scipy.linalg.solve(z * np.eye(dim) - m, basis, assume_a="her")
            g_minus = basis.conj().T @ x
            sigma = z * np.eye(split.dim_minus) - scipy.linalg.inv(g_minus)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as e:
            raise SingularResolventError(f"Resolvente bei z={z:g} singulär: {e}") from None

    sigma = symmetrize(sigma)
    deviation = None
    if h_eff is not None:
        deviation = operator_norm(sigma - _h_eff_on_minus(h_eff, split, dim))
    return SelfEnergyEval(z=z, mode="exact", sigma=sigma, deviation=deviation)


def _series_pieces(h: MatrixLike, v: MatrixLike, split: SubspaceSplit, z: float):
    hm = as_matrix(h)
    vm = as_matrix(v)
    check_hermitian(hm)
    check_hermitian(vm)
    if hm.shape != vm.shape:
        raise InputError("H und V haben verschiedene Dimensionen")
    p_plus = split.projector_plus
    apply_g = _plus_resolvent(hm, split, z)
    v_pp = p_plus @ vm @ p_plus
    v_pm = p_plus @ vm @ split.basis_minus
    return hm, vm, apply_g, v_pp, v_pm


def self_energy_series(
    h: MatrixLike,
    v: MatrixLike,
    split: SubspaceSplit,
    z: float,
    order: int,
    h_eff: Optional[MatrixLike] = None,
) -> SelfEnergyEval:
    """Partialsumme bis Störungsordnung `order` (order=1: H_- + V_-)."""
    if order < 1:
        raise InputError(f"order muss >= 1 sein, nicht {order}")
    hm, vm, apply_g, v_pp, v_pm = _series_pieces(h, v, split, z)

    gap = _excited_floor(hm, split)
    v_norm = operator_norm(vm)
    if gap is not None and v_norm > gap / 2:
        logger.warning(f"‖V‖={v_norm:.4g} > Δ/2={gap / 2:.4g}, Reihe konvergiert evtl. nicht")

    sigma = restrict(hm + vm, split)
    w = apply_g(v_pm) if order >= 2 else None
    for k in range(order - 1):
        sigma = sigma + v_pm.conj().T @ w
        if k < order - 2:
            w = apply_g(v_pp @ w)

    sigma = symmetrize(sigma)
    deviation = None
    if h_eff is not None:
        deviation = operator_norm(sigma - _h_eff_on_minus(h_eff, split, hm.shape[0]))
    return SelfEnergyEval(z=z, mode="series", order=order, sigma=sigma, deviation=deviation)


def high_order_term_norm(h: MatrixLike, v: MatrixLike, split: SubspaceSplit, z: float, k: int) -> float:
    """‖V_-+ (G_+ V_+)^k G_+ V_+-‖, der Term der Ordnung k+2."""
    if k < 0:
        raise InputError("k muss >= 0 sein")
    _, _, apply_g, v_pp, v_pm = _series_pieces(h, v, split, z)
    w = apply_g(v_pm)
    for _ in range(k):
        w = apply_g(v_pp @ w)
    term = symmetrize(v_pm.conj().T @ w)
    return operator_norm(term)


def _excited_floor(hm: np.ndarray, split: SubspaceSplit) -> Optional[float]:
    if split.diagonal and _is_diagonal(hm):
        plus = np.real(np.diag(split.projector_plus)) > 0.5
        if not plus.any():
            return None
        return float(np.min(np.real(np.diag(hm))[plus]))
    return None


# ============================================
# Spektralfehler
# ============================================

def compare_low_spectrum(big: MatrixLike, reference: OperatorSum) -> SpectralReport:
    """Niedrigste 2^n Niveaus von big gegen das volle Spektrum von reference."""
    d = 1 << reference.n_qubits
    target_levels = eigvalsh(reference)
    gadget_levels = eigvalsh_lowest(big, d)
    per_level = np.abs(gadget_levels - target_levels)
    return SpectralReport(
        gadget_levels=gadget_levels,
        target_levels=target_levels,
        per_level_error=per_level,
        max_error=float(np.max(per_level)),
    )


def spectral_error(gadget: GadgetBuild, target: OperatorSum) -> SpectralReport:
    if target.n_qubits != gadget.system_qubits:
        raise InputError(
            f"Target hat {target.n_qubits} Qubits, Gadget {gadget.system_qubits} System-Qubits"
        )
    return compare_low_spectrum(gadget.total, target)


# ============================================
# Theorem 1
# ============================================

def default_z_grid(max_z: float, points: Optional[int] = None) -> np.ndarray:
    return np.linspace(-max_z, max_z, points or config.Z_GRID_POINTS)


def theorem1_check(
    h: MatrixLike,
    v: MatrixLike,
    h_eff: MatrixLike,
    epsilon: float,
    z_grid: Optional[Sequence[float]] = None,
    max_z: Optional[float] = None,
) -> Theorem1Result:
    """
    True gdw. ‖V‖ <= Δ/2, max z < Δ/2 und max_z ‖Σ_-(z) - H_eff‖ <= ε über dem Grid.

    H muss Grundenergie 0 und Lücke Δ haben; cutoff ist Δ/2.
    Default-Grid: [-max z, max z] mit max z = ‖H_eff‖ + ε.
    """
    hm = as_matrix(h)
    vm = as_matrix(v)
    levels = eigvalsh(hm)
    scale = max(1.0, float(np.max(np.abs(levels))))
    v_norm = operator_norm(vm)

    if abs(levels[0]) > 1e-9 * scale:
        return Theorem1Result(passed=False, worst_deviation=float("inf"), v_norm=v_norm, gap=0.0,
                              max_z=0.0, reason="H hat keine Grundenergie 0")
    excited = levels[levels > 1e-9 * scale]
    if excited.size == 0:
        return Theorem1Result(passed=False, worst_deviation=float("inf"), v_norm=v_norm, gap=0.0,
                              max_z=0.0, reason="H hat keine Lücke")
    gap = float(excited[0])

    split = split_from_operator(hm, gap / 2)
    h_eff_minus = _h_eff_on_minus(h_eff, split, hm.shape[0])
    if max_z is None:
        max_z = operator_norm(h_eff_minus) + epsilon
    grid = np.asarray(z_grid) if z_grid is not None else default_z_grid(max_z)

    h_tilde = hm + vm
    worst_dev = -1.0
    worst_z = None
    for z in grid:
        try:
            dev = self_energy_exact(h_tilde, split, float(z), h_eff_minus).deviation
        except (SingularResolventError, PoleCollisionError):
            dev = float("inf")
        if dev > worst_dev:
            worst_dev, worst_z = dev, float(z)

    reason = None
    if v_norm > gap / 2:
        reason = f"‖V‖={v_norm:.4g} > Δ/2"
    elif max_z >= gap / 2:
        reason = f"max z={max_z:.4g} >= Δ/2"
    elif worst_dev > epsilon:
        reason = f"Abweichung {worst_dev:.4g} > ε bei z={worst_z:.4g}"
    return Theorem1Result(
        passed=reason is None,
        worst_z=worst_z,
        worst_deviation=worst_dev,
        v_norm=v_norm,
        gap=gap,
        max_z=float(max_z),
        reason=reason,
    )
