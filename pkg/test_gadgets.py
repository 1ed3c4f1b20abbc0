"""
Tests für die Gadget-Familien und ihre Schranken.

Geprüft werden Koeffizienten, Register-Layout, Term-Familien und das
Spektrum gegen H_targ. Die Δ-Werte sind so gewählt, dass die Matrizen
klein bleiben (<= 6 Qubits).
"""

import math

import numpy as np
import pytest

from gadgetforge.errors import ConventionError, ConvergenceConditionError, InputError
from gadgetforge.gadget_lib import (
    build_fifth_order_zzz_gadget,
    build_parallel_subdivision_gadget,
    build_parallel_three_to_two_gadget,
    build_subdivision_gadget,
    build_three_to_two_gadget,
    build_yy_gadget,
    commutation_profile,
    f_exponent,
    high_order_bound_report,
    in_transverse_ising_family,
    in_zzxx_family,
    ot06_subdivision_delta_bound,
    ot06_subdivision_delta_bound_exact,
    parallel_high_order_bound,
    parallel_subdivision_delta_bound,
    sgn,
    subdivision_coefficients,
    subdivision_delta_bound,
    three_to_two_coefficients,
    three_to_two_delta_bound,
)
from gadgetforge.models import TargetSpec
from gadgetforge.pauli_core import OperatorSum, locality
from gadgetforge.recipes import FIG8_ALPHAS, FIG8_FACTORS, _parallel_target, default_target
from gadgetforge.search import minimal_delta
from gadgetforge.spectral import default_z_grid, high_order_term_norm, operator_norm, penalty_split, spectral_error


def _error(build, target: TargetSpec) -> float:
    return spectral_error(build, target.operator()).max_error


# ============================================
# Schranken
# ============================================

class TestBounds:
    def test_subdivision_bound(self):
        """Test: (2|α|/ε + 1)(2‖H_else‖ + |α| + ε) bei α=1, ε=0.05."""
        assert subdivision_delta_bound(1.0, 0.0, 0.05) == pytest.approx(43.05)
        assert subdivision_delta_bound(-1.0, 0.0, 0.05) == pytest.approx(43.05)

    def test_parallel_bound_single_term(self):
        assert parallel_subdivision_delta_bound([1.0], 0.0, 0.05) == pytest.approx(84.05)

    def test_ot06_bound(self):
        assert ot06_subdivision_delta_bound(1.0, 0.0, 0.05) == pytest.approx((1 + math.sqrt(2)) ** 6 / 0.0025)

    def test_ot06_exact_matches_triangle_for_zero_helse(self):
        """Test: Ohne H_else sind exakte Norm und Dreiecksungleichung gleich."""
        exact = ot06_subdivision_delta_bound_exact(OperatorSum.zero(2), 1.0, 0.05)
        assert exact == pytest.approx(ot06_subdivision_delta_bound(1.0, 0.0, 0.05))

    def test_ot06_exact_never_larger(self):
        h_else = OperatorSum.from_string(2, "X0", 0.3) + OperatorSum.from_string(2, "Z1", -0.4)
        exact = ot06_subdivision_delta_bound_exact(h_else, 0.5, 0.01)
        loose = ot06_subdivision_delta_bound(0.5, h_else.norm_bound(), 0.01)
        assert exact <= loose * (1 + 1e-12)

    def test_improved_beats_ot06(self):
        """Test: Neue Schranke ist für kleine ε um Größenordnungen kleiner."""
        for eps in (1e-1, 1e-2, 1e-3):
            assert subdivision_delta_bound(1.0, 0.0, eps) < ot06_subdivision_delta_bound(1.0, 0.0, eps)

    def test_three_to_two_bound(self):
        assert three_to_two_delta_bound(1.0, 0.0, 0.01) == pytest.approx(2.9586e6, rel=1e-3)

    def test_bounds_require_positive_eps(self):
        with pytest.raises(InputError):
            subdivision_delta_bound(1.0, 0.0, 0.0)
        with pytest.raises(InputError):
            three_to_two_delta_bound(1.0, 0.0, -0.1)

    def test_f_exponent(self):
        """Test: Optimum r=3/4 (verbessert) bzw. r=2/3 (OT06)."""
        assert f_exponent(0.75) == pytest.approx(-0.5)
        assert f_exponent(2 / 3, "ot06") == pytest.approx(-1 / 3)
        grid = np.linspace(0.51, 0.99, 97)
        assert min(f_exponent(r) for r in grid) == pytest.approx(-0.5)
        with pytest.raises(InputError):
            f_exponent(0.5)

    def test_parallel_high_order_bound_decreases_with_order(self):
        alphas = [0.1, -0.2]
        delta = 1e6
        max_z = sum(abs(a) for a in alphas) + 0.01
        report = high_order_bound_report(range(3, 9), 2, alphas, 0.0, delta, max_z)
        assert report.converges
        values = [report.order_bounds[k] for k in range(4, 9, 2)]
        assert values == sorted(values, reverse=True)
        assert report.tail_bound is not None and report.tail_bound > 0

    def test_parallel_high_order_bound_needs_gap(self):
        with pytest.raises(ConvergenceConditionError):
            parallel_high_order_bound(3, 1, [1.0], 0.0, 0.5, 1.1)


# ============================================
# Subdivision
# ============================================

class TestSubdivision:
    def test_coefficients(self):
        """Test: -2κλ/Δ = α, κ² + λ² = |α|Δ."""
        for alpha in (0.7, -0.3):
            kappa, lam = subdivision_coefficients(alpha, 10.0)
            assert -2 * kappa * lam / 10.0 == pytest.approx(alpha)
            assert kappa ** 2 + lam ** 2 == pytest.approx(abs(alpha) * 10.0)

    def test_sgn_zero_is_positive(self):
        assert sgn(0.0) == 1.0
        assert sgn(-0.0) == 1.0
        assert sgn(-2.0) == -1.0

    def test_layout(self, zz_target):
        """Test: Ancilla hinter den System-Qubits, Penalty Δ|1><1|."""
        build = build_subdivision_gadget(zz_target, 50.0)
        assert build.n_qubits == 3
        assert build.ancillas == {"w": 2}
        assert build.penalty.coefficient("I") == pytest.approx(25.0)
        assert build.penalty.coefficient("Z2") == pytest.approx(-25.0)
        assert locality(build.total) <= 2

    def test_error_below_eps_at_bound(self, zz_target):
        """Test: Bei Δ = Schranke ist der Spektralfehler <= ε."""
        for eps in (0.1, 0.05):
            delta = subdivision_delta_bound(1.0, 0.0, eps)
            assert _error(build_subdivision_gadget(zz_target, delta), zz_target) <= eps

    def test_error_decreases(self, zz_target):
        errors = [_error(build_subdivision_gadget(zz_target, d), zz_target) for d in (20.0, 200.0, 2000.0)]
        assert errors[0] > errors[1] > errors[2]

    def test_with_helse(self):
        h_else = OperatorSum.from_string(3, "X2", 0.2)
        target = TargetSpec.single(3, -0.5, "X0", "Z1", h_else=h_else)
        delta = subdivision_delta_bound(-0.5, operator_norm(h_else), 0.05)
        assert _error(build_subdivision_gadget(target, delta), target) <= 0.05

    def test_three_factors_rejected(self, zzz_target):
        with pytest.raises(ConventionError):
            build_subdivision_gadget(zzz_target, 10.0)

    def test_parallel(self):
        """Test: m Terme, m Ancillas, Fehler <= ε an der parallelen Schranke."""
        target = default_target("par-sub", [0.5, -0.3])
        delta = parallel_subdivision_delta_bound(target.alphas, 0.0, 0.05)
        build = build_parallel_subdivision_gadget(target, delta)
        assert build.n_ancillas == 2
        assert build.ancilla_qubits == [4, 5]
        assert _error(build, target) <= 0.05

    def test_negative_delta_rejected(self, zz_target):
        with pytest.raises(InputError):
            build_subdivision_gadget(zz_target, -1.0)


# ============================================
# 3 -> 2
# ============================================

class TestThreeToTwo:
    @pytest.mark.parametrize("variant", ["improved", "ot06"])
    @pytest.mark.parametrize("alpha", [0.4, -1.0])
    def test_coefficients_reproduce_alpha(self, variant, alpha):
        """Test: 2κλμ/Δ² = α für beide Varianten."""
        delta = 1e4
        kappa, lam, mu = three_to_two_coefficients(alpha, delta, variant)
        assert 2 * kappa * lam * mu / delta ** 2 == pytest.approx(alpha)

    def test_r_out_of_range(self):
        with pytest.raises(InputError):
            three_to_two_coefficients(1.0, 10.0, "improved", r=0.4)

    def test_two_local(self, zzz_target):
        build = build_three_to_two_gadget(zzz_target, 1e4)
        assert build.n_qubits == 4
        assert locality(build.total) <= 2

    @pytest.mark.parametrize("variant", ["improved", "ot06"])
    def test_error_decreases(self, zzz_target, variant):
        errors = [_error(build_three_to_two_gadget(zzz_target, d, variant), zzz_target) for d in (1e4, 1e6, 1e8)]
        assert errors[0] > errors[1] > errors[2]

    def test_improved_beats_ot06(self, zzz_target):
        """Test: Bei gleichem Δ ist die verbesserte Variante genauer."""
        delta = 1e6
        improved = _error(build_three_to_two_gadget(zzz_target, delta, "improved"), zzz_target)
        ot06 = _error(build_three_to_two_gadget(zzz_target, delta, "ot06"), zzz_target)
        assert improved < ot06

    def test_multi_qubit_factor_rejected(self):
        target = TargetSpec.single(4, 1.0, "Z0 Z1", "Z2", "Z3")
        with pytest.raises(ConventionError):
            build_three_to_two_gadget(target, 100.0)


# ============================================
# Creation-Gadgets
# ============================================

class TestCreation:
    def test_fifth_order_family(self, zzz_target):
        """Test: Nur transversale Ising-Terme im Gadget."""
        build = build_fifth_order_zzz_gadget(zzz_target, 1e4)
        assert in_transverse_ising_family(build.total)
        assert not in_transverse_ising_family(zzz_target.operator())

    def test_fifth_order_error_decreases(self, zzz_target):
        errors = [_error(build_fifth_order_zzz_gadget(zzz_target, d), zzz_target) for d in (1e4, 1e6, 1e8)]
        assert errors[0] > errors[1] > errors[2]

    def test_fifth_order_needs_zzz(self):
        target = TargetSpec.single(3, 1.0, "X0", "Z1", "Z2")
        with pytest.raises(ConventionError):
            build_fifth_order_zzz_gadget(target, 1e4)

    @pytest.mark.parametrize("alpha", [1.0, -0.5])
    def test_yy_family_and_error(self, alpha):
        """Test: YY aus {I, X, Z, XX, ZZ}, Fehler fällt mit Δ."""
        target = TargetSpec.single(2, alpha, "Y0", "Y1")
        builds = [build_yy_gadget(target, d) for d in (1e3, 1e5, 1e7)]
        assert all(in_zzxx_family(b.total) for b in builds)
        errors = [_error(b, target) for b in builds]
        assert errors[0] > errors[1] > errors[2]

    def test_yy_needs_yy(self, zz_target):
        with pytest.raises(ConventionError):
            build_yy_gadget(zz_target, 1e3)


# ============================================
# Paralleles 3 -> 2
# ============================================

class TestParallelThreeToTwo:
    def test_profile_fig7(self, fig7_target):
        """Test: X0Z1Z2 / X0X1Z2 unterscheiden sich nur in B."""
        prof = commutation_profile(*fig7_target.interactions)
        assert (prof.s1, prof.s2, prof.case) == (1, 0, "1.3")

    def test_profile_fig8(self):
        target = _parallel_target(3, FIG8_FACTORS, FIG8_ALPHAS)
        prof = commutation_profile(*target.interactions)
        assert (prof.s2, prof.case, prof.s0) == (1, "2", 0)

    def test_profile_commuting(self):
        target = _parallel_target(3, (("Z0", "Z1", "Z2"), ("Z0", "Z1", "X2")), (1.0, 1.0))
        prof = commutation_profile(*target.interactions)
        assert (prof.s0, prof.case) == (1, "0")

    def test_profile_cross_term(self):
        """Test: B_i trifft A_j auf Qubit 1, Fall 1.1."""
        target = _parallel_target(4, (("X0", "Z1", "Z2"), ("X1", "Z2", "Z3")), (1.0, 1.0))
        prof = commutation_profile(*target.interactions)
        assert (prof.s11, prof.s12, prof.case) == (0, 1, "1.1")
        assert commutation_profile(*target.interactions, s1_mode="count").s1 == 1

    def test_profile_unknown_mode(self, fig7_target):
        with pytest.raises(InputError):
            commutation_profile(*fig7_target.interactions, s1_mode="sum")

    def test_fig7_layout(self, fig7_target):
        build = build_parallel_three_to_two_gadget(fig7_target, 1e5)
        assert build.n_ancillas == 2
        assert locality(build.total) <= 2

    def test_subgadget_for_s2_pair(self):
        """Test: s2-Paar bekommt eine eigene Ancilla, ohne Sub-Gadget nicht."""
        target = _parallel_target(3, FIG8_FACTORS, FIG8_ALPHAS)
        with_sub = build_parallel_three_to_two_gadget(target, 1e5)
        assert with_sub.n_qubits == 6
        assert with_sub.coefficients["sub_gadgets"] == 1
        assert locality(with_sub.total) <= 2
        raw = build_parallel_three_to_two_gadget(target, 1e5, include_4local=False)
        assert raw.n_qubits == 5
        assert raw.coefficients["sub_gadgets"] == 0

    def test_v3_reduces_error(self, fig7_target):
        """Test: Ohne V3 bleibt ein Θ(1) Fehler aus der Flip-Interferenz."""
        delta = 1e6
        with_v3 = _error(build_parallel_three_to_two_gadget(fig7_target, delta), fig7_target)
        without = _error(build_parallel_three_to_two_gadget(fig7_target, delta, include_v3=False), fig7_target)
        assert with_v3 < without

    def test_error_decreases(self, fig7_target):
        errors = [_error(build_parallel_three_to_two_gadget(fig7_target, d), fig7_target) for d in (1e4, 1e8)]
        assert errors[0] > errors[1]

    def test_fig8_error_falls_below_eps(self):
        """Test: Z0Z1Z2 - X0X1X2 mit Sub-Gadget, Fehler fällt mit Δ unter ε."""
        target = _parallel_target(3, FIG8_FACTORS, FIG8_ALPHAS)
        errors = [_error(build_parallel_three_to_two_gadget(target, d), target) for d in (1e4, 1e6, 1e8)]
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 0.05

    def test_high_order_norms_within_bound(self, fig7_target):
        """Test: Terme der Ordnung k+2, k = 3..8, bleiben unter der Schranke bei optimiertem Δ."""
        eps = 0.01
        result = minimal_delta(lambda d: build_parallel_three_to_two_gadget(fig7_target, d), fig7_target, eps)
        build = build_parallel_three_to_two_gadget(fig7_target, result.delta_min)
        split = penalty_split(build.n_qubits, build.ancilla_qubits)
        h_else_norm = operator_norm(fig7_target.h_else)
        max_z = h_else_norm + sum(abs(a) for a in fig7_target.alphas) + eps
        for k in range(3, 9):
            measured = max(
                high_order_term_norm(build.penalty, build.perturbation, split, float(z), k)
                for z in default_z_grid(max_z, 5)
            )
            bound = parallel_high_order_bound(k, 2, fig7_target.alphas, h_else_norm, result.delta_min, max_z)
            assert measured <= bound, f"k={k}"

    def test_v3_separation_over_three_decades(self, fig7_target):
        """Test: Ohne V3 mindestens 10x größerer Fehler bei gleichem Δ, Δ_min bis 1e3·Δ_min."""
        eps = 0.01
        result = minimal_delta(lambda d: build_parallel_three_to_two_gadget(fig7_target, d), fig7_target, eps)
        assert result.achieved_error <= eps * (1 + 1e-3)
        for delta in np.geomspace(result.delta_min, 1e3 * result.delta_min, 7):
            delta = float(delta)
            with_v3 = _error(build_parallel_three_to_two_gadget(fig7_target, delta), fig7_target)
            without = _error(build_parallel_three_to_two_gadget(fig7_target, delta, include_v3=False), fig7_target)
            assert without >= 10 * with_v3, f"Δ={delta:.4g}"

    def test_bad_factor_shape(self):
        target = TargetSpec.single(3, 1.0, "X0 Z1", "Z2")
        with pytest.raises(ConventionError):
            build_parallel_three_to_two_gadget(target, 1e4)
