"""
Tests für die spektrale Schicht: Normen, Unterräume, Self-Energy, Theorem-1 Check.
"""

import math

import numpy as np
import pytest

from conftest import random_operator
from gadgetforge.errors import InputError, NonHermitianError, PoleCollisionError, SingularResolventError
from gadgetforge.gadget_lib import build_subdivision_gadget, build_three_to_two_gadget, subdivision_delta_bound
from gadgetforge.models import SubspaceSplit, TargetSpec
from gadgetforge.pauli_core import OperatorSum, projector_term, to_matrix
from gadgetforge.spectral import (
    compare_low_spectrum,
    eigh,
    eigvalsh_lowest,
    high_order_term_norm,
    operator_norm,
    penalty_resolvent_plus,
    penalty_split,
    self_energy_exact,
    self_energy_series,
    spectral_error,
    split_from_operator,
    theorem1_check,
)


class TestBasics:
    def test_operator_norm(self):
        op = OperatorSum.from_string(1, "Z0") + OperatorSum.from_string(1, "X0", 0.5)
        assert operator_norm(op) == pytest.approx(math.sqrt(1.25))
        assert operator_norm(OperatorSum.zero(3)) == 0.0

    def test_non_hermitian_matrix(self):
        with pytest.raises(NonHermitianError):
            operator_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_eigh_residual(self, rng):
        """Test: Eigenpaare aufsteigend, Residuum unter 1e-9 ‖M‖."""
        op = random_operator(rng, 3, n_terms=6, max_weight=2)
        m = to_matrix(op)
        system = eigh(op)
        assert np.all(np.diff(system.eigenvalues) >= 0)
        norm = operator_norm(op)
        for value, vector in zip(system.eigenvalues, system.eigenvectors.T):
            assert np.linalg.norm(m @ vector - value * vector) <= 1e-9 * max(norm, 1.0)

    def test_eigvalsh_lowest(self):
        m = np.diag([3.0, -1.0, 2.0, 0.0])
        assert np.allclose(eigvalsh_lowest(m, 2), [-1.0, 0.0])
        with pytest.raises(InputError):
            eigvalsh_lowest(m, 5)

    def test_penalty_split(self):
        """Test: Ancilla 2 in |0> sind die ersten 4 Basiszustände."""
        split = penalty_split(3, [2])
        assert split.dim_minus == 4
        assert split.diagonal
        assert np.allclose(split.basis_minus, np.eye(8)[:, :4])
        assert np.allclose(split.projector_minus + split.projector_plus, np.eye(8))

    def test_split_from_operator_matches_penalty(self):
        h = to_matrix(projector_term(3, 2, 1) * 10.0)
        split = split_from_operator(h, 5.0)
        assert split.dim_minus == 4
        assert np.allclose(split.projector_minus, penalty_split(3, [2]).projector_minus)

    def test_subspace_split_classmethod(self):
        assert SubspaceSplit.for_ancillas(2, [1]).dim_minus == 2


class TestResolvent:
    def test_penalty_resolvent_plus(self):
        g = penalty_resolvent_plus(1.0, 2, 10.0)
        assert g[0, 0] == 0.0
        assert g[1, 1] == pytest.approx(1 / (1.0 - 10.0))
        assert g[3, 3] == pytest.approx(1 / (1.0 - 20.0))

    def test_pole_collision(self):
        with pytest.raises(PoleCollisionError):
            penalty_resolvent_plus(10.0, 1, 10.0)

    def test_singular_exact_resolvent(self):
        """Test: z auf einem Eigenwert von H̃ -> SingularResolventError."""
        h_tilde = np.diag([0.0, 10.0])
        split = penalty_split(1, [0])
        with pytest.raises(SingularResolventError):
            self_energy_exact(h_tilde, split, 0.0)


class TestSelfEnergy:
    def test_exact_equals_h_minus_for_decoupled(self):
        """Test: Ohne Kopplung an L_+ ist Σ_-(z) = H̃ auf L_-."""
        h_tilde = np.diag([1.5, -0.5, 7.0, 9.0])
        split = penalty_split(2, [1])
        sigma = self_energy_exact(h_tilde, split, 0.3).sigma
        assert np.allclose(sigma, np.diag([1.5, -0.5]))

    @pytest.mark.parametrize("seed", range(20))
    def test_series_converges_to_exact(self, seed):
        """Test: Reihe bis Ordnung 15 trifft die exakte Self-Energy."""
        rng = np.random.default_rng(seed)
        h = to_matrix(projector_term(3, 2, 1) * 10.0)
        v_op = random_operator(rng, 3, n_terms=8, max_weight=3)
        v = to_matrix(v_op) * (2.5 / operator_norm(v_op))
        split = penalty_split(3, [2])
        z = -3.0
        exact = self_energy_exact(h + v, split, z).sigma
        series = self_energy_series(h, v, split, z, 15).sigma
        assert np.max(np.abs(exact - series)) < 1e-6

    def test_series_order_one(self, zz_target):
        """Test: Ordnung 1 ist H_- + V_-."""
        build = build_subdivision_gadget(zz_target, 100.0)
        split = penalty_split(build.n_qubits, build.ancilla_qubits)
        first = self_energy_series(build.penalty, build.perturbation, split, 0.0, 1).sigma
        total = to_matrix(build.total)
        assert np.allclose(first, total[:4, :4])

    def test_second_order_reproduces_target(self, zz_target):
        """Test: Subdivision ist in zweiter Ordnung exakt bis auf O(1/Δ)."""
        build = build_subdivision_gadget(zz_target, 1e4)
        split = penalty_split(build.n_qubits, build.ancilla_qubits)
        res = self_energy_series(build.penalty, build.perturbation, split, 0.0, 2, h_eff=zz_target.operator())
        assert res.deviation < 1e-3

    def test_series_rejects_order_zero(self, zz_target):
        build = build_subdivision_gadget(zz_target, 100.0)
        split = penalty_split(build.n_qubits, build.ancilla_qubits)
        with pytest.raises(InputError):
            self_energy_series(build.penalty, build.perturbation, split, 0.0, 0)

    def test_high_order_term_vanishes_without_v_plus(self, zz_target):
        """Test: Subdivision hat V_++ = 0, also nur die zweite Ordnung."""
        build = build_subdivision_gadget(zz_target, 1e3)
        split = penalty_split(build.n_qubits, build.ancilla_qubits)
        assert high_order_term_norm(build.penalty, build.perturbation, split, 0.5, 0) > 0
        assert high_order_term_norm(build.penalty, build.perturbation, split, 0.5, 2) == pytest.approx(0.0, abs=1e-12)

    def test_high_order_term_shrinks(self, zzz_target):
        build = build_three_to_two_gadget(zzz_target, 1e4)
        split = penalty_split(build.n_qubits, build.ancilla_qubits)
        norms = [high_order_term_norm(build.penalty, build.perturbation, split, 0.5, k) for k in (1, 3, 5)]
        assert norms[0] > norms[1] > norms[2]


class TestSpectralError:
    def test_identical_spectrum(self):
        op = OperatorSum.from_string(2, "Z0 Z1")
        report = compare_low_spectrum(op, op)
        assert report.max_error == pytest.approx(0.0, abs=1e-12)

    def test_target_size_mismatch(self, zz_target):
        build = build_subdivision_gadget(zz_target, 100.0)
        with pytest.raises(InputError):
            spectral_error(build, OperatorSum.zero(3))


class TestTheorem1:
    def test_passes_above_bound(self, zz_target):
        delta = 4 * subdivision_delta_bound(1.0, 0.0, 0.05)
        build = build_subdivision_gadget(zz_target, delta)
        result = theorem1_check(build.penalty, build.perturbation, build.effective_target, 0.05)
        assert result.passed, result.reason
        assert result.gap == pytest.approx(delta)

    def test_fails_when_v_too_large(self, zz_target):
        build = build_subdivision_gadget(zz_target, 2.0)
        result = theorem1_check(build.penalty, build.perturbation, build.effective_target, 0.05)
        assert not result
        assert "‖V‖" in result.reason

    def test_requires_ground_energy_zero(self):
        h = np.diag([1.0, 5.0])
        result = theorem1_check(h, np.zeros((2, 2)), np.zeros((1, 1)), 0.1)
        assert not result.passed

    def test_passing_implies_spectral_error(self):
        """
        Test: Wenn der Check besteht, liegt der Spektralfehler unter ε.

        50 zufällige Subdivision-Instanzen mit kleinem H_else.
        """
        rng = np.random.default_rng(7)
        eps = 0.05
        checked = 0
        for _ in range(50):
            alpha = float(rng.choice([-1, 1]) * rng.uniform(0.2, 1.0))
            h_else = random_operator(rng, 2, n_terms=2, max_weight=1) * 0.05
            target = TargetSpec.single(2, alpha, "Z0", "X1", h_else=h_else)
            h_norm = operator_norm(h_else)
            bound = subdivision_delta_bound(alpha, h_norm, eps)
            delta = float(rng.uniform(max(bound / 2, 4 * (h_norm + abs(alpha) + eps)), 2 * bound))
            build = build_subdivision_gadget(target, delta)
            result = theorem1_check(build.penalty, build.perturbation, build.effective_target, eps)
            if result.passed:
                checked += 1
                assert spectral_error(build, target.operator()).max_error <= eps
        assert checked > 0
