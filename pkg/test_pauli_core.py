"""
Tests für die Pauli-Algebra.

1. Produkte, Phasen und Kommutierung von Strings
2. Kanonische Form von OperatorSum
3. to_matrix (Qubit 0 = LSB)
4. Fehlerfälle: Hermitizität, Dimension, JSON-Schema
"""

import numpy as np
import pytest

from conftest import random_operator
from gadgetforge import config
from gadgetforge.errors import DimensionOverflowError, InputError, NonHermitianError, SchemaError
from gadgetforge.pauli_core import (
    OperatorSum,
    PauliString,
    commutator_square,
    commutes,
    locality,
    multiply,
    projector_term,
    real_polynomial,
    to_matrix,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def _op(n: int, text: str, coeff: float = 1.0) -> OperatorSum:
    return OperatorSum.from_string(n, text, coeff)


class TestPauliString:
    def test_parse_and_str(self):
        """Test: Parsen sortiert nach Qubit, Identität als 'I'."""
        s = PauliString.parse("Z2 X0")
        assert str(s) == "X0 Z2"
        assert s.weight == 2
        assert s.support == frozenset({0, 2})
        assert str(PauliString.parse("I")) == "I"

    def test_duplicate_qubit_rejected(self):
        with pytest.raises(InputError):
            PauliString.from_pairs([(1, "X"), (1, "Z")])

    def test_unknown_axis_rejected(self):
        with pytest.raises(InputError):
            PauliString.single(0, "W")

    def test_multiply_phases(self):
        """Test: XY = iZ, YX = -iZ, XX = I."""
        x, y = PauliString.single(0, "X"), PauliString.single(0, "Y")
        phase, s = multiply(x, y)
        assert phase == pytest.approx(1j)
        assert s == PauliString.single(0, "Z")
        phase, s = multiply(y, x)
        assert phase == pytest.approx(-1j)
        phase, s = multiply(x, x)
        assert phase == pytest.approx(1.0)
        assert s.weight == 0

    def test_commutes(self):
        """Test: Gerade Anzahl Konflikte kommutiert."""
        assert not commutes(PauliString.parse("X0"), PauliString.parse("Z0"))
        assert commutes(PauliString.parse("X0 X1"), PauliString.parse("Z0 Z1"))
        assert commutes(PauliString.parse("X0"), PauliString.parse("Z1"))


class TestOperatorSum:
    def test_canonical_merge_and_drop(self):
        """Test: Gleiche Strings werden zusammengefasst, Nullen entfernt."""
        op = OperatorSum(2, [(0.5, PauliString.parse("Z0")), (0.5, PauliString.parse("Z0")),
                             (1.0, PauliString.parse("X1")), (-1.0, PauliString.parse("X1"))])
        assert len(op) == 1
        assert op.coefficient("Z0") == pytest.approx(1.0)
        assert op.coefficient("X1") == 0.0

    def test_out_of_range_qubit(self):
        with pytest.raises(InputError):
            OperatorSum(2, [(1.0, PauliString.parse("Z2"))])

    def test_product_matches_matrices(self, rng):
        """Test: Algebra auf Strings stimmt mit Matrixprodukt überein."""
        a = random_operator(rng, 3)
        b = random_operator(rng, 3)
        anti = real_polynomial(3, [(1.0, (a, b)), (1.0, (b, a))])
        assert np.allclose(to_matrix(anti), to_matrix(a) @ to_matrix(b) + to_matrix(b) @ to_matrix(a))

    def test_non_hermitian_product_raises(self):
        """Test: X·Y = iZ ist nicht hermitesch."""
        with pytest.raises(NonHermitianError):
            _op(1, "X0") @ _op(1, "Y0")

    def test_real_polynomial_allows_anti_hermitian_steps(self):
        """Test: XYXY = -I trotz komplexer Zwischenschritte."""
        x, y = _op(1, "X0"), _op(1, "Y0")
        result = real_polynomial(1, [(1.0, (x, y, x, y))])
        assert result.is_close(OperatorSum.identity(1, -1.0))

    def test_commutator_square(self):
        """Test: [X, Z]² = -4 I."""
        result = commutator_square(_op(1, "X0"), _op(1, "Z0"))
        assert result.is_close(OperatorSum.identity(1, -4.0))

    def test_commuting_square_vanishes(self):
        assert commutator_square(_op(2, "X0 X1"), _op(2, "Z0 Z1")).is_zero

    def test_power_and_locality(self):
        op = _op(3, "X0 Z1") + _op(3, "Y2")
        assert locality(op) == 2
        assert (op ** 0).is_close(OperatorSum.identity(3))

    def test_json_round_trip(self):
        op = _op(3, "X0 Z2", 0.25) + _op(3, "Y1", -1.5)
        assert OperatorSum.from_json_dict(op.to_json_dict()) == op

    def test_json_schema_path(self):
        """Test: Fehlerpfad zeigt auf das kaputte Feld."""
        data = {"n_qubits": 2, "terms": [{"coeff": 1.0, "paulis": [[0, "X"]]}, {"coeff": 1.0, "paulis": [[5, "Z"]]}]}
        with pytest.raises(SchemaError) as info:
            OperatorSum.from_json_dict(data)
        assert info.value.field.startswith("$.terms[1]")


class TestMatrix:
    def test_lsb_convention(self):
        """Test: Z0 auf 2 Qubits ist I ⊗ Z (Qubit 0 rechts im Kronecker)."""
        assert np.allclose(to_matrix(_op(2, "Z0")), np.kron(I2, Z))
        assert np.allclose(to_matrix(_op(2, "X1")), np.kron(X, I2))
        assert np.allclose(to_matrix(_op(2, "Y0 Z1")), np.kron(Z, Y))

    def test_projector_levels(self):
        """Test: level 1 ist (I - Z)/2 = |1><1|."""
        p1 = to_matrix(projector_term(1, 0, 1))
        assert np.allclose(p1, np.diag([0.0, 1.0]))
        p0 = to_matrix(projector_term(1, 0, 0))
        assert np.allclose(p0, np.diag([1.0, 0.0]))

    def test_hermitian(self, rng):
        m = to_matrix(random_operator(rng, 4, n_terms=10, max_weight=3))
        assert np.allclose(m, m.conj().T)

    def test_dimension_overflow(self, small_max_qubits):
        """Test: Register über MAX_QUBITS wird abgelehnt."""
        small_max_qubits(3)
        assert config.MAX_QUBITS == 3
        with pytest.raises(DimensionOverflowError):
            to_matrix(OperatorSum.identity(4))
