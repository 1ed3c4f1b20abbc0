"""
Gemeinsame Fixtures für die gadgetforge Tests.

Langsame Tests (7-body Reduktion, Slope-Fits) tragen @pytest.mark.slow
und lassen sich mit `pytest -m "not slow"` überspringen.
"""

import numpy as np
import pytest

from gadgetforge import config
from gadgetforge.models import TargetSpec
from gadgetforge.pauli_core import OperatorSum, PauliString

collect_ignore = ["examples"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: lange numerische Läufe (Minuten)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def zz_target():
    """α Z0Z1 mit α = 1, ‖H_else‖ = 0."""
    return TargetSpec.single(2, 1.0, "Z0", "Z1")


@pytest.fixture
def zzz_target():
    return TargetSpec.single(3, 1.0, "Z0", "Z1", "Z2")


@pytest.fixture
def fig7_target():
    """0.1 X0Z1Z2 - 0.2 X0X1Z2."""
    from gadgetforge.recipes import FIG7_ALPHAS, default_target

    return default_target("par-3to2", FIG7_ALPHAS)


@pytest.fixture
def small_max_qubits(monkeypatch):
    """Setzt das Dimensionslimit für einen Test herunter."""
    def _set(n: int):
        monkeypatch.setattr(config, "MAX_QUBITS", n)
    return _set


def random_operator(rng, n_qubits: int, n_terms: int = 6, max_weight: int = 2) -> OperatorSum:
    """Zufällige reelle Summe von Pauli-Strings bis max_weight."""
    terms = []
    for _ in range(n_terms):
        weight = int(rng.integers(1, max_weight + 1))
        qubits = sorted(rng.choice(n_qubits, size=weight, replace=False).tolist())
        axes = rng.choice(["X", "Y", "Z"], size=weight).tolist()
        terms.append((float(rng.normal()), PauliString.from_pairs(zip(qubits, axes))))
    return OperatorSum(n_qubits, terms)
