"""
Exception-Hierarchie für gadgetforge.

- InputError     -> CLI Exit-Code 1 (Validierung)
- NumericalError -> CLI Exit-Code 2 (numerisches Versagen)
"""

from typing import Optional


class GadgetForgeError(Exception):
    """Basisklasse aller gadgetforge-Fehler."""

    exit_code = 2


# === Validierung ===

class InputError(GadgetForgeError, ValueError):
    exit_code = 1


class SchemaError(InputError):
    """Fehler im Target-JSON, mit Pfad zum fehlerhaften Feld."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class LocalityError(InputError):
    pass


class ConventionError(InputError):
    """Verletzung von Faktor-Form oder Qubit-Reihenfolge."""


# === Numerik ===

class NumericalError(GadgetForgeError, ArithmeticError):
    exit_code = 2


class DimensionOverflowError(NumericalError):
    pass


class NonHermitianError(NumericalError):
    pass


class PoleCollisionError(NumericalError):
    pass


class SingularResolventError(NumericalError):
    pass


class ConvergenceConditionError(NumericalError):
    pass


class SearchError(NumericalError):
    """Delta-Suche gescheitert; samples enthält die (Delta, Fehler)-Proben."""

    def __init__(self, message: str, samples: Optional[list[tuple[float, float]]] = None):
        self.samples = samples or []
        super().__init__(message)
