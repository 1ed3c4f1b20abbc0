"""
Pauli-Algebra für reell gewichtete Summen von Pauli-Strings.

- PauliAxis / PauliString / PauliTerm / OperatorSum
- multiply() mit Phase, commutes()
- Kanonische Form (ein Term pro String, |c| < COEFF_TOL fliegt raus)
- projector_term() für |0><0| und |1><1| auf einem Qubit
- to_matrix(): dichte Realisierung, Qubit 0 = niedrigstwertiges Bit
- real_polynomial(): Produkte mit komplexen Zwischenphasen, Ergebnis reell

Alle Objekte sind nach Konstruktion unveränderlich.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from . import config
from .errors import DimensionOverflowError, InputError, NonHermitianError, SchemaError


class PauliAxis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


# Einzel-Qubit Produkttabelle: a*b = phase * c
_PRODUCT = {
    (PauliAxis.X, PauliAxis.Y): (1j, PauliAxis.Z),
    (PauliAxis.Y, PauliAxis.Z): (1j, PauliAxis.X),
    (PauliAxis.Z, PauliAxis.X): (1j, PauliAxis.Y),
    (PauliAxis.Y, PauliAxis.X): (-1j, PauliAxis.Z),
    (PauliAxis.Z, PauliAxis.Y): (-1j, PauliAxis.X),
    (PauliAxis.X, PauliAxis.Z): (-1j, PauliAxis.Y),
}

_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


# ============================================
# PauliString
# ============================================

@dataclass(frozen=True, slots=True)
class PauliString:
    """Tensorprodukt von Einzel-Qubit-Paulis; leere factors = Identität."""

    factors: tuple[tuple[int, PauliAxis], ...] = ()

    def __post_init__(self):
        normalized = []
        previous = -1
        for item in self.factors:
            qubit, axis = item
            if isinstance(qubit, bool) or not isinstance(qubit, (int, np.integer)):
                raise InputError(f"Qubit-Index muss int sein, nicht {qubit!r}")
            qubit = int(qubit)
            if qubit < 0:
                raise InputError(f"Negativer Qubit-Index {qubit}")
            if qubit <= previous:
                raise InputError(f"Qubit-Indizes nicht strikt aufsteigend: {self.factors!r}")
            try:
                axis = PauliAxis(axis)
            except ValueError:
                raise InputError(f"Unbekannte Pauli-Achse {axis!r}") from None
            normalized.append((qubit, axis))
            previous = qubit
        object.__setattr__(self, "factors", tuple(normalized))

    # === Konstruktoren ===

    @classmethod
    def identity(cls) -> "PauliString":
        return cls(())

    @classmethod
    def single(cls, qubit: int, axis: Union[str, PauliAxis]) -> "PauliString":
        return cls(((qubit, axis),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Union[str, PauliAxis]]]) -> "PauliString":
        """Wie der Konstruktor, aber sortiert vorher; doppelte Qubits sind ein Fehler."""
        items = sorted(((int(q), a) for q, a in pairs), key=lambda p: p[0])
        qubits = [q for q, _ in items]
        if len(set(qubits)) != len(qubits):
            raise InputError(f"Doppelter Qubit-Index in {pairs!r}")
        return cls(tuple(items))

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """'X0 Z1' -> PauliString; 'I' oder '' -> Identität."""
        text = text.strip()
        if text in ("", "I"):
            return cls.identity()
        pairs = []
        for token in text.split():
            pairs.append((int(token[1:]), token[0].upper()))
        return cls.from_pairs(pairs)

    # === Eigenschaften ===

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q for q, _ in self.factors)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def axis_on(self, qubit: int) -> Optional[PauliAxis]:
        for q, a in self.factors:
            if q == qubit:
                return a
        return None

    def sort_key(self) -> tuple:
        return (self.weight, tuple((q, a.value) for q, a in self.factors))

    def relabel(self, mapping: Mapping[int, int]) -> "PauliString":
        return PauliString.from_pairs((mapping.get(q, q), a) for q, a in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "I"
        return " ".join(f"{a.value}{q}" for q, a in self.factors)

    def __repr__(self) -> str:
        return f"PauliString('{self}')"


# ============================================
# Algebra auf Strings
# ============================================

def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """M(a)·M(b) = phase·M(product), phase in {±1, ±i}."""
    phase = 1.0 + 0j
    result = dict(a.factors)
    for qubit, axis in b.factors:
        current = result.get(qubit)
        if current is None:
            result[qubit] = axis
        elif current is axis:
            del result[qubit]
        else:
            p, new_axis = _PRODUCT[(current, axis)]
            phase *= p
            result[qubit] = new_axis
    return phase, PauliString(tuple(sorted(result.items())))


def commutes(a: PauliString, b: PauliString) -> bool:
    """True gdw. die Anzahl der Positionen mit verschiedenen Achsen gerade ist."""
    other = dict(b.factors)
    clashes = 0
    for qubit, axis in a.factors:
        partner = other.get(qubit)
        if partner is not None and partner is not axis:
            clashes += 1
    return clashes % 2 == 0


# ============================================
# PauliTerm / OperatorSum
# ============================================

@dataclass(frozen=True, slots=True)
class PauliTerm:
    coeff: float
    string: PauliString

    def __post_init__(self):
        coeff = float(self.coeff)
        if not math.isfinite(coeff):
            raise InputError(f"Koeffizient nicht endlich: {self.coeff!r}")
        object.__setattr__(self, "coeff", coeff)

    def __repr__(self) -> str:
        return f"{self.coeff:+g}*{self.string}"


TermLike = Union[PauliTerm, tuple[float, PauliString]]


class OperatorSum:
    """
    Hermitescher Operator als reelle Linearkombination von Pauli-Strings.

    Kanonisch: höchstens ein Term pro String, Koeffizienten mit
    |c| < COEFF_TOL entfernt, Terme nach (weight, factors) sortiert.
    """

    __slots__ = ("_n_qubits", "_coeffs")
    __hash__ = None

    def __init__(self, n_qubits: int, terms: Iterable[TermLike] = ()):
        if isinstance(n_qubits, bool) or int(n_qubits) != n_qubits or n_qubits < 1:
            raise InputError(f"n_qubits muss positiv sein, nicht {n_qubits!r}")
        acc: dict[PauliString, float] = defaultdict(float)
        for term in terms:
            if not isinstance(term, PauliTerm):
                term = PauliTerm(*term)
            acc[term.string] += term.coeff
        self._init(int(n_qubits), acc)

    def _init(self, n_qubits: int, mapping: Mapping[PauliString, float]):
        tol = config.COEFF_TOL
        coeffs = {}
        for string, coeff in mapping.items():
            if string.factors and string.factors[-1][0] >= n_qubits:
                raise InputError(f"{string} liegt außerhalb von {n_qubits} Qubits")
            if abs(coeff) >= tol:
                coeffs[string] = float(coeff)
        ordered = dict(sorted(coeffs.items(), key=lambda kv: kv[0].sort_key()))
        self._n_qubits = n_qubits
        self._coeffs = ordered

    @classmethod
    def _from_mapping(cls, n_qubits: int, mapping: Mapping[PauliString, float]) -> "OperatorSum":
        obj = cls.__new__(cls)
        obj._init(n_qubits, mapping)
        return obj

    # === Konstruktoren ===

    @classmethod
    def zero(cls, n_qubits: int) -> "OperatorSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: float = 1.0) -> "OperatorSum":
        return cls(n_qubits, [(coeff, PauliString.identity())])

    @classmethod
    def from_string(cls, n_qubits: int, string: Union[str, PauliString], coeff: float = 1.0) -> "OperatorSum":
        if isinstance(string, str):
            string = PauliString.parse(string)
        return cls(n_qubits, [(coeff, string)])

    # === Zugriff ===

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        return tuple(PauliTerm(c, s) for s, c in self._coeffs.items())

    def items(self) -> Iterator[tuple[PauliString, float]]:
        return iter(self._coeffs.items())

    def strings(self) -> tuple[PauliString, ...]:
        return tuple(self._coeffs)

    def coefficient(self, string: Union[str, PauliString]) -> float:
        if isinstance(string, str):
            string = PauliString.parse(string)
        return self._coeffs.get(string, 0.0)

    def support(self) -> frozenset[int]:
        qubits: set[int] = set()
        for s in self._coeffs:
            qubits |= s.support
        return frozenset(qubits)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def norm_bound(self) -> float:
        """Dreiecksungleichung: Summe der |Koeffizienten|."""
        return float(sum(abs(c) for c in self._coeffs.values()))

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    # === Arithmetik ===

    def _check_same(self, other: "OperatorSum"):
        if not isinstance(other, OperatorSum):
            raise InputError(f"Erwartet OperatorSum, nicht {type(other).__name__}")
        if other._n_qubits != self._n_qubits:
            raise InputError(f"n_qubits passen nicht: {self._n_qubits} vs {other._n_qubits}")

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        self._check_same(other)
        acc = defaultdict(float, self._coeffs)
        for s, c in other._coeffs.items():
            acc[s] += c
        return OperatorSum._from_mapping(self._n_qubits, acc)

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-other)

    def __neg__(self) -> "OperatorSum":
        return self.scale(-1.0)

    def scale(self, c: float) -> "OperatorSum":
        c = float(c)
        return OperatorSum._from_mapping(self._n_qubits, {s: v * c for s, v in self._coeffs.items()})

    def __mul__(self, c: float) -> "OperatorSum":
        if isinstance(c, OperatorSum):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "OperatorSum":
        return self.scale(1.0 / float(c))

    def __matmul__(self, other: "OperatorSum") -> "OperatorSum":
        self._check_same(other)
        return real_polynomial(self._n_qubits, [(1.0, (self, other))])

    def __pow__(self, k: int) -> "OperatorSum":
        if k < 0:
            raise InputError("Negative Potenzen nicht unterstützt")
        if k == 0:
            return OperatorSum.identity(self._n_qubits)
        return real_polynomial(self._n_qubits, [(1.0, (self,) * k)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self._n_qubits == other._n_qubits and self._coeffs == other._coeffs

    def is_close(self, other: "OperatorSum", atol: float = 1e-9, rtol: float = 1e-9) -> bool:
        self._check_same(other)
        diff = self - other
        scale = max(self.norm_bound(), other.norm_bound(), 1.0)
        return all(abs(c) <= atol + rtol * scale for _, c in diff.items())

    # === Umbau ===

    def embed(self, n_qubits: int) -> "OperatorSum":
        """Register auf n_qubits erweitern (Ancillas hinten anhängen)."""
        if n_qubits < self._n_qubits:
            raise InputError(f"embed: {n_qubits} < {self._n_qubits}")
        return OperatorSum._from_mapping(n_qubits, self._coeffs)

    def filter_terms(self, predicate: Callable[[PauliString, float], bool]) -> "OperatorSum":
        return OperatorSum._from_mapping(
            self._n_qubits, {s: c for s, c in self._coeffs.items() if predicate(s, c)}
        )

    def relabel(self, mapping: Mapping[int, int], n_qubits: Optional[int] = None) -> "OperatorSum":
        acc: dict[PauliString, float] = defaultdict(float)
        for s, c in self._coeffs.items():
            acc[s.relabel(mapping)] += c
        return OperatorSum._from_mapping(n_qubits or self._n_qubits, acc)

    # === JSON ===

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "n_qubits": self._n_qubits,
            "terms": [
                {"coeff": c, "paulis": [[q, a.value] for q, a in s.factors]}
                for s, c in self._coeffs.items()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Any, path: str = "$") -> "OperatorSum":
        if not isinstance(data, dict):
            raise SchemaError("Objekt erwartet", path)
        n_qubits = data.get("n_qubits")
        if isinstance(n_qubits, bool) or not isinstance(n_qubits, int) or n_qubits < 1:
            raise SchemaError("positive Ganzzahl erwartet", f"{path}.n_qubits")
        raw_terms = data.get("terms", [])
        if not isinstance(raw_terms, list):
            raise SchemaError("Liste erwartet", f"{path}.terms")
        return cls(n_qubits, [parse_json_term(t, n_qubits, f"{path}.terms[{i}]") for i, t in enumerate(raw_terms)])

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"OperatorSum(n={self._n_qubits}, 0)"
        body = " ".join(f"{c:+.6g}*{s}" for s, c in self._coeffs.items())
        return f"OperatorSum(n={self._n_qubits}, {body})"


def parse_json_term(raw: Any, n_qubits: int, path: str) -> PauliTerm:
    if not isinstance(raw, dict):
        raise SchemaError("Objekt erwartet", path)
    coeff = raw.get("coeff")
    if isinstance(coeff, bool) or not isinstance(coeff, (int, float)) or not math.isfinite(coeff):
        raise SchemaError("endliche Zahl erwartet", f"{path}.coeff")
    paulis = raw.get("paulis")
    if not isinstance(paulis, list):
        raise SchemaError("Liste erwartet", f"{path}.paulis")
    pairs = []
    for j, pair in enumerate(paulis):
        where = f"{path}.paulis[{j}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            raise SchemaError("[qubit, achse] erwartet", where)
        qubit, axis = pair
        if isinstance(qubit, bool) or not isinstance(qubit, int) or not 0 <= qubit < n_qubits:
            raise SchemaError(f"Qubit-Index außerhalb 0..{n_qubits - 1}", where)
        if axis not in ("X", "Y", "Z"):
            raise SchemaError(f"Achse {axis!r} unbekannt", where)
        pairs.append((qubit, axis))
    try:
        string = PauliString.from_pairs(pairs)
    except InputError as e:
        raise SchemaError(str(e), f"{path}.paulis") from None
    return PauliTerm(float(coeff), string)


# ============================================
# Modul-Funktionen
# ============================================

def add(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    return a + b


def scale(a: OperatorSum, c: float) -> OperatorSum:
    return a.scale(c)


def projector_term(n_qubits: int, qubit: int, level: int) -> OperatorSum:
    """(I + Z_q)/2 für level 0, (I - Z_q)/2 für level 1."""
    if level not in (0, 1):
        raise InputError(f"level muss 0 oder 1 sein, nicht {level!r}")
    if not 0 <= qubit < n_qubits:
        raise InputError(f"Qubit {qubit} außerhalb von {n_qubits} Qubits")
    sign = 1.0 if level == 0 else -1.0
    return OperatorSum(n_qubits, [(0.5, PauliString.identity()), (0.5 * sign, PauliString.single(qubit, "Z"))])


def locality(op: OperatorSum) -> int:
    return max((s.weight for s in op.strings()), default=0)


def real_polynomial(n_qubits: int, products: Iterable[tuple[complex, Sequence[OperatorSum]]]) -> OperatorSum:
    """
    Summe von Koeffizient * geordnetem Produkt von Operatoren.

    Zwischenergebnisse sind komplex; das Ergebnis muss reell sein
    (hermitesche Kombination), sonst NonHermitianError.
    """
    acc: dict[PauliString, complex] = defaultdict(complex)
    for coeff, factors in products:
        partial: dict[PauliString, complex] = {PauliString.identity(): complex(coeff)}
        for op in factors:
            if op.n_qubits != n_qubits:
                raise InputError(f"n_qubits passen nicht: {op.n_qubits} vs {n_qubits}")
            nxt: dict[PauliString, complex] = defaultdict(complex)
            for s1, c1 in partial.items():
                for s2, c2 in op.items():
                    phase, s = multiply(s1, s2)
                    nxt[s] += c1 * c2 * phase
            partial = nxt
        for s, c in partial.items():
            acc[s] += c

    magnitude = max((abs(c) for c in acc.values()), default=0.0)
    limit = config.HERMITIAN_TOL * max(magnitude, 1.0)
    worst = max((abs(c.imag) for c in acc.values()), default=0.0)
    if worst > limit:
        raise NonHermitianError(f"Produkt nicht hermitesch (Imaginärteil {worst:.3g})")
    return OperatorSum._from_mapping(n_qubits, {s: c.real for s, c in acc.items()})


def commutator_square(f: OperatorSum, g: OperatorSum) -> OperatorSum:
    """([F, G])^2 = FGFG - FGGF - GFFG + GFGF, hermitesch und reell."""
    n = f.n_qubits
    return real_polynomial(n, [
        (1.0, (f, g, f, g)),
        (-1.0, (f, g, g, f)),
        (-1.0, (g, f, f, g)),
        (1.0, (g, f, g, f)),
    ])


def check_dimension(n_qubits: int):
    if n_qubits > config.MAX_QUBITS:
        raise DimensionOverflowError(
            f"{n_qubits} Qubits > Limit {config.MAX_QUBITS} (GADGETFORGE_MAX_QUBITS)"
        )


def _parity(values: np.ndarray, mask: int) -> np.ndarray:
    parity = np.zeros_like(values)
    bit = 0
    while mask >> bit:
        if (mask >> bit) & 1:
            parity ^= (values >> bit) & 1
        bit += 1
    return parity


def to_matrix(op: OperatorSum) -> np.ndarray:
    """Dichte Matrix 2^n x 2^n; Qubit 0 ist das niedrigstwertige Bit."""
    check_dimension(op.n_qubits)
    dim = 1 << op.n_qubits
    idx = np.arange(dim, dtype=np.int64)
    matrix = np.zeros((dim, dim), dtype=complex)

    # P|b> = i^{nY} (-1)^{popcount(b & zmask)} |b ^ xmask>
    for string, coeff in op.items():
        xmask = zmask = 0
        n_y = 0
        for qubit, axis in string.factors:
            if axis is not PauliAxis.Z:
                xmask |= 1 << qubit
            if axis is not PauliAxis.X:
                zmask |= 1 << qubit
            if axis is PauliAxis.Y:
                n_y += 1
        signs = 1 - 2 * _parity(idx, zmask)
        matrix[idx ^ xmask, idx] += coeff * _I_POWERS[n_y % 4] * signs
    return matrix
