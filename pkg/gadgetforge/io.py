"""
Datei-I/O: Target-JSON, CSV-Daten und Sidecar-Metadaten.

Target-Format:

    {
      "n_qubits": 3,
      "terms": [{"coeff": 0.1, "paulis": [[0, "X"], [1, "Z"], [2, "Z"]]}],
      "interactions": [{"term": 0, "factors": [[0], [1], [2]]}]
    }

Ein getaggter Term ist ein Gadget-Ziel; α ist sein Koeffizient und
"factors" partitioniert seinen Träger. Alle anderen Terme bilden H_else.

Schreiben passiert immer atomar (Temp-Datei im Zielordner, dann os.replace),
damit ein abgebrochener Lauf keine halben CSVs hinterlässt.
"""

import csv
import io as _stdio
import json
import logging
import os
import platform
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import scipy
from pydantic import ValidationError

from . import config
from .errors import InputError, SchemaError
from .models import Interaction, TargetSpec
from .pauli_core import OperatorSum, PauliString, parse_json_term

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ============================================
# Atomares Schreiben
# ============================================

def atomic_write(path: PathLike, data: Union[str, bytes]):
    """Schreibt data nach path über eine Temp-Datei im selben Ordner."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise InputError(f"Ausgabeordner {parent} existiert nicht")
    payload = data.encode("utf-8") if isinstance(data, str) else data

    fd, tmp_path = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    logger.debug(f"geschrieben: {path} ({len(payload)} Bytes)")


# ============================================
# Target-JSON
# ============================================

def _parse_factors(raw: Any, term_string: PauliString, path: str) -> tuple[PauliString, ...]:
    if not isinstance(raw, list) or not raw:
        raise SchemaError("nicht-leere Liste von Qubit-Listen erwartet", path)

    support = term_string.support
    seen: set[int] = set()
    factors = []
    for j, group in enumerate(raw):
        where = f"{path}[{j}]"
        if not isinstance(group, list) or not group:
            raise SchemaError("nicht-leere Qubit-Liste erwartet", where)
        for q in group:
            if isinstance(q, bool) or not isinstance(q, int):
                raise SchemaError(f"Qubit-Index erwartet, nicht {q!r}", where)
            if q not in support:
                raise SchemaError(f"Qubit {q} liegt nicht im Träger des Terms", where)
            if q in seen:
                raise SchemaError(f"Faktoren überlappen auf Qubit {q}", where)
            seen.add(q)
        wanted = set(group)
        factors.append(PauliString.from_pairs((q, a) for q, a in term_string.factors if q in wanted))

    missing = support - seen
    if missing:
        raise SchemaError(f"Faktoren decken Qubits {sorted(missing)} nicht ab", path)
    return tuple(factors)


def parse_target(data: Any) -> TargetSpec:
    """Validiert ein bereits geladenes Target-Objekt."""
    h_all = OperatorSum.from_json_dict(data)
    n_qubits = h_all.n_qubits
    raw_terms = data.get("terms", [])
    terms = [parse_json_term(t, n_qubits, f"$.terms[{i}]") for i, t in enumerate(raw_terms)]

    raw_interactions = data.get("interactions", [])
    if not isinstance(raw_interactions, list):
        raise SchemaError("Liste erwartet", "$.interactions")

    tagged: dict[int, Interaction] = {}
    for i, raw in enumerate(raw_interactions):
        path = f"$.interactions[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("Objekt erwartet", path)
        idx = raw.get("term")
        if isinstance(idx, bool) or not isinstance(idx, int) or not 0 <= idx < len(terms):
            raise SchemaError(f"Index in terms (0..{len(terms) - 1}) erwartet", f"{path}.term")
        if idx in tagged:
            raise SchemaError(f"Term {idx} ist mehrfach getaggt", f"{path}.term")
        term = terms[idx]
        if term.string.weight == 0:
            raise SchemaError("Identitätsterm kann kein Gadget-Ziel sein", f"{path}.term")
        factors = _parse_factors(raw.get("factors"), term.string, f"{path}.factors")
        try:
            tagged[idx] = Interaction(alpha=term.coeff, factors=factors)
        except ValidationError as e:
            raise SchemaError(e.errors()[0]["msg"], f"{path}.factors") from None

    h_else = OperatorSum(n_qubits, [t for i, t in enumerate(terms) if i not in tagged])
    try:
        return TargetSpec(h_else=h_else, interactions=tuple(tagged[i] for i in sorted(tagged)))
    except ValidationError as e:
        raise SchemaError(e.errors()[0]["msg"], "$.interactions") from None


def load_target(path: PathLike) -> TargetSpec:
    """
    Lädt und validiert eine Target-Datei.

    Raises:
        InputError: Datei fehlt oder ist nicht lesbar
        SchemaError: kaputtes JSON (mit Zeile/Spalte) oder Schema-Verstoß (mit Feldpfad)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"ungültiges JSON: {e.msg}", f"Zeile {e.lineno}, Spalte {e.colno}") from None
    return parse_target(data)


def dump_target(target: TargetSpec) -> dict[str, Any]:
    """Gegenstück zu parse_target: H_else-Terme zuerst, dann die Gadget-Ziele."""
    doc = target.h_else.to_json_dict()
    terms = doc["terms"]
    interactions = []
    for term in target.interactions:
        product = term.product
        interactions.append({"term": len(terms), "factors": [list(f.qubits) for f in term.factors]})
        terms.append({"coeff": term.alpha, "paulis": [[q, a.value] for q, a in product.factors]})
    doc["interactions"] = interactions
    return doc


def write_target(target: TargetSpec, path: PathLike):
    atomic_write(path, json.dumps(dump_target(target), ensure_ascii=False, indent=2) + "\n")


# ============================================
# CSV + Sidecar
# ============================================

def _format_cell(value: Any) -> Any:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return config.CSV_FLOAT_FORMAT % float(value)
    if isinstance(value, np.integer):
        return int(value)
    if value is None:
        return ""
    return value


def emit_csv(rows: Sequence[Mapping[str, Any]], path: PathLike, fieldnames: Optional[Sequence[str]] = None):
    """
    CSV mit Header, %.12g Zahlen und LF Zeilenenden.

    Ohne fieldnames bestimmt die erste Zeile die Spalten.
    """
    rows = list(rows)
    if fieldnames is None:
        if not rows:
            raise InputError("keine Zeilen und keine Spalten für CSV")
        fieldnames = list(rows[0].keys())

    buffer = _stdio.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _format_cell(row.get(k)) for k in fieldnames})
    atomic_write(path, buffer.getvalue())


def sidecar_path(out: PathLike) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".meta.json")


def versions() -> dict[str, str]:
    from . import __version__

    return {
        "gadgetforge": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def write_sidecar(out: PathLike, recipe: str, config_echo: Mapping[str, Any], **extra: Any) -> Path:
    """
    <out>.meta.json neben der Datendatei.

    Laufzeiten und Versionen stehen nur hier, nie in den CSVs.
    """
    meta = {
        "recipe": recipe,
        "config": dict(config_echo),
        "versions": versions(),
        **extra,
    }
    target = sidecar_path(out)
    atomic_write(target, json.dumps(meta, ensure_ascii=False, indent=2, default=_json_default) + "\n")
    return target


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "model_dump"):
        return value.model_dump()
    raise TypeError(f"nicht serialisierbar: {type(value).__name__}")


def columns(rows: Iterable[Mapping[str, Any]]) -> list[str]:
    """Vereinigung der Spalten in Reihenfolge des ersten Auftretens."""
    seen: dict[str, None] = {}
    for row in rows:
        for key in row:
            seen.setdefault(key, None)
    return list(seen)
