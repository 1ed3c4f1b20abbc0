"""
Structured Logging für gadgetforge.

Loggt alles was bei Konstruktion, Suche und Reduktion passiert:
- Gadget Builds (Familie, Delta, Ancillas, Lokalität)
- Bound-Auswertungen
- Reduktions-Iterationen (Partition, Delta-Wahl, gemessener Fehler)
- Checker Decisions (weiter / fertig / Abbruch)
- Delta-Suche (Proben, Ergebnis)

Logs gehen an stderr (JSON für Pipelines, Pretty für lokal).
stdout bleibt frei für CLI-Ergebnisse.
"""

import json
import logging
import os
import sys
import time
import uuid
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Optional

# Log Level aus Environment
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_JSON = os.getenv("LOG_JSON", "false").lower() == "true"

PACKAGE_LOGGER = "gadgetforge"


# ============================================
# Formatter
# ============================================

class JSONFormatter(logging.Formatter):
    """Eine JSON-Zeile pro Record."""

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        for key in ("run_id", "stage", "data", "duration_ms"):
            if hasattr(record, key):
                log_data[key] = getattr(record, key)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, ensure_ascii=False, default=str)


class PrettyFormatter(logging.Formatter):
    """Lesbares Format für die Konsole."""

    COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"
    BOLD = "\033[1m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, "")
        timestamp = datetime.now().strftime("%H:%M:%S")
        level = f"{color}{record.levelname:8}{self.RESET}"

        stage_info = ""
        if hasattr(record, "stage"):
            stage_info = f" [{self.BOLD}{record.stage}{self.RESET}]"

        run_info = ""
        if hasattr(record, "run_id"):
            run_info = f" ({str(record.run_id)[:8]})"

        message = f"{timestamp} {level}{stage_info}{run_info} {record.getMessage()}"

        # Daten kompakt als k=v, Matrizen gehören nicht ins Log
        if getattr(record, "data", None):
            pairs = " ".join(f"{k}={_short(v)}" for k, v in record.data.items())
            message += f"  {pairs}"

        if hasattr(record, "duration_ms"):
            message += f" ({record.duration_ms}ms)"

        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)

        return message


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    text = str(value)
    return text if len(text) <= 80 else text[:77] + "..."


# ============================================
# Logger Setup
# ============================================

def setup_logging():
    """Konfiguriert den Package-Logger (nicht den Root-Logger)."""
    pkg_logger = logging.getLogger(PACKAGE_LOGGER)
    pkg_logger.setLevel(LOG_LEVEL)

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(LOG_LEVEL)
    handler.setFormatter(JSONFormatter() if LOG_JSON else PrettyFormatter())

    # Alte Handler entfernen (Re-Import in Tests)
    pkg_logger.handlers = []
    pkg_logger.addHandler(handler)

    # Externe Logger leiser stellen
    logging.getLogger("langgraph").setLevel(logging.WARNING)


# ============================================
# Gadget Logger
# ============================================

class GadgetLogger:
    """
    Domänen-Logger für einen Run (Recipe, Reduktion, Suche).

    Hängt run_id und stage an jeden Record.
    """

    def __init__(self, run_id: Optional[str] = None):
        self.run_id = run_id or str(uuid.uuid4())
        self.logger = logging.getLogger(f"{PACKAGE_LOGGER}.run")

    def _log(self, level: int, stage: str, message: str, data: dict = None, duration_ms: int = None):
        extra = {"run_id": self.run_id, "stage": stage}
        if data:
            extra["data"] = data
        if duration_ms is not None:
            extra["duration_ms"] = duration_ms
        self.logger.log(level, message, extra=extra)

    # === Convenience Methods ===

    def gadget_built(self, family: str, delta: float, n_ancillas: int, n_qubits: int, locality: int):
        self._log(
            logging.INFO,
            "builder",
            f"🔧 {family} Gadget gebaut",
            data={"delta": delta, "ancillas": n_ancillas, "qubits": n_qubits, "locality": locality},
        )

    def bound_evaluated(self, name: str, value: float, params: dict):
        self._log(logging.DEBUG, "bounds", f"📐 {name} = {value:.6g}", data=params)

    def partition_decision(self, iteration: int, partitions: list[str]):
        self._log(
            logging.INFO,
            "partition",
            f"✂️  Iteration {iteration}: {len(partitions)} Terme > 3-body",
            data={"splits": partitions},
        )

    def delta_chosen(self, iteration: int, delta: float, mode: str, h_else_norm: float):
        self._log(
            logging.INFO,
            "gap",
            f"📏 Iteration {iteration}: Delta={delta:.6g} ({mode})",
            data={"h_else_norm": h_else_norm},
        )

    def iteration_measured(self, iteration: int, error: float, epsilon: float, duration_ms: int):
        level = logging.INFO if error <= epsilon * (1 + 1e-6) else logging.WARNING
        self._log(
            level,
            "measure",
            f"📊 Iteration {iteration}: Spektralfehler {error:.4g} (eps={epsilon:.4g})",
            duration_ms=duration_ms,
        )

    def checker_decision(self, decision: str, reason: str = None):
        emoji_map = {
            "has_pending": "🔄",
            "all_done": "✅",
            "overflow": "⛔",
            "failed": "❌",
            "ready": "▶️",
        }
        emoji = emoji_map.get(decision, "❔")
        msg = f"{emoji} Entscheidung: {decision}"
        if reason:
            msg += f" ({reason})"
        self._log(logging.INFO, "checker", msg)

    def search_probe(self, delta: float, error: float):
        self._log(logging.DEBUG, "search", f"Probe Delta={delta:.9g} -> err={error:.6g}")

    def search_done(self, delta_min: float, achieved: float, probes: int, converged: bool, duration_ms: int):
        status = "✅ konvergiert" if converged else "⚠️ nicht konvergiert"
        self._log(
            logging.INFO if converged else logging.WARNING,
            "search",
            f"🔎 Delta_min={delta_min:.9g} {status}",
            data={"achieved_error": achieved, "probes": probes},
            duration_ms=duration_ms,
        )

    def recipe_start(self, recipe: str, config: dict):
        self._log(logging.INFO, "recipe", f"🚀 Starte {recipe}", data=config)

    def recipe_done(self, recipe: str, rows: int, duration_ms: int):
        self._log(logging.INFO, "recipe", f"✨ {recipe}: {rows} Zeilen", duration_ms=duration_ms)

    def error(self, stage: str, message: str):
        self._log(logging.ERROR, stage, f"❌ {message}")

    def run_complete(self, success: bool, total_duration_ms: int, summary: dict = None):
        status = "✅ erfolgreich" if success else "❌ mit Fehlern"
        self._log(
            logging.INFO,
            "run",
            f"🏁 Run {status} abgeschlossen",
            data=summary,
            duration_ms=total_duration_ms,
        )


# ============================================
# Context Manager für Runs
# ============================================

@contextmanager
def gadget_run(name: str, config: dict = None):
    """
    Context Manager für einen Run.

    Usage:
        with gadget_run("fig2", {"eps": 0.05}) as (run_id, log):
            # ... recipe logic ...
    """
    run_id = str(uuid.uuid4())
    log = GadgetLogger(run_id)
    start = time.perf_counter()
    log.recipe_start(name, config or {})

    success = False
    try:
        yield run_id, log
        success = True
    except Exception as e:
        log.error("run", f"{type(e).__name__}: {e}")
        raise
    finally:
        duration_ms = int((time.perf_counter() - start) * 1000)
        log.run_complete(success, duration_ms, {"name": name})


# Beim Import initialisieren
setup_logging()
