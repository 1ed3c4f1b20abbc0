"""
Konfiguration für gadgetforge.

Alle numerischen Toleranzen, Grid-Dichten und Limits an einer Stelle.
Werte können per Environment (oder .env) überschrieben werden.
"""

import os
from dotenv import load_dotenv

load_dotenv()

# === Dense Realisierung ===
# 2^14 = 16384 Dimensionen ist das Maximum für volle Diagonalisierung
MAX_QUBITS = int(os.getenv("GADGETFORGE_MAX_QUBITS", "14"))

# === Toleranzen ===
# Koeffizienten unter COEFF_TOL werden bei der Kanonisierung verworfen
COEFF_TOL = float(os.getenv("GADGETFORGE_COEFF_TOL", "1e-12"))
HERMITIAN_TOL = float(os.getenv("GADGETFORGE_HERMITIAN_TOL", "1e-10"))
EIGEN_RESIDUAL_TOL = 1e-9
POLE_TOL = 1e-12

# === Theorem-1 Check ===
Z_GRID_POINTS = int(os.getenv("GADGETFORGE_ZGRID", "201"))

# === Delta-Suche ===
SEARCH_TOL_REL = float(os.getenv("GADGETFORGE_TOL_REL", "1e-5"))
SEARCH_FLOOR_OFFSET = 1e-6
SEARCH_DOUBLING_CAP = 40          # obere Klammer höchstens 2^40 * Delta_lo
SEARCH_MONOTONE_SAMPLES = 5
SEARCH_SCAN_POINTS = 64
SEARCH_MAX_PROBES = 200

# === Sweeps ===
SWEEP_CONCURRENCY = int(os.getenv("GADGETFORGE_WORKERS", "4"))
ALPHA_GRID_POINTS = 21
EPS_POINTS_PER_DECADE = 8

# === Output ===
CSV_FLOAT_FORMAT = "%.12g"
