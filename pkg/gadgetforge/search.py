"""
Suche nach dem minimalen Δ mit Spektralfehler genau ε, plus Slope-Fits.

err(Δ) ist der max_error des SpectralReport (nicht die Theorem-1 Bedingung).
Klammer: Δ_lo = 2‖H_else‖ + Σ|α_i| + ε + 1e-6, Δ_hi aus der Schranke
oder per Verdopplung. Danach Bisektion in ln Δ auf err(Δ) - ε.
"""

import logging
import math
import time
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats

from . import config
from .errors import InputError, SearchError
from .logging_config import GadgetLogger
from .models import DeltaSearchResult, GadgetBuild, SlopeFit, TargetSpec
from .pauli_core import OperatorSum
from .spectral import compare_low_spectrum, operator_norm
from .sweeps import run_grid

logger = logging.getLogger(__name__)

ErrorFn = Callable[[float], float]
Builder = Callable[[float], GadgetBuild]


class _Prober:
    """Zählt Proben und merkt sich (Δ, err)."""

    def __init__(self, error_fn: ErrorFn, log: GadgetLogger):
        self.error_fn = error_fn
        self.log = log
        self.probes = 0
        self.seen: dict[float, float] = {}

    def __call__(self, delta: float) -> float:
        if delta in self.seen:
            return self.seen[delta]
        if self.probes >= config.SEARCH_MAX_PROBES:
            raise SearchError(f"mehr als {config.SEARCH_MAX_PROBES} Proben", sorted(self.seen.items()))
        err = float(self.error_fn(delta))
        self.probes += 1
        self.seen[delta] = err
        self.log.search_probe(delta, err)
        return err


def _is_monotone(samples: list[tuple[float, float]]) -> bool:
    errs = [e for _, e in samples]
    return all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(errs, errs[1:]))


def _bisect(probe: _Prober, epsilon: float, a: float, b: float, tol_rel: float) -> tuple[float, float, bool]:
    """err(a) > ε >= err(b); liefert (Δ, err, converged)."""
    tol = tol_rel * epsilon
    err_b = probe(b)
    if abs(err_b - epsilon) <= tol:
        return b, err_b, True
    # Bisektion in ln Δ
    while math.log(b / a) > 1e-14:
        mid = math.sqrt(a * b)
        if mid <= a or mid >= b:
            break
        err = probe(mid)
        if abs(err - epsilon) <= tol:
            return mid, err, True
        if err > epsilon:
            a = mid
        else:
            b, err_b = mid, err
    return b, err_b, abs(err_b - epsilon) <= tol


def bisect_minimal_delta(
    error_fn: ErrorFn,
    epsilon: float,
    lo: float,
    hi: Optional[float] = None,
    tol_rel: Optional[float] = None,
    log: Optional[GadgetLogger] = None,
) -> DeltaSearchResult:
    """
    Kern der Suche: kleinstes Δ in [lo, hi] mit err(Δ) = ε.

    Raises:
        SearchError: keine obere Klammer bis 2^40·lo, oder kein
            Vorzeichenwechsel im Grid-Scan
    """
    if not epsilon > 0:
        raise InputError(f"eps muss positiv sein, nicht {epsilon!r}")
    if not lo > 0:
        raise InputError(f"untere Klammer muss positiv sein, nicht {lo!r}")
    tol_rel = tol_rel if tol_rel is not None else config.SEARCH_TOL_REL
    log = log or GadgetLogger()
    probe = _Prober(error_fn, log)
    start = time.perf_counter()

    def done(delta: float, err: float, converged: bool, bracket, **extra) -> DeltaSearchResult:
        duration = int((time.perf_counter() - start) * 1000)
        log.search_done(delta, err, probe.probes, converged, duration)
        return DeltaSearchResult(
            delta_min=delta,
            achieved_error=err,
            epsilon=epsilon,
            bracket=bracket,
            probes=probe.probes,
            converged=converged,
            **extra,
        )

    err_lo = probe(lo)
    if err_lo <= epsilon:
        converged = abs(err_lo - epsilon) <= tol_rel * epsilon
        return done(lo, err_lo, converged, (lo, lo), bisected=False, fallback="floor")

    # === Obere Klammer ===
    hi = max(hi, lo) if hi is not None else 2 * lo
    cap = 2.0 ** config.SEARCH_DOUBLING_CAP * lo
    while probe(hi) > epsilon:
        hi *= 2
        if hi > cap:
            raise SearchError(f"keine obere Klammer bis {cap:.3g}", sorted(probe.seen.items()))

    # === Monotonie-Check ===
    grid = np.geomspace(lo, hi, config.SEARCH_MONOTONE_SAMPLES)
    samples = [(float(d), probe(float(d))) for d in grid]
    if _is_monotone(samples):
        delta, err, converged = _bisect(probe, epsilon, lo, hi, tol_rel)
        return done(delta, err, converged, (lo, hi), samples=samples)

    logger.warning(f"err(Δ) nicht monoton auf [{lo:.4g}, {hi:.4g}], Grid-Scan")
    scan = np.geomspace(lo, hi, config.SEARCH_SCAN_POINTS)
    prev = float(scan[0])
    for d in scan[1:]:
        d = float(d)
        if probe(prev) > epsilon >= probe(d):
            delta, err, converged = _bisect(probe, epsilon, prev, d, tol_rel)
            return done(delta, err, converged, (lo, hi), samples=samples, fallback="grid-scan")
        prev = d
    raise SearchError("kein Übergang err > ε -> err <= ε im Grid-Scan", samples)


def search_floor(h_else_norm: float, alphas: Sequence[float], epsilon: float) -> float:
    return 2 * h_else_norm + sum(abs(a) for a in alphas) + epsilon + config.SEARCH_FLOOR_OFFSET


def minimal_delta(
    builder: Builder,
    target: Union[TargetSpec, OperatorSum],
    epsilon: float,
    tol_rel: Optional[float] = None,
    hi: Optional[float] = None,
    lo: Optional[float] = None,
    h_else_norm: Optional[float] = None,
    alphas: Optional[Sequence[float]] = None,
    log: Optional[GadgetLogger] = None,
) -> DeltaSearchResult:
    """
    Minimales Δ für builder(Δ) gegen target.

    Bei einem TargetSpec werden ‖H_else‖ und die α direkt gelesen; bei
    einem OperatorSum müssen alphas mitgegeben werden.
    """
    if isinstance(target, TargetSpec):
        target_op = target.operator()
        if h_else_norm is None:
            h_else_norm = operator_norm(target.h_else)
        if alphas is None:
            alphas = target.alphas
    else:
        target_op = target
        if alphas is None:
            raise InputError("alphas nötig, wenn target ein OperatorSum ist")
        if h_else_norm is None:
            h_else_norm = operator_norm(target_op)

    def error_fn(delta: float) -> float:
        return compare_low_spectrum(builder(delta).total, target_op).max_error

    lo = lo if lo is not None else search_floor(h_else_norm, alphas, epsilon)
    if all(a == 0 for a in alphas):
        err = error_fn(lo)
        return DeltaSearchResult(
            delta_min=lo,
            achieved_error=err,
            epsilon=epsilon,
            bracket=(lo, lo),
            probes=1,
            converged=False,
            bisected=False,
            fallback="degenerate",
        )
    return bisect_minimal_delta(error_fn, epsilon, lo, hi, tol_rel, log)


# ============================================
# Slope-Fits
# ============================================

def fit_slope(points: Sequence[tuple[float, float]]) -> SlopeFit:
    """OLS auf (ln 1/ε, ln Δ_min); mindestens 4 Punkte über eine Dekade."""
    pts = [(float(e), float(d)) for e, d in points]
    if len(pts) < 4:
        raise InputError(f"mindestens 4 Punkte nötig, nicht {len(pts)}")
    eps = [e for e, _ in pts]
    if min(eps) <= 0 or any(d <= 0 for _, d in pts):
        raise InputError("ε und Δ müssen positiv sein")
    if max(eps) / min(eps) < 10 * (1 - 1e-9):
        raise InputError("ε-Punkte müssen mindestens eine Dekade überspannen")

    x = np.array([math.log(1 / e) for e in eps])
    y = np.array([math.log(d) for _, d in pts])
    fit = stats.linregress(x, y)
    r = fit.rvalue if np.isfinite(fit.rvalue) else 0.0
    return SlopeFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(r ** 2),
        points=[(float(a), float(b)) for a, b in zip(x, y)],
    )


def minimal_delta_grid(
    epsilons: Sequence[float],
    builder: Builder,
    target: Union[TargetSpec, OperatorSum],
    tol_rel: Optional[float] = None,
    hi_fn: Optional[Callable[[float], float]] = None,
    alphas: Optional[Sequence[float]] = None,
) -> list[DeltaSearchResult]:
    """Δ_min für jedes ε, nebenläufig, in Grid-Reihenfolge."""
    def one(eps: float) -> DeltaSearchResult:
        hi = hi_fn(eps) if hi_fn else None
        return minimal_delta(builder, target, eps, tol_rel=tol_rel, hi=hi, alphas=alphas)

    return run_grid(one, list(epsilons))


def slope_from_results(results: Sequence[DeltaSearchResult]) -> SlopeFit:
    """Fit über die konvergierten Punkte; es müssen >= 4 bleiben."""
    survivors = [(r.epsilon, r.delta_min) for r in results if r.converged]
    if len(survivors) < 4:
        raise SearchError(
            f"nur {len(survivors)} konvergierte Punkte",
            [(r.delta_min, r.achieved_error) for r in results],
        )
    return fit_slope(survivors)


def scaling_slope(
    epsilons: Sequence[float],
    builder: Builder,
    target: Union[TargetSpec, OperatorSum],
    tol_rel: Optional[float] = None,
    hi_fn: Optional[Callable[[float], float]] = None,
    alphas: Optional[Sequence[float]] = None,
) -> SlopeFit:
    """Steigung d ln Δ_min / d ln ε⁻¹ über das ε-Grid."""
    results = minimal_delta_grid(epsilons, builder, target, tol_rel, hi_fn, alphas)
    return slope_from_results(results)
