"""
Tests für die Δ-Suche, Slope-Fits und die nebenläufige Grid-Auswertung.
"""

import math

import pytest

from gadgetforge.errors import InputError, SearchError
from gadgetforge.gadget_lib import build_subdivision_gadget, subdivision_delta_bound
from gadgetforge.models import SweepSpec
from gadgetforge.search import (
    bisect_minimal_delta,
    fit_slope,
    minimal_delta,
    scaling_slope,
    search_floor,
    slope_from_results,
)
from gadgetforge.recipes import default_target, eps_grid, gadget_builder
from gadgetforge.sweeps import evaluate_grid, run_grid


class TestBisection:
    def test_monotone_hyperbola(self):
        """Test: err(Δ) = 10/Δ, ε = 0.1 -> Δ_min = 100."""
        result = bisect_minimal_delta(lambda d: 10.0 / d, 0.1, lo=1.0)
        assert result.converged
        assert result.bisected
        assert result.fallback is None
        assert result.delta_min == pytest.approx(100.0, rel=1e-4)
        assert result.achieved_error == pytest.approx(0.1, rel=2e-5)
        assert result.bracket[0] == 1.0
        assert result.bracket[1] >= 100.0

    def test_hi_is_used_as_bracket(self):
        result = bisect_minimal_delta(lambda d: 10.0 / d, 0.1, lo=1.0, hi=150.0)
        assert result.bracket == (1.0, 150.0)
        assert result.delta_min == pytest.approx(100.0, rel=1e-4)

    def test_probe_count_over_twelve_decades(self):
        """Test: Klammer [1, 1e12], Ziel Δ = 2 -> höchstens 60 Proben."""
        result = bisect_minimal_delta(lambda d: 2.0 / d, 1.0, lo=1.0, hi=1e12)
        assert result.converged
        assert result.bracket == (1.0, 1e12)
        assert result.delta_min == pytest.approx(2.0, rel=2e-5)
        assert result.probes <= 60

    def test_floor_already_good(self):
        """Test: err(lo) <= ε -> lo zurück, ohne Bisektion."""
        result = bisect_minimal_delta(lambda d: 0.01, 0.1, lo=5.0)
        assert result.delta_min == 5.0
        assert result.fallback == "floor"
        assert not result.bisected
        assert result.probes == 1

    def test_no_upper_bracket(self):
        """Test: err bleibt über ε -> SearchError mit Proben."""
        with pytest.raises(SearchError) as info:
            bisect_minimal_delta(lambda d: 1.0, 0.1, lo=1.0)
        assert info.value.samples

    def test_step_function_not_converged(self):
        """Test: Sprung über ε hinweg wird eingegrenzt, aber nie getroffen."""
        result = bisect_minimal_delta(lambda d: 1.0 if d < 4.0 else 0.01, 0.1, lo=1.0)
        assert not result.converged
        assert result.delta_min == pytest.approx(4.0, rel=1e-9)

    def test_invalid_eps(self):
        with pytest.raises(InputError):
            bisect_minimal_delta(lambda d: 1.0 / d, 0.0, lo=1.0)

    def test_search_floor(self):
        assert search_floor(0.5, [1.0, -2.0], 0.1) == pytest.approx(4.1 + 1e-6)


class TestMinimalDelta:
    def test_subdivision_below_bound(self, zz_target):
        """Test: Δ_min liegt unter der analytischen Schranke, Fehler genau ε."""
        eps = 0.05
        hi = subdivision_delta_bound(1.0, 0.0, eps)
        result = minimal_delta(lambda d: build_subdivision_gadget(zz_target, d), zz_target, eps, hi=hi)
        assert result.converged
        assert result.delta_min <= hi
        assert result.achieved_error == pytest.approx(eps, rel=1e-3)

    def test_degenerate_alpha_zero(self):
        target = default_target("subdivision", [0.0])
        result = minimal_delta(lambda d: build_subdivision_gadget(target, d), target, 0.05)
        assert result.fallback == "degenerate"
        assert not result.converged

    def test_operator_target_needs_alphas(self, zz_target):
        with pytest.raises(InputError):
            minimal_delta(lambda d: build_subdivision_gadget(zz_target, d), zz_target.operator(), 0.05)

    @pytest.mark.slow
    def test_subdivision_slope(self, zz_target):
        """Test: Δ_min ~ ε^{-1} für Subdivision."""
        epsilons = [10 ** (-1 - i / 4) for i in range(9)]
        fit = scaling_slope(epsilons, lambda d: build_subdivision_gadget(zz_target, d), zz_target)
        assert fit.slope == pytest.approx(1.0, abs=0.1)
        assert fit.r_squared > 0.99

    @pytest.mark.slow
    @pytest.mark.parametrize("gadget,alpha,eps_range,lo,hi", [
        ("3to2", 1.0, (1, 2.5), 1.7, 2.3),
        ("3to2-ot06", 1.0, (1, 2.5), 2.7, 3.3),
        ("5th-zzz", 0.1, (0.7, 2.3), 4.6, 5.3),
        # Gemessen ~2.0, deutlich unter der ε^{-4} Obergrenze
        ("yy", 1.0, (1, 2.5), 1.8, 2.2),
    ])
    def test_family_slopes(self, gadget, alpha, eps_range, lo, hi):
        """Test: Steigung von ln Δ_min über ln 1/ε pro Gadget-Familie."""
        target = default_target(gadget, [alpha])
        fit = scaling_slope(eps_grid(*eps_range), gadget_builder(gadget, target), target)
        assert lo <= fit.slope <= hi
        assert fit.r_squared > 0.95


class TestFit:
    def test_exact_power_law(self):
        """Test: Δ = 3 ε^{-1.5} -> slope 1.5, R² = 1."""
        points = [(10 ** -x, 3 * (10 ** x) ** 1.5) for x in (1.0, 1.5, 2.0, 2.5, 3.0)]
        fit = fit_slope(points)
        assert fit.slope == pytest.approx(1.5)
        assert fit.intercept == pytest.approx(math.log(3))
        assert fit.r_squared == pytest.approx(1.0)
        assert len(fit.points) == 5

    def test_too_few_points(self):
        with pytest.raises(InputError):
            fit_slope([(0.1, 1.0), (0.01, 10.0), (0.001, 100.0)])

    def test_needs_a_decade(self):
        with pytest.raises(InputError):
            fit_slope([(0.1, 1.0), (0.08, 2.0), (0.06, 3.0), (0.05, 4.0)])

    def test_slope_from_results_skips_unconverged(self):
        results = [
            bisect_minimal_delta(lambda d, e=e: 1.0 / d, e, lo=1.0)
            for e in (0.1, 0.03, 0.01, 0.003, 0.001)
        ]
        fit = slope_from_results(results)
        assert fit.slope == pytest.approx(1.0, abs=1e-3)

    def test_slope_from_results_too_few(self):
        result = bisect_minimal_delta(lambda d: 1.0 if d < 4.0 else 0.01, 0.1, lo=1.0)
        with pytest.raises(SearchError):
            slope_from_results([result] * 5)


class TestSweeps:
    def test_sweep_spec_parse(self):
        spec = SweepSpec.parse("eps:0.1:0.001:5:log")
        assert spec.log
        assert spec.values()[0] == pytest.approx(0.1)
        assert spec.values()[-1] == pytest.approx(0.001)
        assert SweepSpec.parse("alpha:-1:1:3").values() == [-1.0, 0.0, 1.0]
        assert SweepSpec.parse("delta:5:9:1").values() == [5.0]

    @pytest.mark.parametrize("text", ["eps:1:2", "eps:1:2:3:lin", "eps:-1:1:3:log"])
    def test_sweep_spec_invalid(self, text):
        with pytest.raises(ValueError):
            SweepSpec.parse(text)

    def test_run_grid_order(self):
        """Test: Ergebnisse in Grid-Reihenfolge, auch nebenläufig."""
        assert run_grid(lambda x: x * x, [3, 1, 2], max_concurrency=3) == [9, 1, 4]

    def test_run_grid_exceptions(self):
        def fn(x):
            if x == 2:
                raise SearchError("kaputt")
            return x

        results = run_grid(fn, [1, 2, 3], return_exceptions=True)
        assert results[0] == 1 and results[2] == 3
        assert isinstance(results[1], SearchError)
        with pytest.raises(SearchError):
            run_grid(fn, [1, 2, 3])

    @pytest.mark.asyncio
    async def test_evaluate_grid(self):
        results = await evaluate_grid(lambda x: x + 1, range(5), max_concurrency=2)
        assert results == [1, 2, 3, 4, 5]

    @pytest.mark.asyncio
    async def test_run_grid_inside_loop(self):
        """Test: Im laufenden Loop wertet run_grid sequentiell aus."""
        assert run_grid(lambda x: -x, [1, 2]) == [-1, -2]
