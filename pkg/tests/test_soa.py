import time

import numpy as np
import pytest

from fdsabeam import ArrayGeometry, FieldPoint, FoiVector, max_sidelobe
from fdsabeam.geometry import SidelobeSearch, sidelobe_fitness
from fdsabeam.soa import (
    SoaConfig,
    eg_direction,
    inertia_weight,
    membership_degree,
    soa_optimize,
    step_length,
)

from helpers import C

TARGET = FieldPoint.from_degrees(90.0, 500.0)


def geom_73(m=5, n=9):
    fc = 73e9
    return ArrayGeometry(fc, 0.5 * C / fc, m, n)


def fast_search():
    return SidelobeSearch(
        TARGET, 50.0, 1000.0,
        safety_theta_step_deg=3.0, safety_range_step_m=25.0, refine_top=16,
    )


class TestInertiaWeight:
    def test_endpoints(self):
        assert inertia_weight(100, 100) == pytest.approx(0.1)
        assert inertia_weight(50, 100) == pytest.approx(0.5)

    def test_strictly_decreasing(self):
        ws = [inertia_weight(t, 40) for t in range(1, 41)]
        assert all(a > b for a, b in zip(ws, ws[1:]))

    def test_range_validation(self):
        with pytest.raises(ValueError):
            inertia_weight(0, 10)
        with pytest.raises(ValueError):
            inertia_weight(11, 10)


class TestMembershipDegree:
    def test_best_seeker_gets_u_max(self):
        assert membership_degree(40, 40) == pytest.approx(0.95)

    def test_worst_seeker_gets_u_min(self):
        assert membership_degree(1, 40) == pytest.approx(0.0111)

    def test_midpoint(self):
        assert membership_degree(2, 3) == pytest.approx((0.95 + 0.0111) / 2.0)

    def test_single_seeker_rejected(self):
        with pytest.raises(ValueError):
            membership_degree(1, 1)


class TestEgDirection:
    def test_converged_seeker_has_zero_direction(self):
        rng = np.random.default_rng(0)
        pos = np.array([1.0, -2.0, 3.0])
        d = eg_direction(pos, pos, pos, 0.5, 0.5, 0.7, rng)
        assert np.array_equal(d, np.zeros(3))

    def test_values_limited_to_signs(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            pos = rng.normal(size=4)
            pb = rng.normal(size=4)
            gb = rng.normal(size=4)
            d = eg_direction(pos, pb, gb, rng.uniform(), rng.uniform(), 0.5, rng)
            assert set(np.unique(d)).issubset({-1.0, 0.0, 1.0})

    def test_reproducible_with_seed(self):
        pos = np.array([1.0, -2.0, 3.0])
        pb = np.array([0.5, -1.0, 2.0])
        gb = np.array([0.0, 0.0, 0.0])
        a = eg_direction(pos, pb, gb, 2.0, 1.0, 0.5, np.random.default_rng(42))
        b = eg_direction(pos, pb, gb, 2.0, 1.0, 0.5, np.random.default_rng(42))
        assert np.array_equal(a, b)


class TestStepLength:
    def test_zero_when_partner_is_best(self):
        rng = np.random.default_rng(2)
        g = np.array([1.0, 2.0, 3.0])
        v = step_length(g, g.copy(), 0.5, 0.5, rng)
        assert np.array_equal(v, np.zeros(3))

    def test_non_negative(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            v = step_length(rng.normal(size=3), rng.normal(size=3), 0.6, 0.4, rng)
            assert np.all(v >= 0.0)

    def test_better_rank_means_shorter_steps(self):
        # Monte-Carlo mean comparison between the two membership extremes
        g = np.array([0.0])
        partner = np.array([1.0])
        rng = np.random.default_rng(4)
        short = np.mean([step_length(g, partner, 0.5, 0.95, rng)[0] for _ in range(10000)])
        rng = np.random.default_rng(4)
        long = np.mean([step_length(g, partner, 0.5, 0.0111, rng)[0] for _ in range(10000)])
        assert short < long / 3.0

    def test_membership_domain(self):
        rng = np.random.default_rng(5)
        with pytest.raises(ValueError):
            step_length(np.zeros(2), np.ones(2), 0.5, 0.0, rng)
        with pytest.raises(ValueError):
            step_length(np.zeros(2), np.ones(2), 0.5, 1.0, rng)


class TestSoaOptimize:
    def config(self, bound, seed=1, population=8, iterations=6):
        return SoaConfig(
            bound_hz=bound, population=population, iterations=iterations, rng_seed=seed
        )

    def test_trace_non_increasing_and_feasible(self):
        geom = geom_73()
        bound = 1e-5 * geom.carrier_hz
        fitness = sidelobe_fitness(geom, fast_search())
        foi, trace = soa_optimize(geom, TARGET, self.config(bound), fitness)
        fits = [e.best_fitness for e in trace]
        assert all(a >= b for a, b in zip(fits, fits[1:]))
        assert np.all(np.abs(foi.as_array()) <= bound * (1 + 1e-12))
        for e in trace:
            assert np.all(np.abs(np.asarray(e.best_offsets_hz)) <= bound * (1 + 1e-12))

    def test_deterministic_given_seed(self):
        geom = geom_73()
        bound = 1e-5 * geom.carrier_hz
        fitness = sidelobe_fitness(geom, fast_search())
        a, tr_a = soa_optimize(geom, TARGET, self.config(bound, seed=9), fitness)
        b, tr_b = soa_optimize(geom, TARGET, self.config(bound, seed=9), fitness)
        assert a.offsets_hz == b.offsets_hz
        assert [e.best_fitness for e in tr_a] == [e.best_fitness for e in tr_b]

    def test_improves_over_initial_population(self):
        geom = geom_73()
        bound = 1e-5 * geom.carrier_hz
        fitness = sidelobe_fitness(geom, fast_search())
        _, trace = soa_optimize(
            geom, TARGET, self.config(bound, population=12, iterations=12), fitness
        )
        assert trace[-1].best_fitness < trace[0].best_fitness

    def test_zero_bound_collapses_to_fixed_beam(self):
        geom = geom_73()
        search = fast_search()
        fitness = sidelobe_fitness(geom, search)
        foi, trace = soa_optimize(geom, TARGET, self.config(0.0), fitness)
        assert foi.offsets_hz == (0.0,) * geom.subarrays
        reference, _ = max_sidelobe(geom, FoiVector.zero(geom.subarrays), search)
        assert trace[-1].best_fitness == reference

    def test_population_validation(self):
        with pytest.raises(ValueError):
            SoaConfig(bound_hz=1.0, population=1)
        with pytest.raises(ValueError):
            SoaConfig(bound_hz=1.0, u_min=0.99, u_max=0.95)

    def test_wall_clock_roughly_linear_in_population(self):
        geom = geom_73(4, 7)
        bound = 1e-5 * geom.carrier_hz
        fitness = sidelobe_fitness(geom, fast_search())
        times = {}
        for s in (10, 20, 40):
            cfg = SoaConfig(bound_hz=bound, population=s, iterations=3, rng_seed=2)
            start = time.perf_counter()
            soa_optimize(geom, TARGET, cfg, fitness)
            times[s] = time.perf_counter() - start
        ratio = times[40] / times[10]
        assert 2.0 <= ratio <= 8.0
