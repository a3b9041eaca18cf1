import math

import numpy as np
import pytest

import fdma.annealing as annealing
from fdma.annealing import AlternationConfig, AnnealerConfig, InfeasibleInitializationError, \
    InfeasibleSpacingError, adaptive_max_spacing, alternate_sa, anneal_freq_shifts, \
    anneal_positions, cost, metropolis_accept, reconstruct_positions, spacings
from fdma.model import ArrayDesign, Placement, Scenario, SPEED_OF_LIGHT, snr_eve, \
    wavelength
from fdma.scenario import default_baseline_params, make_cpa, make_linear_fda, \
    make_placement

from conftest import F0, random_design

LAM = wavelength(F0)


def small_scenario(link_cfg, bob, num_eves=1):
    eves = tuple(
        make_placement(bob.range_m + 5.0 * (i + 1), bob.angle_rad - 0.25 * (i + 1),
                       link_cfg)
        for i in range(num_eves))
    return Scenario(bob, eves, tx_power_linear=10.0 ** 0.5)


class TestCost:
    def test_no_eves_is_zero(self, bob):
        scenario = Scenario(bob, (), tx_power_linear=1.0)
        design = make_cpa(4, default_baseline_params(4, F0, SPEED_OF_LIGHT), F0)
        assert cost(scenario, design) == 0.0

    def test_colocated_eve_unit_budget(self):
        bob = Placement(10.0, 1.0, path_loss_linear=1.0, noise_power_linear=1.0)
        scenario = Scenario(bob, (bob,), tx_power_linear=2.0)
        design = make_cpa(6, default_baseline_params(6, F0, SPEED_OF_LIGHT), F0)
        assert abs(cost(scenario, design) - 2.0 * 6) < 1e-9

    def test_matches_per_eve_snr_sum(self, default_scenario):
        rng = np.random.default_rng(23)
        design = random_design(rng, 21)
        total = sum(snr_eve(default_scenario, design, k) for k in range(3))
        assert abs(cost(default_scenario, design) - total) < 1e-12 * max(total, 1.0)


class TestSpacingAlgebra:
    def test_reconstruct_symmetric(self):
        np.testing.assert_allclose(reconstruct_positions([1.0, 1.0], 5.0), [-1, 0, 1])

    def test_reconstruct_two_elements(self):
        np.testing.assert_allclose(reconstruct_positions([2.0], 1.0), [-1, 1])

    def test_reconstruct_rejects_oversized_span(self):
        with pytest.raises(InfeasibleSpacingError):
            reconstruct_positions([1.0, 1.0 + 1e-6], 1.0)

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        d = rng.uniform(0.5, 1.5, size=7)
        np.testing.assert_allclose(spacings(reconstruct_positions(d, 10.0)), d,
                                   atol=1e-12)

    def test_adaptive_max_single_spacing(self):
        assert adaptive_max_spacing([0.7], 0, 3.0) == 6.0

    def test_adaptive_max_excludes_own_entry(self):
        assert abs(adaptive_max_spacing([0.4, 1.1], 0, 2.0) - (4.0 - 1.1)) < 1e-12

    def test_adaptive_max_saturates_the_aperture(self):
        d = np.array([0.6, 0.8, 0.5])
        half_width = 1.5
        d[1] = adaptive_max_spacing(d, 1, half_width)
        positions = reconstruct_positions(d, half_width)
        assert abs(positions[-1] - half_width) < 1e-12


class TestMetropolisRule:
    def test_downhill_always_accepted(self):
        rng = np.random.default_rng(0)
        assert all(metropolis_accept(-1e-12, 1e-9, rng) for _ in range(100))

    def test_uphill_frequency_tracks_boltzmann_factor(self):
        rng = np.random.default_rng(42)
        delta, temperature = 1.0, 1.5
        n = 20000
        accepted = sum(metropolis_accept(delta, temperature, rng) for _ in range(n))
        expected = math.exp(-delta / temperature)
        assert abs(accepted / n - expected) < 4.0 * math.sqrt(expected * (1 - expected) / n)


class TestAnnealPositions:
    def test_no_eves_returns_feasible_design(self, link_cfg, bob, default_params):
        scenario = Scenario(bob, (), tx_power_linear=1.0)
        init = make_linear_fda(21, default_params, F0)
        cfg = AnnealerConfig(max_iterations=50, seed=1)
        result = anneal_positions(scenario, init, default_params, cfg)
        d = spacings(result.positions)
        assert np.all(d >= default_params.min_spacing - 1e-12)
        assert d.sum() <= 2 * default_params.aperture_half_width + 1e-9

    def test_never_worse_than_start(self, link_cfg, bob):
        scenario = small_scenario(link_cfg, bob)
        params = default_baseline_params(4, F0, SPEED_OF_LIGHT)
        init = make_linear_fda(4, params, F0)
        cfg = AnnealerConfig(max_iterations=400, seed=9)
        result = anneal_positions(scenario, init, params, cfg)
        assert cost(scenario, result) <= cost(scenario, init)

    def test_infeasible_initialization_rejected(self, link_cfg, bob, default_params):
        scenario = small_scenario(link_cfg, bob)
        tight = ArrayDesign(np.array([0.0, 0.3 * LAM, LAM]), F0, np.zeros(3))
        with pytest.raises(InfeasibleInitializationError):
            anneal_positions(scenario, tight, default_params,
                             AnnealerConfig(max_iterations=10, seed=0))

    def test_temperature_schedule_and_monotone_best(self, link_cfg, bob):
        scenario = small_scenario(link_cfg, bob)
        params = default_baseline_params(5, F0, SPEED_OF_LIGHT)
        init = make_linear_fda(5, params, F0)
        cfg = AnnealerConfig(initial_temperature=2.5, cooling_factor=0.9,
                             max_iterations=120, seed=4)
        trace = []
        anneal_positions(scenario, init, params, cfg, trace=trace)
        assert len(trace) == 120
        for rec in trace:
            assert rec.temperature == 2.5 * 0.9 ** rec.iteration
        best = [rec.best_cost for rec in trace]
        assert all(b1 >= b2 for b1, b2 in zip(best, best[1:]))

    def test_every_candidate_feasible_and_single_coordinate(self, link_cfg, bob,
                                                            monkeypatch):
        scenario = small_scenario(link_cfg, bob)
        params = default_baseline_params(6, F0, SPEED_OF_LIGHT)
        init = make_linear_fda(6, params, F0)
        evaluations = []
        real_factory = annealing._fast_cost_fn

        def spy_factory(scn, f0):
            real = real_factory(scn, f0)

            def spy(positions, shifts):
                evaluations.append(np.array(positions))
                return real(positions, shifts)

            return spy

        monkeypatch.setattr(annealing, "_fast_cost_fn", spy_factory)
        trace = []
        anneal_positions(scenario, init, params,
                         AnnealerConfig(max_iterations=250, seed=12), trace=trace)
        # evaluations[0] is the initial state, the rest are the candidates
        state = spacings(evaluations[0])
        assert len(evaluations) == 251
        for positions, rec in zip(evaluations[1:], trace):
            candidate = spacings(positions)
            assert np.all(candidate >= params.min_spacing - 1e-12)
            assert candidate.sum() <= 2 * params.aperture_half_width + 1e-9
            changed = np.abs(candidate - state) > 1e-15
            assert changed.sum() == 1
            if rec.accepted:
                state = candidate

    def test_deterministic(self, link_cfg, bob):
        scenario = small_scenario(link_cfg, bob)
        params = default_baseline_params(5, F0, SPEED_OF_LIGHT)
        init = make_linear_fda(5, params, F0)
        cfg = AnnealerConfig(max_iterations=300, seed=77)
        a = anneal_positions(scenario, init, params, cfg)
        b = anneal_positions(scenario, init, params, cfg)
        np.testing.assert_array_equal(a.positions, b.positions)
        np.testing.assert_array_equal(a.freq_shifts, b.freq_shifts)


class TestAnnealFreqShifts:
    def test_degenerate_box_keeps_zero_shifts(self, link_cfg, bob):
        scenario = small_scenario(link_cfg, bob)
        lam = LAM
        from fdma.scenario import BaselineParams

        params = BaselineParams(0.75 * lam, -1e6, 5 * lam, 0.5 * lam, (0.0, 0.0))
        init = make_cpa(5, params, F0)
        result = anneal_freq_shifts(scenario, init, params,
                                    AnnealerConfig(max_iterations=100, seed=2))
        assert np.all(result.freq_shifts == 0.0)
        assert cost(scenario, result) == cost(scenario, init)

    def test_shifts_cut_cost_for_range_displaced_eve(self, link_cfg, bob):
        # One adversary on Bob's bearing but at a different range: positions
        # cannot touch it, frequency shifts can.
        eve = make_placement(bob.range_m + 30.0, bob.angle_rad, link_cfg)
        scenario = Scenario(bob, (eve,), tx_power_linear=10.0 ** 0.5)
        params = default_baseline_params(4, F0, SPEED_OF_LIGHT)
        init = make_cpa(4, params, F0)
        result = anneal_freq_shifts(scenario, init, params,
                                    AnnealerConfig(max_iterations=2000, seed=6))
        assert cost(scenario, result) < cost(scenario, init)
        lo, hi = params.freq_shift_bounds
        assert np.all((result.freq_shifts >= lo) & (result.freq_shifts <= hi))


class TestAlternateSa:
    def test_zero_rounds_returns_init(self, link_cfg, bob, default_params):
        scenario = small_scenario(link_cfg, bob)
        init = make_linear_fda(21, default_params, F0)
        out = alternate_sa(scenario, init, default_params,
                           AnnealerConfig(max_iterations=10, seed=0),
                           AlternationConfig(max_rounds=0))
        assert out is init

    def test_deterministic(self, link_cfg, bob):
        scenario = small_scenario(link_cfg, bob, num_eves=2)
        params = default_baseline_params(6, F0, SPEED_OF_LIGHT)
        init = make_linear_fda(6, params, F0)
        sa_cfg = AnnealerConfig(max_iterations=200, seed=31)
        alt_cfg = AlternationConfig(max_rounds=2, relative_tolerance=1e-6)
        a = alternate_sa(scenario, init, params, sa_cfg, alt_cfg)
        b = alternate_sa(scenario, init, params, sa_cfg, alt_cfg)
        np.testing.assert_array_equal(a.positions, b.positions)
        np.testing.assert_array_equal(a.freq_shifts, b.freq_shifts)

    def test_rejects_too_many_eves(self, link_cfg, bob):
        scenario = small_scenario(link_cfg, bob, num_eves=3)
        params = default_baseline_params(3, F0, SPEED_OF_LIGHT)
        init = make_linear_fda(3, params, F0)
        with pytest.raises(ValueError):
            alternate_sa(scenario, init, params, AnnealerConfig(seed=0),
                         AlternationConfig())

    @pytest.mark.slow
    def test_canonical_eves_suppressed_twenty_db_per_point(self, default_scenario,
                                                           default_params):
        # Optimized pattern power at each canonical adversary must sit at
        # least 20 dB under the linear-ramp baseline at the same point.
        from fdma.model import beampattern

        init = make_linear_fda(21, default_params, F0)
        sa_cfg = AnnealerConfig(max_iterations=12000, seed=2024)
        alt_cfg = AlternationConfig(max_rounds=4, relative_tolerance=1e-4)
        optimized = alternate_sa(default_scenario, init, default_params, sa_cfg, alt_cfg)
        assert cost(default_scenario, optimized) <= cost(default_scenario, init)
        suppressions = []
        for eve in default_scenario.eves:
            base = abs(beampattern(init, eve, default_scenario.bob))
            opt = abs(beampattern(optimized, eve, default_scenario.bob))
            suppressions.append(20.0 * math.log10(base / max(opt, 1e-300)))
        assert min(suppressions) >= 20.0, f"per-eve suppression {suppressions} dB"
