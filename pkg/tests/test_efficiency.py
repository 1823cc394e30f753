import math

import numpy as np
import pytest

from core.errors import ConvergenceError, DomainError
from core.efficiency import (
    boosting_gain_numeric,
    count_local_maxima,
    optimize_overhead,
    penalty,
    pilot_se,
    scan_pilot_se,
    verify_boost_restriction,
)
from core.estimation import BlockFading, ContinuousFading, PowerAllocation
from core.special_fn import capacity_csi, capacity_csi_d1
from core.spectra import ClarkeJakes, DopplerSpec, Rectangular


def jakes(doppler):
    return ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))


class TestPilotSe:
    def test_all_pilots_carry_nothing(self):
        assert pilot_se(jakes(0.02), 10.0, 1.0) == 0.0

    def test_block_example(self):
        assert pilot_se(BlockFading(50), 10.0, 0.02) == pytest.approx(0.98 * capacity_csi(100.0 / 21.0), rel=1e-12)

    def test_below_perfect_csi(self):
        for alpha in np.linspace(0.04, 0.9, 12):
            assert 0.0 < pilot_se(jakes(0.02), 10.0, alpha) < capacity_csi(10.0)

    def test_boosted_allocation_is_checked(self):
        with pytest.raises(DomainError):
            pilot_se(jakes(0.02), 10.0, 0.1, PowerAllocation(2.0, 1.0))


class TestCountLocalMaxima:
    @pytest.mark.parametrize(
        "values, expected",
        [
            ([1, 2, 3, 2, 1], 1),
            ([1, 2, 1, 2, 1], 2),
            ([3, 2, 1], 1),
            ([1, 2, 3], 1),
            ([1, 3, 2, 4], 2),
            ([5, 5, 5], 1),
        ],
    )
    def test_cases(self, values, expected):
        assert count_local_maxima(values) == expected

    def test_ignores_noise(self):
        assert count_local_maxima([1.0, 2.0, 2.0 + 1e-14, 2.0, 3.0, 1.0]) == 1


class TestUnboosted:
    def test_single_interior_peak(self):
        model = jakes(0.02)
        alphas = np.linspace(0.04, 1.0, 97)
        assert count_local_maxima(scan_pilot_se(model, 10.0, alphas)) == 1

        solution = optimize_overhead(model, 10.0)
        assert solution.converged
        assert solution.local_maxima == 1
        assert model.alpha_min < solution.alpha_star < 1.0
        assert solution.se_star < capacity_csi(10.0)
        assert (solution.rho_p_star, solution.rho_d_star) == (1.0, 1.0)

    @pytest.mark.parametrize("doppler, snr", [(0.02, 10.0), (0.001, 10.0), (0.005, 1.0)])
    def test_optimum_beats_its_neighbours(self, doppler, snr):
        model = jakes(doppler)
        solution = optimize_overhead(model, snr)
        for step in (-1e-4, 1e-4):
            alpha = min(max(solution.alpha_star + step, model.alpha_min), 1.0)
            assert pilot_se(model, snr, alpha) <= solution.se_star + 1e-12

    @pytest.mark.parametrize("boost", [False, True])
    @pytest.mark.parametrize("snr", [1.0, 10.0])
    @pytest.mark.parametrize("block_length", [10, 50, 500])
    def test_block_matches_rectangular_counterpart(self, block_length, snr, boost):
        block = optimize_overhead(BlockFading(block_length), snr, boost=boost)
        rect = optimize_overhead(BlockFading(block_length).equivalent_rectangular(), snr, boost=boost)
        assert block.se_star == pytest.approx(rect.se_star, abs=1e-7)
        assert block.alpha_star == pytest.approx(rect.alpha_star, abs=1e-7)

    def test_single_symbol_blocks_leave_no_room(self):
        solution = optimize_overhead(BlockFading(1), 10.0)
        assert solution.alpha_star == 1.0
        assert solution.se_star == 0.0

    def test_iteration_cap_reports_best_point(self):
        with pytest.raises(ConvergenceError) as excinfo:
            optimize_overhead(jakes(0.02), 10.0, max_iter=2)
        best = excinfo.value.best
        assert best is not None
        assert not best.converged
        assert best.iterations == 2
        assert 0.0 < best.se_star < capacity_csi(10.0)

    def test_tiny_doppler_follows_leading_term(self):
        doppler, snr = 1e-6, 10.0
        leading = math.sqrt(2.0 * doppler * (1.0 + snr) * capacity_csi_d1(snr) / capacity_csi(snr))
        for model in (jakes(doppler), ContinuousFading(DopplerSpec(doppler, Rectangular()))):
            assert optimize_overhead(model, snr).alpha_star == pytest.approx(leading, rel=0.10)

    def test_penalty_vanishes_with_doppler(self):
        assert penalty(jakes(1e-6), 10.0) < 0.01
        assert penalty(jakes(1e-6), 10.0) < penalty(jakes(1e-4), 10.0)

    def test_penalty_grows_like_square_root_of_doppler(self):
        ratio = penalty(jakes(4e-4), 10.0) / penalty(jakes(1e-4), 10.0)
        assert 1.8 <= ratio <= 2.2

    @pytest.mark.slow
    @pytest.mark.parametrize("snr", [0.1, 1.0, 10.0, 100.0])
    @pytest.mark.parametrize("doppler", [1e-4, 1e-3, 0.02, 0.1])
    def test_dense_scan_is_unimodal(self, snr, doppler):
        model = jakes(doppler)
        alphas = np.geomspace(model.alpha_min, 1.0, 2000)
        alphas[-1] = 1.0
        assert count_local_maxima(scan_pilot_se(model, snr, alphas)) == 1


class TestBoosted:
    def test_pilots_sit_at_nyquist_and_get_more_power(self):
        model = jakes(0.02)
        solution = optimize_overhead(model, 10.0, boost=True)
        assert solution.converged
        assert solution.alpha_star == model.alpha_min
        assert solution.rho_p_star > 1.0
        assert solution.rho_d_star < 1.0
        solution.allocation.check(solution.alpha_star)

    @pytest.mark.parametrize("doppler", [0.001, 0.02])
    @pytest.mark.parametrize("snr", [10.0, 100.0])
    def test_boosting_never_hurts(self, doppler, snr):
        model = jakes(doppler)
        assert boosting_gain_numeric(model, snr) >= -1e-9
        assert penalty(model, snr, boost=True) <= penalty(model, snr) + 1e-9

    def test_penalty_is_non_negative(self):
        for model in (jakes(0.02), ContinuousFading(DopplerSpec(0.01, Rectangular())), BlockFading(100)):
            assert penalty(model, 10.0) >= 0.0
            assert penalty(model, 10.0, boost=True) >= 0.0

    def test_single_symbol_blocks(self):
        solution = optimize_overhead(BlockFading(1), 10.0, boost=True)
        assert solution.se_star == 0.0

    def test_joint_grid_does_not_beat_nyquist_pilots(self):
        result = verify_boost_restriction(jakes(0.02), 10.0, n_alpha=8, n_rho=32)
        assert result.grid_best <= result.restricted + 1e-6
