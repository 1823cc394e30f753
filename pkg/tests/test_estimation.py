import math

import numpy as np
import pytest

from core.errors import AliasingError, DomainError
from core.estimation import (
    BlockFading,
    ContinuousFading,
    FadingModel,
    PowerAllocation,
    mmse,
    mmse_clarke_jakes_closed,
    snr_eff,
)
from core.spectra import ClarkeJakes, DopplerSpec, Rectangular


@pytest.fixture
def jakes():
    return ContinuousFading(DopplerSpec(0.02, ClarkeJakes()))


class TestMmse:
    def test_fading_model_is_abstract(self):
        with pytest.raises(TypeError):
            FadingModel()

    def test_block_example(self):
        assert mmse(BlockFading(50), 10.0, 0.02) == pytest.approx(1.0 / 11.0, abs=1e-12)

    def test_rectangular_example(self):
        model = ContinuousFading(DopplerSpec(0.01, Rectangular()))
        assert mmse(model, 10.0, 0.02) == pytest.approx(1.0 / 11.0, abs=1e-8)

    def test_clarke_jakes_quadrature_matches_closed_form(self, jakes):
        assert mmse(jakes, 10.0, 0.1) == pytest.approx(mmse_clarke_jakes_closed(10.0, 0.1, 0.02), abs=1e-8)

    @pytest.mark.parametrize("doppler", [0.001, 0.02])
    @pytest.mark.parametrize("rho_p", [0.5, 1.0, 5.0])
    def test_closed_form_grid(self, doppler, rho_p):
        model = ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))
        for alpha in np.linspace(2 * doppler, 1.0, 20):
            for snr in np.geomspace(0.1, 100.0, 20):
                quad = mmse(model, snr, alpha, rho_p)
                closed = mmse_clarke_jakes_closed(snr, alpha, doppler, rho_p)
                assert quad == pytest.approx(closed, abs=1e-8)

    def test_closed_form_is_continuous_across_branch_point(self):
        doppler, alpha = 0.02, 0.1
        snr_at_one = math.pi * doppler / alpha
        values = [
            mmse_clarke_jakes_closed(snr_at_one * (1 + d), alpha, doppler)
            for d in (-2e-4, -1e-4 - 1e-9, -1e-4 + 1e-9, 0.0, 1e-4 - 1e-9, 1e-4 + 1e-9, 2e-4)
        ]
        assert np.all(np.diff(values) < 0)
        assert max(abs(np.diff(values))) < 1e-4

    def test_closed_form_limits(self):
        assert mmse_clarke_jakes_closed(1e6, 1.0, 0.001) < 1e-5
        assert mmse_clarke_jakes_closed(10.0, 0.1, 0.02, rho_p=0.0) == 1.0
        assert mmse_clarke_jakes_closed(10.0, 0.1, 0.02, rho_p=1e-14) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n_b", [10, 50, 500])
    def test_block_continuous_equivalence(self, n_b):
        block = BlockFading(n_b)
        rect = ContinuousFading(DopplerSpec(1.0 / (2 * n_b), Rectangular()))
        assert block.equivalent_rectangular() == rect
        for snr in (0.1, 1.0, 10.0, 100.0):
            for alpha in np.linspace(1.0 / n_b, 1.0, 9):
                for rho_p in (0.5, 1.0, 3.0):
                    assert mmse(block, snr, alpha, rho_p) == pytest.approx(mmse(rect, snr, alpha, rho_p), abs=1e-10)

    def test_block_length_one_has_no_continuous_counterpart(self):
        with pytest.raises(DomainError):
            BlockFading(1).equivalent_rectangular()

    def test_monotone_decreasing(self, jakes):
        alphas = np.linspace(0.04, 1.0, 25)
        assert np.all(np.diff([mmse(jakes, 10.0, a) for a in alphas]) < 0)
        snrs = np.geomspace(0.1, 100.0, 25)
        assert np.all(np.diff([mmse(jakes, s, 0.1) for s in snrs]) < 0)
        boosts = np.linspace(0.1, 10.0, 25)
        assert np.all(np.diff([mmse(jakes, 10.0, 0.1, r) for r in boosts]) < 0)

    def test_boost_acts_as_snr_scaling(self, jakes):
        for rho_p in (0.3, 2.0, 7.5):
            assert mmse(jakes, 10.0, 0.1, rho_p) == pytest.approx(mmse(jakes, rho_p * 10.0, 0.1), abs=1e-12)

    def test_aliasing(self, jakes):
        with pytest.raises(AliasingError):
            mmse(jakes, 10.0, 0.039)
        with pytest.raises(AliasingError):
            mmse(BlockFading(50), 10.0, 0.019)
        assert mmse(jakes, 10.0, 0.04) < 1.0

    @pytest.mark.parametrize("args", [(10.0, 1.01, 1.0), (0.0, 0.1, 1.0), (10.0, 0.1, -1.0)])
    def test_domain_errors(self, jakes, args):
        with pytest.raises(DomainError):
            mmse(jakes, *args)


class TestSnrEff:
    def test_examples(self):
        assert snr_eff(10.0, 0.0) == pytest.approx(10.0)
        assert snr_eff(10.0, 1.0) == 0.0
        assert snr_eff(10.0, 1.0 / 11.0) == pytest.approx(100.0 / 21.0)

    def test_bounded_by_data_snr(self):
        for rho_d in (0.5, 0.9, 1.2):
            assert snr_eff(10.0, 0.05, rho_d) <= rho_d * 10.0

    def test_monotone(self):
        mmses = np.linspace(0.0, 1.0, 11)
        assert np.all(np.diff([snr_eff(10.0, m) for m in mmses]) < 0)
        rhos = np.linspace(0.1, 2.0, 11)
        assert np.all(np.diff([snr_eff(10.0, 0.1, r) for r in rhos]) > 0)

    @pytest.mark.parametrize("args", [(10.0, -0.1, 1.0), (10.0, 1.1, 1.0), (10.0, 0.1, 0.0)])
    def test_domain_errors(self, args):
        with pytest.raises(DomainError):
            snr_eff(*args)


class TestPowerAllocation:
    def test_unboosted(self):
        alloc = PowerAllocation.unboosted()
        assert (alloc.rho_p, alloc.rho_d) == (1.0, 1.0)
        assert alloc.check(0.3) is alloc

    @pytest.mark.parametrize("alpha, rho_d", [(0.02, 0.9), (0.1, 0.5), (0.5, 1.5), (1.0, 0.7)])
    def test_for_alpha_preserves_power(self, alpha, rho_d):
        alloc = PowerAllocation.for_alpha(alpha, rho_d)
        assert alloc.rho_p * alpha + alloc.rho_d * (1 - alpha) == pytest.approx(1.0, abs=1e-12)
        alloc.check(alpha)

    def test_violations(self):
        with pytest.raises(DomainError):
            PowerAllocation(2.0, 2.0).check(0.1)
        with pytest.raises(DomainError):
            PowerAllocation.for_alpha(0.1, 1.5)
        with pytest.raises(DomainError):
            PowerAllocation(-1.0, 1.0)
