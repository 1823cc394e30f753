import math

import numpy as np
import pytest
from scipy.integrate import quad

from core.errors import DivergenceError, DomainError, ShapeError
from core.spectra import (
    ClarkeJakes,
    DopplerSpec,
    Rectangular,
    SpectralShape,
    Tabulated,
    doppler_from_physical,
    eval_shape,
    inverse_shape_integral,
    load_tabulated,
    scaled_spectrum,
    shape_from_selector,
)


@pytest.fixture
def triangle():
    # unit power: 0.5 * (0.1 + 0.9) on each half
    return Tabulated.from_samples([-1.0, 0.0, 1.0], [0.1, 0.9, 0.1])


class TestBuiltInShapes:
    def test_base_shape_is_abstract(self):
        with pytest.raises(TypeError):
            SpectralShape()

    def test_inverse_integrals(self):
        assert inverse_shape_integral(ClarkeJakes()) == pytest.approx(math.pi ** 2 / 2, abs=1e-9)
        assert inverse_shape_integral(Rectangular()) == pytest.approx(4.0, abs=1e-9)

    @pytest.mark.parametrize("shape", [ClarkeJakes(), Rectangular()])
    def test_unit_power(self, shape):
        assert shape.integrate(lambda s: s) == pytest.approx(1.0, abs=1e-12)
        assert shape.power_between(-1.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_clarke_jakes_values(self):
        shape = ClarkeJakes()
        assert eval_shape(shape, 0.0) == pytest.approx(1.0 / math.pi)
        assert eval_shape(shape, 0.6) == pytest.approx(1.0 / (math.pi * 0.8))
        assert eval_shape(shape, 1.0) == math.inf
        assert eval_shape(shape, -1.0) == math.inf
        assert eval_shape(shape, 1.5) == 0.0

    def test_rectangular_values(self):
        assert eval_shape(Rectangular(), 0.3) == 0.5
        assert eval_shape(Rectangular(), -1.0) == 0.5
        assert eval_shape(Rectangular(), 1.2) == 0.0

    @pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
    def test_clarke_jakes_power_near_band_edge(self, eps):
        expected = math.acos(1.0 - eps) / math.pi
        assert ClarkeJakes().power_between(1.0 - eps, 1.0) == pytest.approx(expected, rel=1e-9)

    def test_power_between_clips_to_band(self):
        assert Rectangular().power_between(-0.5, 0.5) == pytest.approx(0.5)
        assert Rectangular().power_between(0.5, 3.0) == pytest.approx(0.25)
        assert ClarkeJakes().power_between(2.0, 3.0) == 0.0

    def test_estimation_error_at_zero_is_zero(self):
        assert ClarkeJakes().estimation_error(0.0) == 0.0


class TestTabulated:
    def test_flat_table_behaves_like_rectangular(self):
        flat = Tabulated.from_samples(np.linspace(-1, 1, 5), np.full(5, 0.5))
        assert inverse_shape_integral(flat) == pytest.approx(4.0, rel=1e-12)
        for c in (0.01, 0.3, 10.0):
            assert flat.estimation_error(c) == pytest.approx(Rectangular().estimation_error(c), rel=1e-12)

    def test_inverse_integral_is_exact_per_segment(self, triangle):
        expected, _ = quad(lambda x: 1.0 / triangle.density(x), -1.0, 1.0, points=[0.0], epsabs=1e-13)
        assert inverse_shape_integral(triangle) == pytest.approx(expected, rel=1e-9)
        assert inverse_shape_integral(triangle) == pytest.approx(2.0 * math.log(9.0) / 0.8, rel=1e-12)

    def test_quadrature_matches_scipy(self, triangle):
        c = 0.2
        expected, _ = quad(lambda x: c * triangle.density(x) / (c + triangle.density(x)), -1.0, 1.0, points=[0.0])
        assert triangle.estimation_error(c) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("c", [1e-2, 1e-3, 1e-4])
    def test_estimation_error_with_zero_edge_samples(self, c):
        tent = Tabulated.from_samples([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        exact = 2.0 * c * (1.0 - c * math.log1p(1.0 / c))
        reference, _ = quad(lambda x: c * tent.density(x) / (c + tent.density(x)), -1.0, 1.0,
                            points=[0.0], epsabs=1e-14, limit=200)
        assert tent.estimation_error(c) == pytest.approx(exact, abs=1e-12)
        assert tent.estimation_error(c) == pytest.approx(reference, abs=1e-10)

    def test_power_between(self, triangle):
        assert triangle.power_between(-1.0, 1.0) == pytest.approx(1.0)
        assert triangle.power_between(0.0, 1.0) == pytest.approx(0.5)
        assert triangle.power_between(-0.5, 0.5) == pytest.approx(0.5 * (0.5 + 0.9) * 1.0)

    def test_asymmetric_table_against_scipy(self):
        grid = [-1.0, -0.5, 0.3, 1.0]
        with pytest.warns(UserWarning, match="rescaled"):
            shape = Tabulated.from_samples(grid, [0.2, 1.0, 0.4, 0.05])
        inner = [-0.5, 0.3]

        def integral(fn, lo=-1.0, hi=1.0):
            value, _ = quad(fn, lo, hi, points=[p for p in inner if lo < p < hi] or None, epsabs=1e-14, limit=200)
            return value

        assert inverse_shape_integral(shape) == pytest.approx(integral(lambda x: 1.0 / shape.density(x)), rel=1e-9)
        for c in (1e-3, 0.05, 2.0):
            expected = integral(lambda x: c * shape.density(x) / (c + shape.density(x)))
            assert shape.estimation_error(c) == pytest.approx(expected, abs=1e-10)
        for lo, hi in ((-1.0, 1.0), (-0.75, 0.6), (0.1, 0.9)):
            assert shape.power_between(lo, hi) == pytest.approx(integral(shape.density, lo, hi), abs=1e-12)
        assert shape.power_between(-0.75, 0.6) != pytest.approx(shape.power_between(-0.6, 0.75), abs=1e-3)

    def test_rescaled_with_warning(self):
        with pytest.warns(UserWarning, match="rescaled"):
            shape = Tabulated.from_samples([-1.0, 1.0], [1.0, 1.0])
        assert shape.raw_power == pytest.approx(2.0)
        assert shape.integrate(lambda s: s) == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "grid, values",
        [
            ([-1.0, 0.5, 0.0, 1.0], [0.5, 0.5, 0.5, 0.5]),  # non-monotone
            ([-1.0, 0.0, 1.0], [0.5, 0.0, 0.5]),  # vanishes inside the band
            ([-0.9, 0.0, 1.0], [0.5, 0.5, 0.5]),  # does not span [-1, 1]
            ([-1.0, 0.0, 1.0], [0.5, -0.1, 0.5]),
            ([-1.0, 0.0, 1.0], [0.5, 0.5]),
            ([-1.0, 0.0, 1.0], [0.5, math.nan, 0.5]),
        ],
    )
    def test_invalid_tables(self, grid, values):
        with pytest.raises(ShapeError):
            Tabulated.from_samples(grid, values)

    def test_zero_at_band_edge_diverges(self):
        shape = Tabulated.from_samples([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        with pytest.raises(DivergenceError):
            inverse_shape_integral(shape)

    def test_load_file(self, tmp_path):
        path = tmp_path / "spectrum.txt"
        path.write_text("# xi  S\n-1 0.5\n0 0.5  # centre\n1 0.5\n")
        shape = load_tabulated(path)
        assert inverse_shape_integral(shape) == pytest.approx(4.0)
        assert inverse_shape_integral(shape_from_selector(f"file:{path}")) == pytest.approx(4.0)

    def test_load_file_errors(self, tmp_path):
        with pytest.raises(ShapeError, match="not found"):
            load_tabulated(tmp_path / "missing.txt")
        bad = tmp_path / "three.txt"
        bad.write_text("-1 0.5 1\n1 0.5 1\n")
        with pytest.raises(ShapeError):
            load_tabulated(bad)


class TestSelectorsAndDoppler:
    def test_selectors(self):
        assert isinstance(shape_from_selector("clarke-jakes"), ClarkeJakes)
        assert isinstance(shape_from_selector("rectangular"), Rectangular)
        with pytest.raises(ShapeError):
            shape_from_selector("gaussian")

    @pytest.mark.parametrize("doppler", [0.0, -0.01, 0.5, 0.7])
    def test_doppler_range(self, doppler):
        with pytest.raises(DomainError):
            DopplerSpec(doppler, ClarkeJakes())

    def test_scaled_spec(self):
        spec = DopplerSpec(0.01, ClarkeJakes())
        assert spec.alpha_min == pytest.approx(0.02)
        assert spec.scaled(4).doppler == pytest.approx(0.04)
        with pytest.raises(DomainError):
            spec.scaled(60)

    def test_scaled_spectrum_has_unit_power(self):
        spec = DopplerSpec(0.01, Rectangular())
        assert scaled_spectrum(spec, 0.005) == pytest.approx(50.0)
        assert scaled_spectrum(spec, 0.02) == 0.0
        assert scaled_spectrum(DopplerSpec(0.02, Rectangular()), 0.0) == pytest.approx(25.0)
        total, _ = quad(lambda nu: scaled_spectrum(spec, nu), -0.01, 0.01)
        assert total == pytest.approx(1.0)

    def test_doppler_round_trip(self):
        symbol_rate, carrier = 1e4, 2.5e9
        velocity = 0.02 * 299792458.0 * symbol_rate / carrier
        assert doppler_from_physical(velocity, carrier, symbol_rate) == pytest.approx(0.02, rel=1e-12)

    def test_wimax_example(self):
        assert doppler_from_physical(27.78, 2.5e9, 1.0 / 102.9e-6) == pytest.approx(0.0238, abs=5e-4)

    @pytest.mark.parametrize("args", [(0.0, 2.5e9, 1e4), (10.0, -1.0, 1e4), (10.0, 2.5e9, 0.0), (3e5, 2.5e9, 1e3)])
    def test_doppler_errors(self, args):
        with pytest.raises(DomainError):
            doppler_from_physical(*args)
