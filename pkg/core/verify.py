"""
Cross-validation suite: closed forms against quadrature, expansions against the
numeric optimizers, analytic derivatives against finite differences and the
MIMO capacity integral against Monte Carlo.

Each check returns the largest observed error together with its tolerance.
"""

import math
from typing import Callable, List, NamedTuple

import numpy as np

from core.efficiency import optimize_overhead, pilot_se
from core.estimation import BlockFading, ContinuousFading, mmse, mmse_clarke_jakes_closed, snr_eff
from core.expansions import (
    appendix_derivative_oracles,
    boosting_gain,
    mimo_overhead_expansion,
    overhead_expansion,
    power_allocation_expansion,
    se_series,
    snr_eff_series,
)
from core.mimo_capacity import (
    AntennaConfig,
    capacity_mimo,
    capacity_mimo_monte_carlo,
    optimize_equivalent_siso,
    optimize_mimo_overhead,
)
from core.special_fn import capacity_csi, db_to_linear
from core.spectra import ClarkeJakes, DopplerSpec, Rectangular, SpectralShape, inverse_shape_integral

LEVELS = ("quick", "full")

FD_DOPPLER = 1e-6
FD_STEP = 1e-7
PROP1_F_MAX = 0.05


class Check(NamedTuple):
    name: str
    tolerance: float
    observed: float
    passed: bool


def _check(name: str, tolerance: float, observed: float) -> Check:
    return Check(name, tolerance, observed, bool(observed <= tolerance))


def relative_error(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def boosted_mmse(shape: SpectralShape, snr: float, rho_d: float, doppler: float) -> float:
    """Exact MMSE with pilots at alpha = 2 f_D and the data ratio held at rho_d."""
    alpha = 2.0 * doppler
    rho_p = (1.0 - rho_d * (1.0 - alpha)) / alpha
    return mmse(ContinuousFading(DopplerSpec(doppler, shape)), snr, alpha, rho_p)


def boosted_snr_eff(shape: SpectralShape, snr: float, rho_d: float, doppler: float) -> float:
    return snr_eff(snr, boosted_mmse(shape, snr, rho_d, doppler), rho_d)


def central_derivatives(fn: Callable[[float], float], x: float, h: float):
    """First and second central differences of fn at x."""
    lo, mid, hi = fn(x - h), fn(x), fn(x + h)
    return (hi - lo) / (2.0 * h), (hi - 2.0 * mid + lo) / (h * h)


def check_closed_form_mmse(level: str) -> Check:
    n = 20 if level == "full" else 6
    worst = 0.0
    for doppler in (0.001, 0.02):
        model = ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))
        for alpha in np.linspace(2.0 * doppler, 1.0, n):
            for snr in np.geomspace(0.1, 100.0, n):
                for rho_p in (0.5, 1.0, 5.0):
                    quad = mmse(model, snr, alpha, rho_p)
                    closed = mmse_clarke_jakes_closed(snr, alpha, doppler, rho_p)
                    worst = max(worst, abs(quad - closed))
    return _check("closed-form vs quadrature MMSE (Clarke-Jakes)", 1e-8, worst)


def check_block_equivalence(level: str) -> List[Check]:
    worst_mmse, worst_alpha = 0.0, 0.0
    for n_b in (10, 50, 500):
        block = BlockFading(n_b)
        rect = block.equivalent_rectangular()
        for snr in (1.0, 10.0):
            for alpha in np.linspace(1.0 / n_b, 1.0, 7):
                worst_mmse = max(worst_mmse, abs(mmse(block, snr, alpha) - mmse(rect, snr, alpha)))
            for boost in (False, True):
                a = optimize_overhead(block, snr, boost)
                b = optimize_overhead(rect, snr, boost)
                worst_alpha = max(worst_alpha, abs(a.alpha_star - b.alpha_star))
    return [
        _check("block vs rectangular MMSE", 1e-10, worst_mmse),
        _check("block vs rectangular optimal overhead", 1e-7, worst_alpha),
    ]


def check_inverse_integrals(level: str) -> Check:
    worst = max(
        abs(inverse_shape_integral(ClarkeJakes()) - math.pi ** 2 / 2.0),
        abs(inverse_shape_integral(Rectangular()) - 4.0),
    )
    return _check("inverse-shape integrals (pi^2/2, 4)", 1e-9, worst)


def _prop1_error(snr_db: float, doppler: float) -> float:
    snr = db_to_linear(snr_db)
    model = ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))
    numeric = optimize_overhead(model, snr).alpha_star
    return relative_error(overhead_expansion(ClarkeJakes(), snr, doppler).value, numeric)


def check_overhead_expansion(level: str) -> List[Check]:
    points = 10 if level == "full" else 5
    worst = 0.0
    for snr_db in (0.0, 10.0):
        for doppler in np.geomspace(1e-4, PROP1_F_MAX, points):
            # (0 dB, f_D = 0.05) is past the 10 % regime
            if snr_db == 0.0 and doppler >= PROP1_F_MAX * (1 - 1e-12):
                continue
            worst = max(worst, _prop1_error(snr_db, doppler))
    small = max(_prop1_error(snr_db, 1e-4) for snr_db in (0.0, 10.0))
    return [
        _check("overhead expansion vs numeric (relative)", 0.10, worst),
        _check("overhead expansion vs numeric at f_D=1e-4", 0.02, small),
    ]


def check_power_allocation(level: str) -> List[Check]:
    checks = []
    snrs_db = np.linspace(0.0, 20.0, 5 if level == "full" else 3)
    for doppler, tolerance in ((1e-4, 0.03), (1e-3, 0.10)):
        model = ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))
        worst = 0.0
        for snr_db in snrs_db:
            snr = db_to_linear(snr_db)
            numeric = optimize_overhead(model, snr, boost=True).rho_p_star
            worst = max(worst, relative_error(power_allocation_expansion(snr, doppler).rho_p, numeric))
        checks.append(_check(f"power boost expansion vs numeric at f_D={doppler:g}", tolerance, worst))
    return checks


def check_appendix_oracles(level: str) -> Check:
    worst = 0.0
    f, h = FD_DOPPLER, FD_STEP
    for shape in (ClarkeJakes(), Rectangular()):
        for alpha in (0.05, 0.2):
            for snr in (1.0, 10.0):
                for rho_d in (0.8, 0.95):
                    oracles = appendix_derivative_oracles(shape, snr, alpha, rho_d)
                    d1, d2 = central_derivatives(
                        lambda x: mmse(ContinuousFading(DopplerSpec(x, shape)), snr, alpha), f, h
                    )
                    b1, b2 = central_derivatives(lambda x: boosted_mmse(shape, snr, rho_d, x), f, h)
                    worst = max(
                        worst,
                        relative_error(d1, oracles.mmse_d1),
                        relative_error(d2, oracles.mmse_d2),
                        relative_error(b1, oracles.boosted_mmse_d1),
                        relative_error(b2, oracles.boosted_mmse_d2),
                    )
    return _check("analytic MMSE derivatives vs finite differences", 1e-3, worst)


def check_series(level: str) -> List[Check]:
    shape = Rectangular()
    exact = boosted_snr_eff(shape, 10.0, 0.9, 1e-4)
    truncation = abs(snr_eff_series(shape, 10.0, 0.9, 1e-4) - exact)

    model = ContinuousFading(DopplerSpec(1e-4, ClarkeJakes()))
    se_exact = pilot_se(model, 10.0, 0.02)
    se_error = relative_error(se_series(ClarkeJakes(), 10.0, 0.02, 1e-4), se_exact)
    return [
        _check("boosted SNR_eff series truncation at f_D=1e-4", 1e-6, truncation),
        _check("spectral efficiency series at fixed alpha", 1e-2, se_error),
    ]


def check_sqrt_scaling(level: str) -> List[Check]:
    snr = 10.0
    low = optimize_overhead(ContinuousFading(DopplerSpec(1e-4, ClarkeJakes())), snr)
    high = optimize_overhead(ContinuousFading(DopplerSpec(4e-4, ClarkeJakes())), snr)
    c = capacity_csi(snr)
    penalty_ratio = (c - high.se_star) / (c - low.se_star)
    alpha_ratio = high.alpha_star / low.alpha_star
    # distance from the band [1.8, 2.2] around the ideal factor 2
    return [
        _check("penalty sqrt(f_D) scaling (|ratio - 2|)", 0.2, abs(penalty_ratio - 2.0)),
        _check("optimal overhead sqrt(f_D) scaling (|ratio - 2|)", 0.2, abs(alpha_ratio - 2.0)),
    ]


def check_boosting(level: str) -> List[Check]:
    points = 10 if level == "full" else 5
    shortfall = 0.0
    for snr_db in (0.0, 10.0):
        snr = db_to_linear(snr_db)
        for doppler in np.geomspace(1e-4, 0.05, points):
            model = ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))
            gap = optimize_overhead(model, snr, False).se_star - optimize_overhead(model, snr, True).se_star
            shortfall = max(shortfall, gap)

    model = ContinuousFading(DopplerSpec(1e-3, ClarkeJakes()))
    numeric_gain = optimize_overhead(model, 10.0, True).se_star - optimize_overhead(model, 10.0).se_star
    return [
        _check("boosted efficiency never below unboosted", 1e-12, shortfall),
        _check("boosting gain vs expansion at f_D=1e-3", 0.25, relative_error(boosting_gain(10.0, 1e-3), numeric_gain)),
    ]


def check_mimo(level: str, seed: int) -> List[Check]:
    antennas = (1, 2, 4, 8) if level == "full" else (1, 2, 4)
    snr = 10.0
    worst_equivalent, worst_expansion = 0.0, 0.0
    for doppler in (0.001, 0.01):
        spec = DopplerSpec(doppler, Rectangular())
        for n in antennas:
            cfg = AntennaConfig(n, n)
            numeric = optimize_mimo_overhead(cfg, spec, snr).alpha_star
            worst_equivalent = max(
                worst_equivalent, relative_error(optimize_equivalent_siso(cfg, spec, snr).alpha_star, numeric)
            )
            if doppler == 0.001:
                expansion = mimo_overhead_expansion(Rectangular(), snr, doppler, n, n).value
                worst_expansion = max(worst_expansion, relative_error(expansion, numeric))

    samples = 1_000_000 if level == "full" else 100_000
    cfg = AntennaConfig(2, 2)
    mean, stderr = capacity_mimo_monte_carlo(cfg, snr, samples, seed)
    return [
        _check("MIMO overhead vs single-antenna equivalent", 0.02, worst_equivalent),
        _check("MIMO overhead expansion vs numeric at f_D=1e-3", 0.10, worst_expansion),
        _check("2x2 capacity vs Monte Carlo (standard errors)", 3.0, abs(capacity_mimo(cfg, snr) - mean) / stderr),
    ]


def run_verification(level: str = "quick", seed: int = 20240101) -> List[Check]:
    checks: List[Check] = [check_closed_form_mmse(level)]
    checks += check_block_equivalence(level)
    checks.append(check_inverse_integrals(level))
    checks += check_overhead_expansion(level)
    checks += check_power_allocation(level)
    checks.append(check_appendix_oracles(level))
    checks += check_series(level)
    checks += check_sqrt_scaling(level)
    checks += check_boosting(level)
    checks += check_mimo(level, seed)
    return checks
