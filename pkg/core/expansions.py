"""
Small-Doppler expansions of the optimal pilot overhead, power boost and
spectral efficiency.

Everything is written in terms of a capacity family (C, C', C'') so the same
formulas serve the single-antenna channel and, with the Doppler multiplied by
n_T, the MIMO channel.  The shape of the Doppler spectrum enters only through
the inverse-shape integral, and only at first order.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

from core.errors import DomainError, OutOfRegimeError
from core.estimation import PowerAllocation
from core.mimo_capacity import AntennaConfig, capacity_family
from core.special_fn import SISO_CAPACITY, CapacityFamily, SnrLinear
from core.spectra import SpectralShape, inverse_shape_integral


class ClampInterval(NamedTuple):
    lo: float
    hi: float


class ExpansionResult(NamedTuple):
    value: float
    leading_term: float
    first_order_term: float
    clamp: ClampInterval
    clamped: bool

    @property
    def unclamped(self) -> float:
        return self.leading_term + self.first_order_term


class PenaltyTerms(NamedTuple):
    overhead_loss: float
    estimation_loss: float

    @property
    def total(self) -> float:
        return self.overhead_loss + self.estimation_loss


@dataclass(frozen=True)
class DerivativeOracles:
    """Analytic derivatives at f_D = 0 of the estimation quantities.

    Unboosted values hold alpha fixed.  Boosted values use alpha = 2 f_D with rho_d
    fixed, so rho_p grows as f_D shrinks.  The snr_eff coefficients are those of
    SNR_eff = rho_d*SNR + linear*f_D + quadratic*f_D^2.
    """

    mmse_d1: float
    mmse_d2: float
    boosted_mmse_d1: float
    boosted_mmse_d2: float
    snr_eff_linear: float
    snr_eff_quadratic: float


def _check(snr: Union[float, SnrLinear], doppler: float) -> float:
    snr = float(snr)
    if not snr > 0:
        raise DomainError(f"SNR must be positive, got {snr}")
    if not 0.0 < doppler < 0.5:
        raise DomainError(f"normalized Doppler must lie in (0, 1/2), got {doppler}")
    return snr


def clamp(z: float, interval: ClampInterval) -> float:
    if interval.lo > interval.hi:
        raise DomainError(f"empty clamp interval [{interval.lo}, {interval.hi}]")
    return min(max(z, interval.lo), interval.hi)


def overhead_expansion(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    doppler: float,
    family: CapacityFamily = SISO_CAPACITY,
) -> ExpansionResult:
    """Optimal unboosted pilot overhead to first order in f_D, clamped to [2 f_D, 1]."""
    snr = _check(snr, doppler)
    c, c1, c2 = family.value(snr), family.d1(snr), family.d2(snr)
    leading = math.sqrt((1.0 + snr) * c1 / c * 2.0 * doppler)
    first = -((1.0 + snr) * c2 / c1 + 2.0 + inverse_shape_integral(shape) / (2.0 * snr)) * doppler
    interval = ClampInterval(2.0 * doppler, 1.0)
    value = clamp(leading + first, interval)
    return ExpansionResult(value, leading, first, interval, value != leading + first)


def se_expansion_no_boost(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    doppler: float,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    """Optimized unboosted spectral efficiency to order sqrt(f_D).

    When the unclamped overhead expansion falls to 2 f_D or below the pilots sit at
    alpha_min and the efficiency is (1 - 2 f_D) C((SNR - 1)/2), defined for SNR > 1 only.
    """
    snr = _check(snr, doppler)
    expansion = overhead_expansion(shape, snr, doppler, family)
    if expansion.unclamped > 2.0 * doppler:
        c, c1 = family.value(snr), family.d1(snr)
        return c - math.sqrt(8.0 * doppler * (1.0 + snr) * c * c1)
    if snr <= 1.0:
        raise OutOfRegimeError(
            f"clamped efficiency expansion needs SNR > 1 (got {snr:.6g}) at f_D={doppler:.6g}"
        )
    return (1.0 - 2.0 * doppler) * family.value((snr - 1.0) / 2.0)


def penalty_decomposition(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    alpha: float,
    doppler: float,
    family: CapacityFamily = SISO_CAPACITY,
) -> PenaltyTerms:
    """Loss from spending symbols on pilots plus loss from imperfect estimation."""
    snr = _check(snr, doppler)
    if not 2.0 * doppler <= alpha <= 1.0:
        raise DomainError(f"pilot overhead must lie in [2 f_D, 1] = [{2 * doppler:.6g}, 1], got {alpha}")
    return PenaltyTerms(
        overhead_loss=alpha * family.value(snr),
        estimation_loss=(1.0 + snr) * family.d1(snr) * 2.0 * doppler / alpha,
    )


def power_allocation_expansion(snr: Union[float, SnrLinear], doppler: float) -> PowerAllocation:
    """Leading-order optimal (rho_p, rho_d) with pilots at alpha_min = 2 f_D."""
    snr = _check(snr, doppler)
    rho_p = math.sqrt((1.0 + 1.0 / snr) / (2.0 * doppler))
    rho_d = 1.0 - math.sqrt((1.0 + 1.0 / snr) * 2.0 * doppler)
    if rho_d <= 0:
        raise OutOfRegimeError(
            f"power allocation expansion leaves no data power at SNR={snr:.6g}, f_D={doppler:.6g}"
        )
    return PowerAllocation(rho_p, rho_d)


def se_expansion_boost(
    snr: Union[float, SnrLinear],
    doppler: float,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    snr = _check(snr, doppler)
    return family.value(snr) - math.sqrt(8.0 * doppler * snr * (1.0 + snr)) * family.d1(snr)


def boosting_gain(
    snr: Union[float, SnrLinear],
    doppler: float,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    """se_expansion_boost minus the unclamped se_expansion_no_boost; zero as SNR -> 0."""
    snr = _check(snr, doppler)
    c, c1 = family.value(snr), family.d1(snr)
    return math.sqrt(8.0 * doppler * (1.0 + snr) * c1) * (math.sqrt(c) - math.sqrt(snr * c1))


def pilot_power_fraction(
    snr: Union[float, SnrLinear],
    doppler: float,
    boost: bool,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    """Share of the total transmit power spent on pilots at the optimum, alpha * rho_p."""
    snr = _check(snr, doppler)
    if boost:
        return math.sqrt((1.0 + 1.0 / snr) * 2.0 * doppler)
    return math.sqrt((1.0 + snr) * family.d1(snr) / family.value(snr) * 2.0 * doppler)


def power_fraction_ratio(snr: Union[float, SnrLinear], family: CapacityFamily = SISO_CAPACITY) -> float:
    """Boosted over unboosted pilot power fraction; above 1 and increasing in SNR."""
    snr = float(SnrLinear(float(snr)))
    return math.sqrt(family.value(snr) / (snr * family.d1(snr)))


def mimo_pilot_power_fraction(snr: Union[float, SnrLinear], doppler: float, n_t: int) -> float:
    if n_t < 1:
        raise DomainError(f"need at least one transmit antenna, got {n_t}")
    return pilot_power_fraction(snr, n_t * doppler, boost=True)


def appendix_derivative_oracles(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    alpha: float,
    rho_d: float,
) -> DerivativeOracles:
    snr = float(SnrLinear(float(snr)))
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"pilot overhead must lie in (0, 1], got {alpha}")
    if not 0.0 < rho_d < 1.0:
        raise DomainError(f"boosted derivatives need 0 < rho_d < 1, got {rho_d}")
    inverse = inverse_shape_integral(shape)
    gain = alpha * snr
    gap = 1.0 - rho_d
    scale = rho_d * (1.0 + rho_d * snr)
    return DerivativeOracles(
        mmse_d1=2.0 / gain,
        mmse_d2=-2.0 * inverse / gain ** 2,
        boosted_mmse_d1=2.0 / (snr * gap),
        boosted_mmse_d2=-2.0 / (snr * gap ** 2) * (4.0 * rho_d + inverse / snr),
        snr_eff_linear=-2.0 * scale / gap,
        snr_eff_quadratic=scale / gap ** 2 * (8.0 * rho_d + inverse / snr),
    )


def snr_eff_series(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    rho_d: float,
    doppler: float,
) -> float:
    """Boosted SNR_eff at alpha = 2 f_D, truncated after the f_D^2 term."""
    snr = _check(snr, doppler)
    oracles = appendix_derivative_oracles(shape, snr, 2.0 * doppler, rho_d)
    return rho_d * snr + oracles.snr_eff_linear * doppler + oracles.snr_eff_quadratic * doppler ** 2


def se_series(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    alpha: float,
    doppler: float,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    """Unboosted spectral efficiency at fixed alpha, to second order in f_D."""
    snr = _check(snr, doppler)
    c, c1, c2 = family.value(snr), family.d1(snr), family.d2(snr)
    inverse = inverse_shape_integral(shape)
    ratio = doppler / alpha
    bracket = (
        c / (1.0 + snr)
        - 2.0 * c1 * ratio
        + (2.0 * (1.0 + snr) * c2 + c1 * (inverse / snr + 4.0)) * ratio ** 2
    )
    return (1.0 - alpha) * (1.0 + snr) * bracket


def mimo_overhead_expansion(
    shape: SpectralShape,
    snr: Union[float, SnrLinear],
    doppler: float,
    n_t: int,
    n_r: int,
) -> ExpansionResult:
    """Overhead expansion with the MIMO capacity and Doppler n_T f_D, clamped to [2 n_T f_D, 1]."""
    cfg = AntennaConfig(n_t, n_r)
    return overhead_expansion(shape, snr, n_t * doppler, capacity_family(cfg))
