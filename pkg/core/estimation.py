"""
Channel estimation error and effective SNR of pilot-assisted transmission.

Pilots with power ratio rho_p occupy a fraction alpha of the symbols, data symbols
get rho_d.  Total average power is preserved when rho_p*alpha + rho_d*(1-alpha) = 1.

Block fading keeps the channel constant for n_b symbols and is estimated from one
pilot per block.  Continuous fading is sampled by the pilots every 1/alpha symbols;
the sampled process stays unaliased as long as alpha >= 2 f_D.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Union

from core.errors import AliasingError, DomainError
from core.special_fn import SnrLinear
from core.spectra import ClarkeJakes, DopplerSpec, Rectangular

POWER_TOLERANCE = 1e-12
ALPHA_SLACK = 1e-12
CLOSED_FORM_PATCH = 1e-4  # |x - 1| below which the series of the closed form is used


@dataclass(frozen=True)
class PowerAllocation:
    """Pilot and data power ratios (rho_p, rho_d)."""

    rho_p: float = 1.0
    rho_d: float = 1.0

    def __post_init__(self):
        if self.rho_p < 0 or self.rho_d < 0:
            raise DomainError(f"power ratios must be non-negative, got rho_p={self.rho_p}, rho_d={self.rho_d}")

    @classmethod
    def unboosted(cls) -> "PowerAllocation":
        return cls(1.0, 1.0)

    @classmethod
    def for_alpha(cls, alpha: float, rho_d: float) -> "PowerAllocation":
        """Pilot ratio that keeps total power at unity for this overhead and data ratio."""
        if not 0 < alpha <= 1:
            raise DomainError(f"pilot overhead must lie in (0, 1], got {alpha}")
        rho_p = (1.0 - rho_d * (1.0 - alpha)) / alpha
        if rho_p < 0:
            raise DomainError(f"rho_d={rho_d} leaves no power for the pilots at alpha={alpha}")
        return cls(rho_p, rho_d)

    def check(self, alpha: float) -> "PowerAllocation":
        total = self.rho_p * alpha + self.rho_d * (1.0 - alpha)
        if abs(total - 1.0) > POWER_TOLERANCE:
            raise DomainError(
                f"power allocation (rho_p={self.rho_p}, rho_d={self.rho_d}) does not preserve "
                f"average power at alpha={alpha}: {total!r}"
            )
        return self


class FadingModel(ABC):
    """Common interface of the block and continuous fading models."""

    @property
    @abstractmethod
    def alpha_min(self) -> float:
        ...

    @abstractmethod
    def estimation_error(self, gain: float) -> float:
        """MMSE as a function of the pilot energy alpha * rho_p * SNR."""


@dataclass(frozen=True)
class BlockFading(FadingModel):
    block_length: int

    def __post_init__(self):
        if int(self.block_length) != self.block_length or self.block_length < 1:
            raise DomainError(f"block length must be a positive integer, got {self.block_length}")

    @property
    def alpha_min(self) -> float:
        return 1.0 / self.block_length

    def estimation_error(self, gain: float) -> float:
        return 1.0 / (1.0 + gain * self.block_length)

    def equivalent_rectangular(self) -> "ContinuousFading":
        """Continuous model with rectangular spectrum and f_D = 1/(2 n_b), same MMSE."""
        return ContinuousFading(DopplerSpec(0.5 / self.block_length, Rectangular()))


@dataclass(frozen=True)
class ContinuousFading(FadingModel):
    spec: DopplerSpec

    @property
    def alpha_min(self) -> float:
        return self.spec.alpha_min

    def estimation_error(self, gain: float) -> float:
        if gain == 0:
            return 1.0
        return self.spec.shape.estimation_error(self.spec.doppler / gain)


def _check_alpha(model: FadingModel, alpha: float) -> None:
    if alpha > 1.0:
        raise DomainError(f"pilot overhead cannot exceed 1, got {alpha}")
    if alpha < model.alpha_min * (1.0 - ALPHA_SLACK):
        raise AliasingError(
            f"pilot overhead {alpha:.6g} is below alpha_min={model.alpha_min:.6g}: "
            "the decimated channel would not keep an unaliased spectrum"
        )


def mmse(model: FadingModel, snr: Union[float, SnrLinear], alpha: float, rho_p: float = 1.0) -> float:
    """Mean squared error of the channel estimate, E|H~|^2, in [0, 1]."""
    snr = float(snr)
    if not snr > 0:
        raise DomainError(f"SNR must be positive, got {snr}")
    if rho_p < 0:
        raise DomainError(f"pilot power ratio must be non-negative, got {rho_p}")
    _check_alpha(model, alpha)
    value = model.estimation_error(alpha * rho_p * snr)
    return min(max(value, 0.0), 1.0)


def _closed_form_factor(x: float) -> float:
    # arctanh(sqrt(1-x^2))/sqrt(1-x^2) below 1, arctan(sqrt(x^2-1))/sqrt(x^2-1) above
    if abs(x - 1.0) < CLOSED_FORM_PATCH:
        t = 1.0 - x * x
        return 1.0 + t / 3.0 + t * t / 5.0 + t ** 3 / 7.0
    if x < 1.0:
        u = math.sqrt(1.0 - x * x)
        # arctanh(u) = ln((1 + u) / x), finite even when u rounds to 1
        return math.log((1.0 + u) / x) / u
    v = math.sqrt(x * x - 1.0)
    return math.atan(v) / v


def mmse_clarke_jakes_closed(snr: Union[float, SnrLinear], alpha: float, doppler: float, rho_p: float = 1.0) -> float:
    """Closed-form MMSE for the Clarke-Jakes spectrum.

    With x = alpha*rho_p*SNR / (pi f_D), MMSE = 1 - (2x/pi) * h(x), h being the
    arctanh form for x < 1 and its arctan continuation for x > 1.
    """
    model = ContinuousFading(DopplerSpec(doppler, ClarkeJakes()))
    snr = float(snr)
    if not snr > 0:
        raise DomainError(f"SNR must be positive, got {snr}")
    if rho_p < 0:
        raise DomainError(f"pilot power ratio must be non-negative, got {rho_p}")
    _check_alpha(model, alpha)
    x = alpha * rho_p * snr / (math.pi * doppler)
    if x == 0:
        return 1.0
    value = 1.0 - 2.0 * x / math.pi * _closed_form_factor(x)
    return min(max(value, 0.0), 1.0)


def snr_eff(snr: Union[float, SnrLinear], mmse_value: float, rho_d: float = 1.0) -> float:
    """SNR seen by a nearest-neighbour decoder that treats the estimate as the channel."""
    snr = float(snr)
    if not 0.0 <= mmse_value <= 1.0:
        raise DomainError(f"MMSE must lie in [0, 1], got {mmse_value}")
    if not rho_d > 0:
        raise DomainError(f"data power ratio must be positive, got {rho_d}")
    return snr * (1.0 - mmse_value) / (1.0 / rho_d + snr * mmse_value)

