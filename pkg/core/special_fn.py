"""
Exponential integrals and the perfect-CSI ergodic capacity of a Rayleigh channel.

C(SNR) = E[log2(1 + SNR |H|^2)] = log2(e) * e^{1/SNR} * E1(1/SNR)

The first two SNR-derivatives are expressed through C itself, so every quantity
here reduces to one evaluation of the scaled exponential integral e^z E1(z).
All functions take and return plain floats (linear SNR, never dB).
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from scipy.special import exp1, expn

from core.errors import ConvergenceError, DomainError

LOG2E = 1.0 / math.log(2.0)

# Continued fraction settings (modified Lentz)
CF_MAX_ITERATIONS = 500
CF_EPSILON = 1e-15
CF_TINY = 1e-300


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise DomainError(f"cannot express non-positive ratio {value} in dB")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SnrLinear:
    """Signal-to-noise ratio P/N0 as a linear power ratio."""

    value: float

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise DomainError(f"SNR must be a positive finite ratio, got {self.value}")

    @classmethod
    def from_db(cls, db: float) -> "SnrLinear":
        return cls(db_to_linear(db))

    @property
    def db(self) -> float:
        return linear_to_db(self.value)

    def __float__(self) -> float:
        return float(self.value)


def _check_snr(snr: float) -> float:
    snr = float(snr)
    if not (snr > 0 and math.isfinite(snr)):
        raise DomainError(f"SNR must be positive and finite, got {snr}")
    return snr


def exp_integral(q: int, zeta: float) -> float:
    """E_q(zeta) = integral over t in [1, inf) of t^-q e^(-zeta t)."""
    if int(q) != q or q < 1:
        raise DomainError(f"exponential integral order must be a positive integer, got {q}")
    if not zeta > 0:
        raise DomainError(f"exponential integral argument must be positive, got {zeta}")
    if q == 1:
        return float(exp1(zeta))
    return float(expn(int(q), zeta))


def _scaled_exp1_fraction(zeta: float) -> float:
    # e^z E1(z) from the continued fraction 1/(z+1- 1/(z+3- 4/(z+5- ...)))
    b = zeta + 1.0
    c = 1.0 / CF_TINY
    d = 1.0 / b
    h = d
    for i in range(1, CF_MAX_ITERATIONS + 1):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < CF_TINY:
            d = CF_TINY
        c = b + an / c
        if abs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < CF_EPSILON:
            return h
    raise ConvergenceError(f"continued fraction for E1({zeta}) did not converge")


def scaled_exp1(zeta: float) -> float:
    """e^zeta * E1(zeta) without overflow for large zeta.

    Below 1 the power series (through scipy's exp1) is used; from 1 upward the
    continued fraction gives the scaled value directly.
    """
    if not zeta > 0:
        raise DomainError(f"E1 argument must be positive, got {zeta}")
    if zeta < 1.0:
        return math.exp(zeta) * float(exp1(zeta))
    return _scaled_exp1_fraction(zeta)


def capacity_csi(snr: float) -> float:
    """Ergodic perfect-CSI capacity in bits/s/Hz."""
    snr = _check_snr(snr)
    return LOG2E * scaled_exp1(1.0 / snr)


def capacity_csi_d1(snr: float) -> float:
    """First SNR-derivative of capacity_csi."""
    snr = _check_snr(snr)
    return (LOG2E - capacity_csi(snr) / snr) / snr


def capacity_csi_d2(snr: float) -> float:
    """Second SNR-derivative of capacity_csi (always negative)."""
    snr = _check_snr(snr)
    c = capacity_csi(snr)
    c1 = (LOG2E - c / snr) / snr
    return -(LOG2E + c1 - 2.0 * c / snr) / (snr * snr)


class CapacityFamily(NamedTuple):
    """A perfect-CSI capacity function together with its SNR-derivatives."""

    value: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]
    label: str = "siso"


SISO_CAPACITY = CapacityFamily(capacity_csi, capacity_csi_d1, capacity_csi_d2, "siso")


def overhead_snr_factor(snr: float, family: CapacityFamily = SISO_CAPACITY) -> float:
    """(1 + SNR) * C'(SNR) / C(SNR), the SNR dependence of the optimal overhead.

    Very close to 1/ln(1 + SNR) for the scalar channel.
    """
    snr = _check_snr(snr)
    return (1.0 + snr) * family.d1(snr) / family.value(snr)
