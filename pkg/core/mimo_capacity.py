"""
Ergodic perfect-CSI capacity of an IID Rayleigh MIMO channel.

C(SNR) = E[log2 det(I + (SNR/n_T) H H^H)]

Evaluated as an integral of log2(1 + SNR*lambda/n_T) against the unordered
eigenvalue density of the complex Wishart matrix (Laguerre-polynomial form), with
m = min(n_T, n_R), n = max(n_T, n_R):

    sum_{k<m} k!/(k+n-m)! [L_k^(n-m)(lambda)]^2 lambda^(n-m) e^-lambda

The derivatives in SNR differentiate the integrand analytically.  A seeded
Monte Carlo estimate over random channel matrices serves as an independent check.

Pilots for n_T antennas are sent as orthogonal sequences, so channel estimation
behaves like the single-antenna case with Doppler n_T * f_D.
"""

import math
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_genlaguerre, gammaln

from core.efficiency import OverheadSolution, optimize_overhead
from core.errors import DomainError
from core.estimation import ContinuousFading, mmse
from core.special_fn import LOG2E, SISO_CAPACITY, CapacityFamily, _check_snr
from core.spectra import DopplerSpec

QUAD_LIMIT = 200
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-11
MC_BATCH = 100_000


@dataclass(frozen=True)
class AntennaConfig:
    n_t: int
    n_r: int

    def __post_init__(self):
        for name, value in (("n_t", self.n_t), ("n_r", self.n_r)):
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value}")

    @property
    def streams(self) -> int:
        return min(self.n_t, self.n_r)

    @property
    def label(self) -> str:
        return f"{self.n_t}x{self.n_r}"


def _eigenvalue_weight(cfg: AntennaConfig, lam: float) -> float:
    # m times the unordered eigenvalue density of H H^H
    m = cfg.streams
    d = max(cfg.n_t, cfg.n_r) - m
    total = 0.0
    for k in range(m):
        coeff = math.exp(gammaln(k + 1) - gammaln(k + d + 1))
        total += coeff * eval_genlaguerre(k, d, lam) ** 2
    return total * lam ** d * math.exp(-lam)


def _integrate(cfg: AntennaConfig, fn) -> float:
    upper = 4.0 * (cfg.n_t + cfg.n_r) + 60.0
    value, _ = quad(
        lambda lam: fn(lam) * _eigenvalue_weight(cfg, lam),
        0.0,
        upper,
        limit=QUAD_LIMIT,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
    )
    return value


@lru_cache(maxsize=4096)
def _capacity_terms(n_t: int, n_r: int, snr: float, order: int) -> float:
    cfg = AntennaConfig(n_t, n_r)
    if order == 0:
        return _integrate(cfg, lambda lam: LOG2E * math.log1p(snr * lam / n_t))
    if order == 1:
        return _integrate(cfg, lambda lam: LOG2E * (lam / n_t) / (1.0 + snr * lam / n_t))
    return _integrate(cfg, lambda lam: -LOG2E * (lam / n_t) ** 2 / (1.0 + snr * lam / n_t) ** 2)


def capacity_mimo(cfg: AntennaConfig, snr: float) -> float:
    return _capacity_terms(cfg.n_t, cfg.n_r, _check_snr(snr), 0)


def capacity_mimo_d1(cfg: AntennaConfig, snr: float) -> float:
    return _capacity_terms(cfg.n_t, cfg.n_r, _check_snr(snr), 1)


def capacity_mimo_d2(cfg: AntennaConfig, snr: float) -> float:
    return _capacity_terms(cfg.n_t, cfg.n_r, _check_snr(snr), 2)


def capacity_mimo_monte_carlo(
    cfg: AntennaConfig, snr: float, samples: int = 1_000_000, seed: int = 20240101
) -> Tuple[float, float]:
    """(mean, standard error) of log2 det(I + SNR/n_T H H^H) over random channels."""
    snr = _check_snr(snr)
    if samples < 2:
        raise DomainError(f"need at least 2 Monte Carlo samples, got {samples}")
    rng = np.random.default_rng(seed)
    values = np.empty(samples)
    done = 0
    while done < samples:
        batch = min(MC_BATCH, samples - done)
        h = (rng.standard_normal((batch, cfg.n_r, cfg.n_t))
             + 1j * rng.standard_normal((batch, cfg.n_r, cfg.n_t))) / math.sqrt(2.0)
        hh = np.conj(np.swapaxes(h, 1, 2))
        gram = h @ hh if cfg.n_r <= cfg.n_t else hh @ h
        lam = np.linalg.eigvalsh(gram)
        values[done:done + batch] = np.sum(np.log2(1.0 + snr * np.clip(lam, 0.0, None) / cfg.n_t), axis=1)
        done += batch
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))


def capacity_family(cfg: AntennaConfig) -> CapacityFamily:
    """Capacity with its derivatives; the scalar closed form for a 1x1 link."""
    if cfg.n_t == 1 and cfg.n_r == 1:
        return SISO_CAPACITY
    return CapacityFamily(
        partial(capacity_mimo, cfg),
        partial(capacity_mimo_d1, cfg),
        partial(capacity_mimo_d2, cfg),
        cfg.label,
    )


def equivalent_model(cfg: AntennaConfig, spec: DopplerSpec) -> ContinuousFading:
    """Single-antenna fading model with the Doppler multiplied by n_T."""
    return ContinuousFading(spec.scaled(cfg.n_t))


def mimo_mmse(cfg: AntennaConfig, spec: DopplerSpec, snr: float, alpha: float, rho_p: float = 1.0) -> float:
    """Per-entry channel estimation error; needs alpha >= 2 n_T f_D."""
    return mmse(equivalent_model(cfg, spec), snr, alpha, rho_p)


def optimize_mimo_overhead(
    cfg: AntennaConfig, spec: DopplerSpec, snr: float, boost: bool = False
) -> OverheadSolution:
    return optimize_overhead(equivalent_model(cfg, spec), snr, boost, capacity_family(cfg))


def optimize_equivalent_siso(
    cfg: AntennaConfig, spec: DopplerSpec, snr: float, boost: bool = False
) -> OverheadSolution:
    """Scalar-capacity optimization at Doppler n_T f_D, the single-antenna stand-in."""
    return optimize_overhead(equivalent_model(cfg, spec), snr, boost)
