"""
Pilot-based spectral efficiency and its exact numerical optimization.

Ibar(SNR, alpha) = (1 - alpha) * C(SNR_eff)

Unboosted: rho_p = rho_d = 1 and alpha is searched over [alpha_min, 1] with a
log-spaced scan followed by golden-section refinement around the best scan point.

Boosted: alpha is pinned to alpha_min and the data power ratio rho_d is chosen to
maximize SNR_eff, the pilot ratio following from the power constraint.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np

from core.errors import ConvergenceError
from core.estimation import FadingModel, PowerAllocation, mmse, snr_eff
from core.special_fn import SISO_CAPACITY, CapacityFamily, SnrLinear

GOLDEN_RATIO = (math.sqrt(5.0) - 1.0) / 2.0

SCAN_POINTS = 256
ALPHA_TOLERANCE = 1e-9
RHO_TOLERANCE = 1e-10  # relative to the rho_d search range
MAX_ITERATIONS = 200
RHO_D_FLOOR = 1e-9
SCAN_NOISE = 1e-12


@dataclass(frozen=True)
class OverheadSolution:
    alpha_star: float
    rho_p_star: float
    rho_d_star: float
    se_star: float
    iterations: int
    bracket: Tuple[float, float]
    converged: bool
    local_maxima: int = 1

    @property
    def allocation(self) -> PowerAllocation:
        return PowerAllocation(self.rho_p_star, self.rho_d_star)


class BoostRestriction(NamedTuple):
    grid_best: float
    restricted: float
    grid_alpha: float
    grid_rho_d: float


def pilot_se(
    model: FadingModel,
    snr: Union[float, SnrLinear],
    alpha: float,
    alloc: Optional[PowerAllocation] = None,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    """Spectral efficiency (bits/s/Hz) achieved with pilot overhead alpha."""
    snr = float(snr)
    alloc = (alloc or PowerAllocation.unboosted()).check(alpha)
    m = mmse(model, snr, alpha, alloc.rho_p)
    if alpha >= 1.0:
        return 0.0
    effective = snr_eff(snr, m, alloc.rho_d)
    if effective <= 0:
        return 0.0
    return (1.0 - alpha) * family.value(effective)


def scan_pilot_se(
    model: FadingModel,
    snr: Union[float, SnrLinear],
    alphas,
    family: CapacityFamily = SISO_CAPACITY,
) -> np.ndarray:
    """Unboosted pilot_se over a grid of overheads."""
    return np.array([pilot_se(model, snr, float(a), family=family) for a in alphas])


def count_local_maxima(values, noise: float = SCAN_NOISE) -> int:
    """Number of local maxima of a sampled curve, ignoring steps below `noise`.

    Boundary maxima count: a curve that starts by falling has one at its left end,
    one that ends rising has one at its right end.
    """
    steps = np.diff(np.asarray(values, dtype=float))
    signs = np.sign(steps[np.abs(steps) > noise])
    if signs.size == 0:
        return 1
    count = int(np.sum((signs[:-1] > 0) & (signs[1:] < 0)))
    if signs[0] < 0:
        count += 1
    if signs[-1] > 0:
        count += 1
    return count


def _golden_max(fn: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int):
    # returns (x, f(x), iterations, converged); endpoints are compared at the end
    f_lo, f_hi = fn(lo), fn(hi)
    a, b = lo, hi
    x1 = b - GOLDEN_RATIO * (b - a)
    x2 = a + GOLDEN_RATIO * (b - a)
    f1, f2 = fn(x1), fn(x2)
    iteration = 0
    while abs(b - a) > tol and iteration < max_iter:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN_RATIO * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN_RATIO * (b - a)
            f2 = fn(x2)
        iteration += 1

    x, fx = (x1, f1) if f1 >= f2 else (x2, f2)
    if f_lo > fx:
        x, fx = lo, f_lo
    if f_hi > fx:
        x, fx = hi, f_hi
    return x, fx, iteration, abs(b - a) <= tol


def _bracket(grid: np.ndarray, k: int) -> Tuple[float, float]:
    return float(grid[max(k - 1, 0)]), float(grid[min(k + 1, grid.size - 1)])


def _optimize_unboosted(model, snr, family, scan_points, tol, max_iter) -> OverheadSolution:
    alpha_min = model.alpha_min
    alphas = np.geomspace(alpha_min, 1.0, scan_points)
    alphas[0], alphas[-1] = alpha_min, 1.0
    values = scan_pilot_se(model, snr, alphas, family)
    k = int(np.argmax(values))
    lo, hi = _bracket(alphas, k)

    if lo == hi:
        alpha, se, iterations, converged = lo, float(values[k]), 0, True
    else:
        alpha, se, iterations, converged = _golden_max(
            lambda a: pilot_se(model, snr, a, family=family), lo, hi, tol, max_iter
        )
    if values[k] > se:
        alpha, se = float(alphas[k]), float(values[k])

    solution = OverheadSolution(
        alpha_star=alpha,
        rho_p_star=1.0,
        rho_d_star=1.0,
        se_star=se,
        iterations=iterations,
        bracket=(lo, hi),
        converged=converged,
        local_maxima=count_local_maxima(values),
    )
    if not converged:
        raise ConvergenceError(
            f"overhead search did not reach |d alpha| <= {tol} in {max_iter} iterations", best=solution
        )
    return solution


def _pilot_ratio(alpha: float, rho_d: float) -> float:
    return max((1.0 - rho_d * (1.0 - alpha)) / alpha, 0.0)


def _optimize_boosted(model, snr, family, scan_points, max_iter) -> OverheadSolution:
    alpha = model.alpha_min
    if alpha >= 1.0:
        return OverheadSolution(1.0, 1.0, 1.0, 0.0, 0, (1.0, 1.0), True)

    rho_max = 1.0 / (1.0 - alpha)

    def objective(rho_d: float) -> float:
        return snr_eff(snr, mmse(model, snr, alpha, _pilot_ratio(alpha, rho_d)), rho_d)

    rhos = np.linspace(RHO_D_FLOOR, rho_max, scan_points)
    values = np.array([objective(r) for r in rhos])
    k = int(np.argmax(values))
    lo, hi = _bracket(rhos, k)
    tol = RHO_TOLERANCE * rho_max
    rho_d, _, iterations, converged = _golden_max(objective, lo, hi, tol, max_iter)

    alloc = PowerAllocation.for_alpha(alpha, rho_d)
    solution = OverheadSolution(
        alpha_star=alpha,
        rho_p_star=alloc.rho_p,
        rho_d_star=alloc.rho_d,
        se_star=pilot_se(model, snr, alpha, alloc, family),
        iterations=iterations,
        bracket=(lo, hi),
        converged=converged,
        local_maxima=count_local_maxima(values),
    )
    if not converged:
        raise ConvergenceError(
            f"pilot power search did not converge in {max_iter} iterations", best=solution
        )
    return solution


def optimize_overhead(
    model: FadingModel,
    snr: Union[float, SnrLinear],
    boost: bool = False,
    family: CapacityFamily = SISO_CAPACITY,
    scan_points: int = SCAN_POINTS,
    tol: float = ALPHA_TOLERANCE,
    max_iter: int = MAX_ITERATIONS,
) -> OverheadSolution:
    """Maximize the pilot-based spectral efficiency.

    Raises ConvergenceError (with `.best` set) when the refinement hits max_iter.
    """
    snr = float(SnrLinear(float(snr)))
    if boost:
        return _optimize_boosted(model, snr, family, scan_points, max_iter)
    return _optimize_unboosted(model, snr, family, scan_points, tol, max_iter)


def penalty(
    model: FadingModel,
    snr: Union[float, SnrLinear],
    boost: bool = False,
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    """C(SNR) minus the optimized pilot-based spectral efficiency."""
    solution = optimize_overhead(model, snr, boost, family)
    return max(family.value(float(snr)) - solution.se_star, 0.0)


def boosting_gain_numeric(
    model: FadingModel,
    snr: Union[float, SnrLinear],
    family: CapacityFamily = SISO_CAPACITY,
) -> float:
    boosted = optimize_overhead(model, snr, True, family)
    plain = optimize_overhead(model, snr, False, family)
    return boosted.se_star - plain.se_star


def verify_boost_restriction(
    model: FadingModel,
    snr: Union[float, SnrLinear],
    n_alpha: int = 64,
    n_rho: int = 256,
    family: CapacityFamily = SISO_CAPACITY,
) -> BoostRestriction:
    """Joint alpha x rho_d grid search compared with the alpha = alpha_min optimum."""
    snr = float(snr)
    restricted = optimize_overhead(model, snr, True, family).se_star
    best = (-math.inf, math.nan, math.nan)
    for alpha in np.geomspace(model.alpha_min, 1.0, n_alpha + 1)[:-1]:
        alpha = max(float(alpha), model.alpha_min)
        for rho_d in np.linspace(RHO_D_FLOOR, 1.0 / (1.0 - alpha), n_rho):
            m = mmse(model, snr, alpha, _pilot_ratio(alpha, rho_d))
            effective = snr_eff(snr, m, rho_d)
            se = (1.0 - alpha) * family.value(effective) if effective > 0 else 0.0
            if se > best[0]:
                best = (se, alpha, float(rho_d))
    return BoostRestriction(best[0], restricted, best[1], best[2])
