"""
Normalized Doppler spectral shapes S~(xi), bandlimited to |xi| <= 1 and of unit power.

The physical spectrum of a process with normalized Doppler f_D is
S(nu) = S~(nu / f_D) / f_D.  Every formula downstream only needs integrals of the
form  integral over [-1, 1] of g(S~(xi)) dxi,  so each shape exposes a quadrature
rule (`nodes`) that returns the shape values at its nodes together with weights.

Shapes:
- ClarkeJakes: 1 / (pi sqrt(1 - xi^2)), integrated after xi = sin(theta) so the
  inverse-square-root endpoint singularities disappear
- Rectangular: 1/2 on [-1, 1], handled in closed form
- Tabulated: piecewise linear through user samples, rescaled to unit power
"""

import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Tuple, Union

import numpy as np

from core.errors import DivergenceError, DomainError, ShapeError

SPEED_OF_LIGHT = 299792458.0

CLARKE_JAKES_NODES = 256  # Gauss-Legendre nodes in theta
SEGMENT_NODES = 16  # Gauss-Legendre nodes per tabulated segment
POWER_NODES = 64
RESCALE_WARNING = 1e-3
GRID_TOLERANCE = 1e-12

ArrayLike = Union[float, np.ndarray]


@lru_cache(maxsize=None)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


class SpectralShape(ABC):
    """Base class of the normalized Doppler spectral shapes."""

    kind = "abstract"

    @abstractmethod
    def density(self, xi: ArrayLike) -> ArrayLike:
        ...

    @abstractmethod
    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """(S~ at the quadrature nodes, weights) for integrals over [-1, 1]."""

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral over [-1, 1] of fn(S~(xi))."""
        values, weights = self.nodes()
        return float(np.dot(weights, fn(values)))

    def inverse_integral(self) -> float:
        """Integral over [-1, 1] of 1 / S~(xi)."""
        return self.integrate(np.reciprocal)

    def estimation_error(self, c: float) -> float:
        """c * integral of S~ / (c + S~), i.e. 1 - integral of S~^2 / (c + S~)."""
        if c == 0:
            return 0.0
        return c * self.integrate(lambda s: s / (c + s))

    @abstractmethod
    def power_between(self, lo: float, hi: float) -> float:
        ...


@dataclass(frozen=True)
class ClarkeJakes(SpectralShape):
    kind = "clarke-jakes"

    def density(self, xi: ArrayLike) -> ArrayLike:
        xi = np.asarray(xi, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            inside = 1.0 / (math.pi * np.sqrt(1.0 - xi * xi))
        out = np.where(np.abs(xi) < 1.0, inside, np.where(np.abs(xi) == 1.0, np.inf, 0.0))
        return float(out) if out.ndim == 0 else out

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        return _clarke_jakes_nodes()

    def power_between(self, lo: float, hi: float) -> float:
        lo, hi = max(lo, -1.0), min(hi, 1.0)
        if hi <= lo:
            return 0.0
        # xi = sin(theta): S~(xi) dxi becomes a bounded integrand in theta
        a, b = math.asin(lo), math.asin(hi)
        t, w = _legendre(POWER_NODES)
        theta = 0.5 * (b - a) * t + 0.5 * (b + a)
        integrand = self.density(np.sin(theta)) * np.cos(theta)
        return float(0.5 * (b - a) * np.dot(w, integrand))


@lru_cache(maxsize=None)
def _clarke_jakes_nodes() -> Tuple[np.ndarray, np.ndarray]:
    t, w = _legendre(CLARKE_JAKES_NODES)
    theta = 0.5 * math.pi * t
    cos_theta = np.cos(theta)
    values = 1.0 / (math.pi * cos_theta)
    weights = 0.5 * math.pi * w * cos_theta
    values.setflags(write=False)
    weights.setflags(write=False)
    return values, weights


@dataclass(frozen=True)
class Rectangular(SpectralShape):
    kind = "rectangular"

    def density(self, xi: ArrayLike) -> ArrayLike:
        xi = np.asarray(xi, dtype=float)
        out = np.where(np.abs(xi) <= 1.0, 0.5, 0.0)
        return float(out) if out.ndim == 0 else out

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([0.5]), np.array([2.0])

    def inverse_integral(self) -> float:
        return 4.0

    def estimation_error(self, c: float) -> float:
        return c / (c + 0.5)

    def power_between(self, lo: float, hi: float) -> float:
        lo, hi = max(lo, -1.0), min(hi, 1.0)
        return 0.5 * (hi - lo) if hi > lo else 0.0


@dataclass(frozen=True, eq=False)
class Tabulated(SpectralShape):
    """Piecewise-linear shape through (xi_i, S~_i) samples spanning [-1, 1].

    Build it with `Tabulated.from_samples`, which validates the grid and rescales
    the samples to unit power.
    """

    grid: np.ndarray
    values: np.ndarray
    raw_power: float = 1.0
    source: str = field(default="samples", compare=False)

    kind = "tabulated"

    @classmethod
    def from_samples(cls, grid, values, source: str = "samples") -> "Tabulated":
        grid = np.array(grid, dtype=float)
        values = np.array(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ShapeError(f"{source}: need two equally long columns with at least 2 samples")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise ShapeError(f"{source}: non-finite sample")
        if np.any(np.diff(grid) <= 0):
            raise ShapeError(f"{source}: xi grid must be strictly increasing")
        if abs(grid[0] + 1.0) > GRID_TOLERANCE or abs(grid[-1] - 1.0) > GRID_TOLERANCE:
            raise ShapeError(f"{source}: xi grid must run from -1 to +1, got [{grid[0]}, {grid[-1]}]")
        if np.any(values < 0):
            raise ShapeError(f"{source}: spectral shape cannot be negative")
        if np.any(values[1:-1] <= 0):
            bad = grid[1:-1][values[1:-1] <= 0]
            raise ShapeError(f"{source}: shape vanishes inside (-1, 1) at xi = {bad.tolist()}")
        grid[0], grid[-1] = -1.0, 1.0

        raw = float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(grid)))
        if raw <= 0:
            raise ShapeError(f"{source}: spectral shape has zero power")
        if abs(raw - 1.0) > RESCALE_WARNING:
            warnings.warn(f"{source}: tabulated spectrum integrates to {raw:.6g}, rescaled to unit power")
        values = values / raw
        grid.setflags(write=False)
        values.setflags(write=False)
        return cls(grid=grid, values=values, raw_power=raw, source=source)

    def density(self, xi: ArrayLike) -> ArrayLike:
        out = np.interp(np.asarray(xi, dtype=float), self.grid, self.values, left=0.0, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        t, w = _legendre(SEGMENT_NODES)
        x0, x1 = self.grid[:-1, None], self.grid[1:, None]
        s0, s1 = self.values[:-1, None], self.values[1:, None]
        half = 0.5 * (x1 - x0)
        frac = 0.5 * (t[None, :] + 1.0)
        values = s0 + (s1 - s0) * frac
        weights = half * w[None, :]
        return values.ravel(), weights.ravel()

    def inverse_integral(self) -> float:
        total = 0.0
        for x0, x1, s0, s1 in zip(self.grid[:-1], self.grid[1:], self.values[:-1], self.values[1:]):
            if s0 == 0 or s1 == 0:
                where = x0 if s0 == 0 else x1
                raise DivergenceError(
                    f"{self.source}: integral of 1/S~ diverges, shape is zero at xi = {where}"
                )
            # exact for a linear piece: (x1 - x0) * ln(s1/s0) / (s1 - s0)
            r = (s1 - s0) / s0
            factor = 1.0 - 0.5 * r if abs(r) < 1e-12 else math.log1p(r) / r
            total += (x1 - x0) * factor / s0
        return total

    def estimation_error(self, c: float) -> float:
        """Exact per segment: S~/(c + S~) integrates to a logarithm on a linear piece."""
        if c == 0:
            return 0.0
        x0, x1 = self.grid[:-1], self.grid[1:]
        s0, s1 = self.values[:-1], self.values[1:]
        # integral of s/(c+s) over the piece = dx * (1 - c/(c+s0) * ln(1+r)/r), r = (s1-s0)/(c+s0)
        r = (s1 - s0) / (c + s0)
        small = np.abs(r) < 1e-6
        safe = np.where(small, 1.0, r)
        log_ratio = np.where(small, 1.0 - r / 2.0 + r * r / 3.0, np.log1p(safe) / safe)
        pieces = (x1 - x0) * (1.0 - c / (c + s0) * log_ratio)
        return float(c * np.sum(pieces))

    def power_between(self, lo: float, hi: float) -> float:
        lo, hi = max(lo, -1.0), min(hi, 1.0)
        if hi <= lo:
            return 0.0
        inner = self.grid[(self.grid > lo) & (self.grid < hi)]
        points = np.concatenate(([lo], inner, [hi]))
        vals = np.interp(points, self.grid, self.values)
        return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(points)))


def eval_shape(shape: SpectralShape, xi: float) -> float:
    return float(shape.density(xi))


def inverse_shape_integral(shape: SpectralShape) -> float:
    """Integral over [-1, 1] of dxi / S~(xi): pi^2/2 for Clarke-Jakes, 4 for rectangular."""
    value = shape.inverse_integral()
    if not math.isfinite(value):
        raise DivergenceError(f"integral of 1/S~ is not finite for {shape.kind} shape")
    return value


def load_tabulated(path: Union[str, Path]) -> Tabulated:
    """Read a tabulated spectrum: one 'xi value' pair per line, '#' starts a comment."""
    path = Path(path)
    if not path.exists():
        raise ShapeError(f"spectrum file not found: {path}")
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except ValueError as e:
        raise ShapeError(f"spectrum file is malformed: {path} ({e})") from e
    if data.shape[1] != 2:
        raise ShapeError(f"spectrum file must have exactly two columns: {path}")
    return Tabulated.from_samples(data[:, 0], data[:, 1], source=str(path))


def shape_from_selector(selector: str) -> SpectralShape:
    """'clarke-jakes', 'rectangular' or 'file:<path>'."""
    if selector == "clarke-jakes":
        return ClarkeJakes()
    if selector == "rectangular":
        return Rectangular()
    if selector.startswith("file:"):
        return load_tabulated(selector[len("file:"):])
    raise ShapeError(f"unknown spectral shape '{selector}' (use clarke-jakes, rectangular or file:<path>)")


@dataclass(frozen=True)
class DopplerSpec:
    """Normalized Doppler f_D (cycles/symbol) together with the spectral shape."""

    doppler: float
    shape: SpectralShape

    def __post_init__(self):
        if not (0.0 < self.doppler < 0.5):
            raise DomainError(f"normalized Doppler must lie in (0, 1/2), got {self.doppler}")

    @property
    def alpha_min(self) -> float:
        return 2.0 * self.doppler

    def scaled(self, factor: float) -> "DopplerSpec":
        return DopplerSpec(self.doppler * factor, self.shape)


def scaled_spectrum(spec: DopplerSpec, nu: float) -> float:
    """S(nu) = S~(nu / f_D) / f_D."""
    return eval_shape(spec.shape, nu / spec.doppler) / spec.doppler


def doppler_from_physical(velocity: float, carrier_freq: float, symbol_rate: float) -> float:
    """f_D = f_m * T with f_m = v / lambda."""
    for name, value in (("velocity", velocity), ("carrier_freq", carrier_freq), ("symbol_rate", symbol_rate)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    doppler = velocity * carrier_freq / SPEED_OF_LIGHT / symbol_rate
    if doppler >= 0.5:
        raise DomainError(f"normalized Doppler {doppler:.6g} is not below 1/2; raise the symbol rate")
    return doppler
