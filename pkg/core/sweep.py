"""
Parameter sweeps producing the figure tables.

A SweepRequest names a quantity, an x-axis grid, fixed parameters shared by every
curve and per-curve overrides.  Grid points are evaluated concurrently; rows are
emitted in (curve, grid index) order whatever the completion order.
"""

import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from core.efficiency import optimize_overhead, pilot_se
from core.errors import AliasingError, DomainError, OutOfRegimeError
from core.estimation import BlockFading, ContinuousFading, FadingModel
from core.expansions import (
    mimo_overhead_expansion,
    overhead_expansion,
    power_allocation_expansion,
    se_expansion_boost,
    se_expansion_no_boost,
    se_series,
)
from core.mimo_capacity import AntennaConfig, optimize_equivalent_siso, optimize_mimo_overhead
from core.output import Row
from core.special_fn import capacity_csi, db_to_linear
from core.spectra import DopplerSpec, shape_from_selector

MAX_WORKERS = 4
PROGRESS_EVERY = 10

QUANTITIES = (
    "se_vs_alpha",
    "alpha_star_vs_doppler",
    "alpha_star_vs_snr",
    "se_star_vs_doppler",
    "se_star_vs_snr",
    "rho_p_vs_snr",
    "se_boost_vs_doppler",
    "se_boost_vs_snr",
    "alpha_star_vs_antennas",
)
METHODS = ("numeric", "expansion", "equivalent", "perfect_csi")
SCALES = ("linear", "log", "db")
FIXED_KEYS = ("snr_db", "doppler", "block_length", "n_t", "n_r", "shape")

# x-axis of each quantity
AXIS = {
    "se_vs_alpha": "alpha",
    "alpha_star_vs_doppler": "doppler",
    "alpha_star_vs_snr": "snr_db",
    "se_star_vs_doppler": "doppler",
    "se_star_vs_snr": "snr_db",
    "rho_p_vs_snr": "snr_db",
    "se_boost_vs_doppler": "doppler",
    "se_boost_vs_snr": "snr_db",
    "alpha_star_vs_antennas": "antennas",
}


@dataclass(frozen=True)
class GridSpec:
    """Axis grid; 'db' spaces points linearly on an axis measured in dB."""

    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise DomainError(f"grid.points must be at least 2, got {self.points}")
        if self.scale not in SCALES:
            raise DomainError(f"grid.scale must be one of {SCALES}, got '{self.scale}'")
        if not self.hi > self.lo:
            raise DomainError(f"grid.hi must exceed grid.lo, got [{self.lo}, {self.hi}]")
        if self.scale == "log" and self.lo <= 0:
            raise DomainError(f"grid.lo must be positive on a log axis, got {self.lo}")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepRequest:
    quantity: str
    grid: GridSpec
    fixed: Mapping[str, Any] = field(default_factory=dict)
    shape: str = "clarke-jakes"
    methods: Tuple[str, ...] = ("numeric",)
    curves: Tuple[Mapping[str, Any], ...] = ({},)

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise DomainError(f"quantity must be one of {QUANTITIES}, got '{self.quantity}'")
        for method in self.methods:
            if method not in METHODS:
                raise DomainError(f"methods: unknown method '{method}'")
        if not self.methods:
            raise DomainError("methods: at least one method is required")
        for params in (self.fixed, *self.curves):
            for key in params:
                if key not in FIXED_KEYS:
                    raise DomainError(f"fixed: unknown parameter '{key}'")
        if self.quantity == "alpha_star_vs_antennas" and self.grid.scale == "log":
            raise DomainError("grid.scale: antenna counts need a linear grid")

    def curve_label(self, index: int) -> str:
        overrides = self.curves[index]
        if not overrides:
            return "default"
        return ",".join(f"{k}={overrides[k]}" for k in sorted(overrides))

    def curve_params(self, index: int) -> Dict[str, Any]:
        params = {"shape": self.shape, **self.fixed, **self.curves[index]}
        return params

    def x_values(self) -> np.ndarray:
        values = self.grid.values()
        if self.quantity == "alpha_star_vs_antennas":
            counts = np.round(values)
            if np.any(np.abs(values - counts) > 1e-9) or np.any(counts < 1):
                raise DomainError("grid: antenna counts must be positive integers")
            return counts
        return values

    def as_dict(self) -> Dict[str, Any]:
        return {
            "quantity": self.quantity,
            "grid": {"lo": self.grid.lo, "hi": self.grid.hi, "points": self.grid.points, "scale": self.grid.scale},
            "fixed": dict(self.fixed),
            "shape": self.shape,
            "methods": list(self.methods),
            "curves": [dict(c) for c in self.curves],
        }


def _require(params: Mapping[str, Any], key: str) -> Any:
    if key not in params:
        raise DomainError(f"fixed: parameter '{key}' is required for this quantity")
    return params[key]


def _point_params(quantity: str, params: Mapping[str, Any], x: float) -> Dict[str, Any]:
    point = dict(params)
    axis = AXIS[quantity]
    if axis == "antennas":
        point["n_t"] = point["n_r"] = int(x)
    elif axis != "alpha":
        point[axis] = float(x)
    return point


def _model(point: Mapping[str, Any], shape) -> Tuple[FadingModel, DopplerSpec]:
    if point.get("block_length") is not None:
        model = BlockFading(int(point["block_length"]))
        return model, model.equivalent_rectangular().spec
    spec = DopplerSpec(float(_require(point, "doppler")), shape)
    return ContinuousFading(spec), spec


def _expansion(fn: Callable[[], Tuple[float, Optional[bool]]]) -> Tuple[float, Optional[bool]]:
    try:
        return fn()
    except OutOfRegimeError:
        return math.nan, None


def evaluate_point(quantity: str, method: str, point: Mapping[str, Any], x: float, shape) -> Tuple[float, Optional[bool]]:
    """(y, clamped) for one grid point and method."""
    if AXIS[quantity] == "doppler" and point.get("block_length") is not None:
        raise DomainError(f"fixed: block_length fixes the Doppler, it cannot be combined with {quantity}")
    snr = db_to_linear(float(_require(point, "snr_db")))
    if method == "perfect_csi":
        return capacity_csi(snr), None

    if quantity == "alpha_star_vs_antennas":
        spec = DopplerSpec(float(_require(point, "doppler")), shape)
        cfg = AntennaConfig(int(point["n_t"]), int(point["n_r"]))
        if method == "numeric":
            return optimize_mimo_overhead(cfg, spec, snr).alpha_star, None
        if method == "equivalent":
            return optimize_equivalent_siso(cfg, spec, snr).alpha_star, None
        result = mimo_overhead_expansion(shape, snr, spec.doppler, cfg.n_t, cfg.n_r)
        return result.value, result.clamped

    model, spec = _model(point, shape)
    f_d = spec.doppler
    if method == "equivalent":
        raise DomainError("methods: 'equivalent' only applies to alpha_star_vs_antennas")

    if quantity == "se_vs_alpha":
        if float(x) < model.alpha_min * (1.0 - 1e-12):
            raise AliasingError(f"grid: alpha={float(x):.6g} lies below alpha_min={model.alpha_min:.6g}")
        if method == "numeric":
            return pilot_se(model, snr, float(x)), None
        return _expansion(lambda: (se_series(spec.shape, snr, float(x), f_d), None))

    if quantity in ("alpha_star_vs_doppler", "alpha_star_vs_snr"):
        if method == "numeric":
            return optimize_overhead(model, snr).alpha_star, None
        result = overhead_expansion(spec.shape, snr, f_d)
        return result.value, result.clamped

    if quantity in ("se_star_vs_doppler", "se_star_vs_snr"):
        if method == "numeric":
            return optimize_overhead(model, snr).se_star, None
        return _expansion(lambda: (se_expansion_no_boost(spec.shape, snr, f_d), None))

    if quantity == "rho_p_vs_snr":
        if method == "numeric":
            return optimize_overhead(model, snr, boost=True).rho_p_star, None
        return _expansion(lambda: (power_allocation_expansion(snr, f_d).rho_p, None))

    # se_boost_vs_doppler, se_boost_vs_snr
    if method == "numeric":
        return optimize_overhead(model, snr, boost=True).se_star, None
    return _expansion(lambda: (se_expansion_boost(snr, f_d), None))


def _evaluate_grid_point(req: SweepRequest, curve: int, x: float, shape) -> List[Row]:
    point = _point_params(req.quantity, req.curve_params(curve), x)
    label = req.curve_label(curve)
    rows = []
    for method in req.methods:
        y, clamped = evaluate_point(req.quantity, method, point, x, shape)
        rows.append(Row(label, float(x), method, float(y), clamped))
    return rows


def run_sweep(req: SweepRequest, max_workers: int = MAX_WORKERS, verbose: bool = False) -> List[Row]:
    """Evaluate every (curve, x) point; rows come back in curve then grid order."""
    xs = req.x_values()
    shapes = {}
    for i in range(len(req.curves)):
        selector = req.curve_params(i)["shape"]
        if selector not in shapes:
            shapes[selector] = shape_from_selector(selector)

    tasks = [(ci, xi) for ci in range(len(req.curves)) for xi in range(xs.size)]
    results: Dict[Tuple[int, int], List[Row]] = {}
    start = time.time()
    if verbose:
        print(f"🚀 Sweeping {req.quantity}: {len(tasks)} points (using {max_workers} threads)...", file=sys.stderr)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {}
        for ci, xi in tasks:
            shape = shapes[req.curve_params(ci)["shape"]]
            future = executor.submit(_evaluate_grid_point, req, ci, float(xs[xi]), shape)
            futures[future] = (ci, xi)

        completed = 0
        for future in as_completed(futures):
            results[futures[future]] = future.result()
            completed += 1
            if verbose and (completed % PROGRESS_EVERY == 0 or completed == len(tasks)):
                elapsed = time.time() - start
                print(
                    f"  Progress: {completed}/{len(tasks)} ({completed / len(tasks) * 100:.1f}%) - {elapsed:.1f}s",
                    file=sys.stderr,
                )

    return [row for key in tasks for row in results[key]]
