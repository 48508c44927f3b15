"""Piecewise-constant densities on a uniform 1-D grid.

All integrals downstream reduce to exact sums over grid cells, so the
two-level example is represented without discretization error.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "DensityField",
    "RatioDistribution",
    "MarketParams",
    "RevenueThresholdScheme",
    "XBasedScheme",
    "build_grid",
    "density_from_values",
    "ratio_distribution",
]

#: default minimum density height; densities must be bounded away from zero
DEFAULT_FLOOR = 1e-9

#: significant digits used when deciding two cells share the same ratio value
_MERGE_SIGDIGITS = 12


@dataclass(frozen=True)
class Grid:
    """Uniform partition of the preference interval [lo, hi]."""

    lo: float
    hi: float
    n_cells: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if not self.hi > self.lo:
            raise ValueError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError(f"need n_cells >= 2, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.lo + np.arange(self.n_cells + 1) * self.dx

    def bin_index(self, x: np.ndarray) -> np.ndarray:
        """Cell index of each point, boundary points clamped inward."""
        idx = np.floor((np.asarray(x) - self.lo) / self.dx).astype(int)
        return np.clip(idx, 0, self.n_cells - 1)

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n_cells": self.n_cells}

    @classmethod
    def from_json(cls, obj: dict) -> "Grid":
        return cls(float(obj["lo"]), float(obj["hi"]), int(obj["n_cells"]))


@dataclass(frozen=True)
class DensityField:
    """Nonnegative cell heights over a Grid, bounded below by `floor`.

    `normalized` fields integrate to one; un-normalized fields (such as the
    pre-GenAI content density) carry the flag set to False.
    """

    grid: Grid
    values: np.ndarray
    floor: float = DEFAULT_FLOOR
    normalized: bool = True

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_cells,):
            raise ValueError("values length must equal n_cells")
        if not np.all(np.isfinite(vals)):
            raise ValueError("density values must be finite")
        if self.floor <= 0:
            raise ValueError("floor must be positive")
        if np.any(vals < self.floor * (1 - 1e-12)):
            raise ValueError("density values must not fall below the floor")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.normalized and abs(self.integral() - 1.0) > 1e-12:
            raise ValueError("normalized density must integrate to 1")

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.dx)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "value"])
            for x, v in zip(self.grid.centers, self.values):
                writer.writerow([repr(float(x)), repr(float(v))])

    @classmethod
    def from_csv(cls, path, floor: float = DEFAULT_FLOOR) -> "DensityField":
        xs, vals = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["x", "value"]:
                raise ValueError(f"expected header 'x,value', got {header!r}")
            for row in reader:
                if not row:
                    continue
                xs.append(float(row[0]))
                vals.append(float(row[1]))
        if len(xs) < 2:
            raise ValueError("need at least two cells")
        dx = xs[1] - xs[0]
        grid = Grid(xs[0] - dx / 2, xs[-1] + dx / 2, len(xs))
        if not np.allclose(grid.centers, xs, rtol=0, atol=1e-9 * max(1.0, abs(xs[-1]))):
            raise ValueError("cell centers are not a uniform grid")
        return density_from_values(grid, vals, floor=floor)

    def to_json(self) -> dict:
        return {"grid": self.grid.to_json(), "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict, floor: float = DEFAULT_FLOOR) -> "DensityField":
        return density_from_values(Grid.from_json(obj["grid"]), obj["values"], floor=floor)


@dataclass(frozen=True)
class RatioDistribution:
    """Distribution of the demand/supply ratio r(x) = p(x)/g(x) under p.

    Cells sharing the same ratio are merged, so atoms (such as the two-level
    example's) are represented exactly. For each entry the p-mass equals
    r times the g-mass.
    """

    r_values: np.ndarray
    p_masses: np.ndarray
    g_masses: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r_values, dtype=float)
        p = np.asarray(self.p_masses, dtype=float)
        g = np.asarray(self.g_masses, dtype=float)
        if not (len(r) == len(p) == len(g)) or len(r) == 0:
            raise ValueError("entry arrays must be nonempty and equal length")
        if np.any(np.diff(r) <= 0):
            raise ValueError("r_values must be strictly increasing")
        if np.any(r <= 0):
            raise ValueError("ratio values must be positive")
        if abs(p.sum() - 1.0) > 1e-12 or abs(g.sum() - 1.0) > 1e-12:
            raise ValueError("p and g masses must each sum to 1")
        if np.any(np.abs(p - r * g) > 1e-9 * np.maximum(1.0, p)):
            raise ValueError("p-mass must equal r * g-mass per entry")
        for name, arr in (("r_values", r), ("p_masses", p), ("g_masses", g)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def r_min(self) -> float:
        return float(self.r_values[0])

    @property
    def r_max(self) -> float:
        return float(self.r_values[-1])

    def expectation_r_alpha_under_g(self, alpha: float) -> float:
        """E_{x ~ g} r(x)^alpha."""
        return float(np.sum(self.g_masses * self.r_values**alpha))

    def threshold_lhs(self, t: float) -> float:
        """Sum of p-mass * max(t / r, 1): the monotone side of the
        ratio-threshold equation."""
        return float(np.sum(self.p_masses * np.maximum(t / self.r_values, 1.0)))


@dataclass(frozen=True)
class MarketParams:
    """Matching elasticity, platform commission, and manual production cost."""

    alpha: float
    gamma: float
    cost: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"need 0 < alpha < 1, got {self.alpha}")
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"need 0 <= gamma <= 1, got {self.gamma}")
        if not self.cost > 0:
            raise ValueError(f"need cost > 0, got {self.cost}")


@dataclass(frozen=True)
class RevenueThresholdScheme:
    """Flat bonus w paid to any content whose raw revenue reaches v_bar."""

    v_bar: float
    w: float

    def __post_init__(self):
        if self.v_bar < 0 or self.w < 0:
            raise ValueError("v_bar and w must be nonnegative")


@dataclass(frozen=True)
class XBasedScheme:
    """Compensation depending only on content location, not on the realized
    content distribution."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_cells,):
            raise ValueError("values length must equal n_cells")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("compensation values must be finite and nonnegative")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def build_grid(lo: float, hi: float, n_cells: int) -> Grid:
    return Grid(float(lo), float(hi), int(n_cells))


def density_from_values(grid: Grid, raw, floor: float = DEFAULT_FLOOR) -> DensityField:
    """Clamp heights below at `floor`, then rescale to integrate to one."""
    vals = np.asarray(raw, dtype=float)
    if vals.shape != (grid.n_cells,):
        raise ValueError("raw length must equal n_cells")
    if not np.all(np.isfinite(vals)):
        raise ValueError("raw density values must be finite")
    if floor <= 0:
        raise ValueError("floor must be positive")
    if np.all(vals <= 0):
        raise ValueError("density input must not be identically zero")
    vals = np.maximum(vals, floor)
    vals = vals / (vals.sum() * grid.dx)
    # rescaling can push a clamped cell back under the floor; re-clamp and
    # renormalize until stable (converges in a couple of rounds)
    for _ in range(100):
        under = vals < floor
        if not under.any():
            break
        vals = np.maximum(vals, floor)
        vals = vals / (vals.sum() * grid.dx)
    return DensityField(grid, vals, floor=min(floor, float(vals.min())))


def _round_sig(x: np.ndarray, digits: int) -> np.ndarray:
    out = np.empty_like(x)
    for i, v in enumerate(x):
        out[i] = float(f"{v:.{digits}g}")
    return out


def ratio_distribution(p: DensityField, g: DensityField) -> RatioDistribution:
    """Per-cell ratios p_i/g_i aggregated into a sorted, merged distribution."""
    if p.grid != g.grid:
        raise ValueError("p and g must share the same grid")
    if not (p.normalized and g.normalized):
        raise ValueError("p and g must be normalized")
    dx = p.grid.dx
    r = p.values / g.values
    keys = _round_sig(r, _MERGE_SIGDIGITS)
    order = np.argsort(keys, kind="stable")
    keys_sorted = keys[order]
    p_mass = p.values[order] * dx
    g_mass = g.values[order] * dx
    boundaries = np.flatnonzero(np.diff(keys_sorted) != 0) + 1
    groups = np.concatenate([[0], boundaries, [len(keys_sorted)]])
    r_out, p_out, g_out = [], [], []
    for a, b in zip(groups[:-1], groups[1:]):
        pm = float(p_mass[a:b].sum())
        gm = float(g_mass[a:b].sum())
        r_out.append(pm / gm)
        p_out.append(pm)
        g_out.append(gm)
    return RatioDistribution(np.array(r_out), np.array(p_out), np.array(g_out))
