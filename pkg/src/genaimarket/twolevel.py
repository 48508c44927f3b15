"""Closed forms for the symmetric two-level generative model.

p is uniform on [0, 1]; g takes the high value 2 - g_low on the left half and
g_low on the right half, so the demand/supply ratio has exactly two atoms.
With matching elasticity 1/2 everything of interest is analytic, which makes
this module the precision oracle for the grid pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densities import (
    DensityField,
    Grid,
    MarketParams,
    RatioDistribution,
    build_grid,
    density_from_values,
)
from .equilibrium import InteriorQuantities

__all__ = [
    "TwoLevelConfig",
    "twolevel_densities",
    "twolevel_ratio_distribution",
    "twolevel_rbar",
    "twolevel_quantities",
    "twolevel_v0",
    "twolevel_gstar",
    "twolevel_wmin",
    "twolevel_profit",
]


@dataclass(frozen=True)
class TwoLevelConfig:
    """g_low is the low density level; the high level is 2 - g_low."""

    g_low: float
    params: MarketParams = field(default=None)  # type: ignore[assignment]
    gamma: float = 0.85

    def __post_init__(self):
        if not 0 <= self.g_low <= 1:
            raise ValueError(f"need 0 <= g_low <= 1, got {self.g_low}")
        if self.params is None:
            # the closed forms assume alpha = 1/2 and default c = 1 - gamma
            object.__setattr__(
                self, "params", MarketParams(alpha=0.5, gamma=self.gamma, cost=1 - self.gamma)
            )
        if self.params.alpha != 0.5:
            raise ValueError("two-level closed forms require alpha = 1/2 exactly")
        object.__setattr__(self, "gamma", self.params.gamma)

    @property
    def g_high(self) -> float:
        return 2.0 - self.g_low

    @property
    def v_window(self) -> tuple[float, float]:
        """Open interval of interior-regime thresholds."""
        one_mg = 1 - self.params.gamma
        return one_mg, one_mg / np.sqrt(self.g_low) if self.g_low > 0 else np.inf


def twolevel_densities(cfg: TwoLevelConfig, n_cells: int = 2) -> tuple[DensityField, DensityField]:
    """Uniform p and the two-level g on [0, 1]; n_cells must be even so the
    level boundary falls on a cell edge."""
    if n_cells % 2:
        raise ValueError("n_cells must be even")
    grid = build_grid(0.0, 1.0, n_cells)
    p = density_from_values(grid, np.ones(n_cells), floor=1e-300)
    g_vals = np.where(grid.centers < 0.5, cfg.g_high, cfg.g_low)
    floor = min(1e-300, cfg.g_low) if cfg.g_low > 0 else 1e-300
    g = density_from_values(grid, np.maximum(g_vals, floor), floor=floor)
    return p, g


def twolevel_ratio_distribution(cfg: TwoLevelConfig) -> RatioDistribution:
    """Exact two-atom ratio distribution (only defined for g_low > 0)."""
    if cfg.g_low <= 0:
        raise ValueError("ratio distribution needs g_low > 0")
    return RatioDistribution(
        r_values=np.array([1.0 / cfg.g_high, 1.0 / cfg.g_low]),
        p_masses=np.array([0.5, 0.5]),
        g_masses=np.array([cfg.g_high / 2, cfg.g_low / 2]),
    )


def _check_window(cfg: TwoLevelConfig, v_bar: float) -> None:
    lo, hi = cfg.v_window
    if not lo < v_bar < hi:
        raise ValueError(f"v_bar={v_bar} outside the interior window ({lo}, {hi})")


def twolevel_rbar(cfg: TwoLevelConfig, v_bar: float) -> float:
    _check_window(cfg, v_bar)
    one_mg = 1 - cfg.params.gamma
    r_bar = (2 * v_bar**2 / one_mg**2 - 1) / cfg.g_high
    assert 1 / cfg.g_high < r_bar < (1 / cfg.g_low if cfg.g_low > 0 else np.inf)
    return r_bar


def twolevel_quantities(cfg: TwoLevelConfig, v_bar: float) -> InteriorQuantities:
    _check_window(cfg, v_bar)
    one_mg = 1 - cfg.params.gamma
    c = cfg.params.cost
    ratio = one_mg / v_bar
    M_g = np.sqrt(cfg.g_high) / 2
    M_p = 0.5 * ratio**2
    V_tilde = one_mg / np.sqrt(2 - ratio**2) + c * cfg.g_low / cfg.g_high
    return InteriorQuantities(
        r_bar=twolevel_rbar(cfg, v_bar),
        M_g=float(M_g),
        M_p=float(M_p),
        V_tilde=float(V_tilde),
        w_implied=float(V_tilde + c - v_bar),
    )


def twolevel_v0(cfg: TwoLevelConfig, tol: float = 1e-12) -> float:
    """Zero-compensation indifference level: v = (1-γ)/sqrt(2-((1-γ)/v)²) + 2c/ḡ.

    The right side decreases in v while the left side increases, so bisection
    over the interior window is safe whenever g_low is below the pure-AI
    boundary level.
    """
    if cfg.g_low >= twolevel_gstar(cfg.params):
        raise ValueError("no interior indifference level: model is well-trained (g_low >= g*)")
    one_mg = 1 - cfg.params.gamma
    c = cfg.params.cost
    lo, hi = cfg.v_window
    lo *= 1 + 1e-12
    hi *= 1 - 1e-12

    def f(v: float) -> float:
        return v - (one_mg / np.sqrt(2 - (one_mg / v) ** 2) + 2 * c / cfg.g_high)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def twolevel_gstar(params: MarketParams, tol: float = 1e-10) -> float:
    """Boundary g_low above which the market is pure-AI without compensation:
    root of (1-γ)/sqrt(g) = (1-γ)(sqrt(g)+sqrt(2-g))/2 + c."""
    one_mg = 1 - params.gamma
    c = params.cost

    def f(g: float) -> float:
        return one_mg / np.sqrt(g) - one_mg * (np.sqrt(g) + np.sqrt(2 - g)) / 2 - c

    lo, hi = 1e-12, 1.0
    if f(lo) <= 0 or f(hi) >= 0:
        raise ValueError("no sign change for g* on (0, 1)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def twolevel_wmin(cfg: TwoLevelConfig) -> float:
    """Minimum bonus for a scheme to take effect in the pure-AI regime."""
    one_mg = 1 - cfg.params.gamma
    if cfg.g_low <= 0:
        raise ValueError("w_min needs g_low > 0")
    return float(
        one_mg / np.sqrt(cfg.g_high)
        - one_mg / np.sqrt(cfg.g_low)
        + 2 * cfg.params.cost / cfg.g_high
    )


def twolevel_profit(cfg: TwoLevelConfig, v_bar: float) -> tuple[float, float]:
    _check_window(cfg, v_bar)
    gam = cfg.params.gamma
    one_mg = 1 - gam
    c = cfg.params.cost
    ratio = one_mg / v_bar
    root = np.sqrt(2 - ratio**2)
    R = (gam / 2) * ratio + (gam / 2) * root
    Pi = 0.5 * ratio + 0.5 * root - one_mg / root - (c / cfg.g_high) * ratio**2
    return float(R), float(Pi)
