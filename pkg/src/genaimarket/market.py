"""Revenue and profit functionals of the content market, plus the
pre-GenAI baseline with flat compensation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import DensityField, MarketParams, RevenueThresholdScheme

__all__ = [
    "CreatorStrategy",
    "creator_revenue",
    "compensated_revenue",
    "genai_expected_revenue",
    "content_distribution",
    "platform_revenue",
    "platform_profit",
    "pregenai_equilibrium",
    "pregenai_optimal",
    "ai_posterior",
]


@dataclass(frozen=True)
class CreatorStrategy:
    """Per-cell probabilities over the actions: create manually, use the
    generative model, or stay out."""

    grid: "object"
    beta_H: np.ndarray
    beta_AI: np.ndarray
    beta_O: np.ndarray

    def __post_init__(self):
        for arr in (self.beta_H, self.beta_AI, self.beta_O):
            a = np.asarray(arr, dtype=float)
            if np.any(a < -1e-12) or np.any(a > 1 + 1e-12):
                raise ValueError("strategy components must lie in [0, 1]")
        total = self.beta_H + self.beta_AI + self.beta_O
        if np.any(np.abs(total - 1.0) > 1e-12):
            raise ValueError("strategy components must sum to 1 per cell")


def creator_revenue(q: DensityField, p: DensityField, params: MarketParams) -> np.ndarray:
    """Per-content revenue share (1-gamma) * (p/q)^alpha."""
    if q.grid != p.grid:
        raise ValueError("p and q must share the same grid")
    if np.any(q.values <= 0):
        raise ValueError("content density must be strictly positive")
    return (1 - params.gamma) * (p.values / q.values) ** params.alpha


def compensated_revenue(V: np.ndarray, scheme: RevenueThresholdScheme) -> np.ndarray:
    """Add the bonus w wherever raw revenue reaches the threshold.

    The tie V == v_bar pays compensation (closed threshold)."""
    V = np.asarray(V, dtype=float)
    return V + scheme.w * (V >= scheme.v_bar)


def genai_expected_revenue(V_comp: np.ndarray, g: DensityField) -> float:
    """Expected compensated revenue of a content drawn from g."""
    return float(np.sum(np.asarray(V_comp) * g.values) * g.grid.dx)


def content_distribution(
    beta_AI: np.ndarray, p: DensityField, g: DensityField
) -> DensityField:
    """Content density induced by a GenAI-adoption profile: manual mass stays
    in place, GenAI mass is spread by g."""
    beta = np.asarray(beta_AI, dtype=float)
    if np.any(beta < -1e-12) or np.any(beta > 1 + 1e-12):
        raise ValueError("beta_AI must lie in [0, 1] per cell")
    beta = np.clip(beta, 0.0, 1.0)
    dx = p.grid.dx
    genai_mass = float(np.sum(beta * p.values) * dx)
    vals = (1 - beta) * p.values + g.values * genai_mass
    assert abs(float(vals.sum() * dx) - 1.0) <= 1e-12, "content density must stay normalized"
    floor = min(1e-300, float(vals.min()))
    return DensityField(p.grid, np.maximum(vals, floor), floor=floor, normalized=True)


def platform_revenue(q: DensityField, p: DensityField, params: MarketParams) -> float:
    """Engagement revenue per consumer: gamma * integral p^alpha q^(1-alpha)."""
    if q.grid != p.grid:
        raise ValueError("p and q must share the same grid")
    a = params.alpha
    return float(params.gamma * np.sum(p.values**a * q.values ** (1 - a)) * p.grid.dx)


def platform_profit(
    q: DensityField, p: DensityField, W_field: np.ndarray, params: MarketParams
) -> float:
    """Revenue minus total compensation paid on the content distribution."""
    W = np.asarray(W_field, dtype=float)
    if np.any(W < 0):
        raise ValueError("compensation field must be nonnegative")
    comp = float(np.sum(W * q.values) * q.grid.dx)
    return platform_revenue(q, p, params) - comp


def pregenai_equilibrium(
    params: MarketParams, W_const: float, p: DensityField
) -> tuple[CreatorStrategy, DensityField]:
    """Unique equilibrium without GenAI under a flat compensation W_const.

    Creators enter fully when the compensated margin covers the cost
    (W >= c - (1-gamma)); otherwise they mix to indifference."""
    if W_const < 0:
        raise ValueError("compensation must be nonnegative")
    gap = params.cost - W_const
    if 1 - params.gamma >= gap:
        beta_h = 1.0
    else:
        beta_h = ((1 - params.gamma) / gap) ** (1 / params.alpha)
    n = p.grid.n_cells
    beta_H = np.full(n, beta_h)
    strat = CreatorStrategy(p.grid, beta_H, np.zeros(n), 1.0 - beta_H)
    q_vals = beta_h * p.values
    q = DensityField(
        p.grid, np.maximum(q_vals, 1e-300), floor=1e-300, normalized=False
    )
    return strat, q


def pregenai_optimal(params: MarketParams) -> tuple[float, float]:
    """Profit-maximizing flat compensation and the profit it achieves.

    When the interior first-order optimum would push participation past
    full entry (c < 1 - alpha with gamma > alpha), the maximizer sits at
    the full-entry boundary W = c - (1-gamma) with profit 1 - c.
    """
    a, gam, c = params.alpha, params.gamma, params.cost
    if 1 - gam >= c:
        return 0.0, gam
    w_unconstrained = max(0.0, c * (gam - a) / (1 - a))
    if w_unconstrained <= c - (1 - gam) + 1e-15:
        m = min(gam, a)
        return w_unconstrained, m * ((1 - m) / c) ** (1 / a - 1)
    return c - (1 - gam), 1 - c


def ai_posterior(
    q: DensityField, g: DensityField, beta_AI: np.ndarray, p: DensityField
) -> np.ndarray:
    """Posterior probability that a content at each cell was generated by
    the model, given the adoption profile."""
    beta = np.clip(np.asarray(beta_AI, dtype=float), 0.0, 1.0)
    genai_mass = float(np.sum(beta * p.values) * p.grid.dx)
    post = g.values * genai_mass / q.values
    return np.clip(post, 0.0, 1.0)
