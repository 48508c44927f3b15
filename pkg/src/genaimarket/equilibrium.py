"""Mean-field equilibria under revenue-threshold compensation.

Threshold solving, equilibrium construction and classification (including
nonexistence), profit curves and threshold optimization, and the damped
fixed-point solver for location-based compensation schemes.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .densities import (
    DensityField,
    MarketParams,
    RatioDistribution,
    RevenueThresholdScheme,
    XBasedScheme,
)
from .market import platform_profit, platform_revenue

__all__ = [
    "Classification",
    "InteriorQuantities",
    "EquilibriumSolution",
    "OptimizeResult",
    "ResidualReport",
    "solve_rbar",
    "interior_quantities",
    "solve_v0",
    "build_equilibrium",
    "classify_scheme",
    "profit_at",
    "optimize_vstar",
    "discontinuity_gap",
    "solve_xbased",
    "xbased_equivalent",
    "verify_equilibrium",
]

_SNAP_RTOL = 1e-12


class Classification(str, enum.Enum):
    INTERIOR = "Interior"
    PURE_AI = "PureAI"
    NO_COMPENSATION_EQUIVALENT = "NoCompensationEquivalent"
    REDUCIBLE = "Reducible"
    NONEXISTENT = "Nonexistent"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class InteriorQuantities:
    """Threshold-level aggregates of an interior equilibrium."""

    r_bar: float
    M_g: float
    M_p: float
    V_tilde: float
    w_implied: float


@dataclass
class EquilibriumSolution:
    scheme: Optional[RevenueThresholdScheme]
    classification: Classification
    beta_AI: Optional[np.ndarray] = None
    q: Optional[DensityField] = None
    region_in: Optional[np.ndarray] = None  # True on indifferent cells
    quantities: Optional[InteriorQuantities] = None
    genai_mass: Optional[float] = None
    v_bar_effective: Optional[float] = None
    xbased: Optional[XBasedScheme] = None
    reduced_scheme: Optional[RevenueThresholdScheme] = None
    boundary_tie: bool = False
    assumed_large_w: bool = False
    residual: Optional[float] = None
    notes: str = ""

    def to_json(self) -> dict:
        out = {
            "classification": self.classification.value,
            "boundary_tie": self.boundary_tie,
            "assumed_large_w": self.assumed_large_w,
            "notes": self.notes,
        }
        if self.scheme is not None:
            out["scheme"] = {"v_bar": self.scheme.v_bar, "w": self.scheme.w}
        if self.reduced_scheme is not None:
            out["reduced_scheme"] = {
                "v_bar": self.reduced_scheme.v_bar,
                "w": self.reduced_scheme.w,
            }
        if self.beta_AI is not None:
            out["beta_AI"] = [float(b) for b in self.beta_AI]
        if self.q is not None:
            out["q"] = self.q.to_json()
        if self.region_in is not None:
            out["region"] = ["IN" if m else "AI" for m in self.region_in]
        if self.quantities is not None:
            qt = self.quantities
            out["quantities"] = {
                "r_bar": qt.r_bar,
                "M_g": qt.M_g,
                "M_p": qt.M_p,
                "V_tilde": qt.V_tilde,
                "w_implied": qt.w_implied,
            }
        if self.genai_mass is not None:
            out["genai_mass"] = self.genai_mass
        if self.v_bar_effective is not None:
            out["v_bar_effective"] = self.v_bar_effective
        if self.residual is not None:
            out["residual"] = self.residual
        return out

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)


def solve_rbar(rd: RatioDistribution, v_bar: float, params: MarketParams) -> float:
    """Ratio threshold splitting strict-GenAI cells from indifferent cells.

    The monotone equation sum p_mass * max(t/r, 1) = (v_bar/(1-gamma))^(1/alpha)
    is piecewise linear in t between atoms, so each segment is solved exactly.
    """
    one_mg = 1 - params.gamma
    if v_bar < one_mg * (1 - 1e-12):
        raise ValueError(f"need v_bar >= 1 - gamma = {one_mg}, got {v_bar}")
    target = (max(v_bar, one_mg) / one_mg) ** (1 / params.alpha)
    r = rd.r_values
    if target <= 1 + 1e-15:
        return rd.r_min
    g_below = np.concatenate([[0.0], np.cumsum(rd.g_masses)])[:-1]  # G(< r_i)
    p_from = np.cumsum(rd.p_masses[::-1])[::-1]  # P(>= r_i)
    kink = r * g_below + p_from  # LHS approached from below each atom
    idx = int(np.searchsorted(kink, target, side="left"))
    if idx >= len(r):
        root = target  # beyond the top atom the LHS is t itself
    else:
        if g_below[idx] == 0:
            root = r[idx]
        else:
            root = (target - p_from[idx]) / g_below[idx]
        # snap floating-point near-hits onto the atom value so boundary cells
        # land on the indifferent side deterministically
        if abs(root - r[idx]) <= _SNAP_RTOL * r[idx]:
            root = float(r[idx])
        if idx > 0 and abs(root - r[idx - 1]) <= _SNAP_RTOL * r[idx - 1]:
            root = float(r[idx - 1])
    assert abs(rd.threshold_lhs(root) - target) <= 1e-9 * max(1.0, target)
    return float(root)


def _split_index(rd: RatioDistribution, r_bar: float) -> int:
    """First entry index on the indifferent side (r >= r_bar)."""
    idx = int(np.searchsorted(rd.r_values, r_bar * (1 - _SNAP_RTOL), side="left"))
    return idx


def interior_quantities(
    rd: RatioDistribution,
    p: DensityField,
    g: DensityField,
    v_bar: float,
    params: MarketParams,
) -> InteriorQuantities:
    """Aggregates M_g, M_p, the equilibrium GenAI revenue, and the implied
    bonus at the given threshold."""
    one_mg = 1 - params.gamma
    if not v_bar > one_mg:
        raise ValueError("need v_bar > 1 - gamma")
    a = params.alpha
    r_bar = solve_rbar(rd, v_bar, params)
    idx = _split_index(rd, r_bar)
    if idx == 0:
        raise ValueError("strict-GenAI region is empty at this threshold")
    # per merged entry, integral of p^alpha g^(1-alpha) equals r^alpha * g_mass
    M_g = float(np.sum(rd.r_values[:idx] ** a * rd.g_masses[:idx]))
    kappa = (one_mg / v_bar) ** (1 / a)
    M_p = float(kappa * np.sum(rd.p_masses[idx:]))
    if M_p >= 1 - 1e-14:
        raise ValueError("indifferent-region content mass saturates (M_p >= 1)")
    # expected compensated GenAI revenue solves the self-consistency
    # V~ = int V g + w * G_in with w = V~ + c - v_bar
    g_in = float(np.sum(rd.g_masses[idx:]))
    if g_in >= 1 - 1e-14:
        raise ValueError("indifferent region carries all g-mass")
    v_raw = v_bar * (g_in + M_g / r_bar**a)
    V_tilde = (v_raw + (params.cost - v_bar) * g_in) / (1 - g_in)
    return InteriorQuantities(
        r_bar=r_bar, M_g=M_g, M_p=M_p, V_tilde=V_tilde, w_implied=V_tilde + params.cost - v_bar
    )


def _v_top(rd: RatioDistribution, params: MarketParams) -> float:
    return (1 - params.gamma) * rd.r_max**params.alpha


def _has_interior_window(rd: RatioDistribution, params: MarketParams) -> bool:
    """Whether some creator resists GenAI without compensation: the supremum
    manual revenue beats the expected GenAI revenue plus the cost."""
    one_mg = 1 - params.gamma
    return _v_top(rd, params) > one_mg * rd.expectation_r_alpha_under_g(params.alpha) + params.cost


def solve_v0(
    rd: RatioDistribution,
    p: DensityField,
    g: DensityField,
    params: MarketParams,
    tol: float = 1e-12,
) -> Optional[float]:
    """Indifference revenue level under zero compensation, or None when the
    model is well-trained enough that everyone strictly prefers GenAI."""
    if not _has_interior_window(rd, params):
        return None
    one_mg = 1 - params.gamma
    lo = one_mg * (1 + 1e-12)
    hi = _v_top(rd, params) * (1 - 1e-12)

    def f(v: float) -> float:
        qt = interior_quantities(rd, p, g, v, params)
        return v - (qt.V_tilde + params.cost)

    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:  # guard; guaranteed not to happen analytically
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def build_equilibrium(
    v_bar: float,
    p: DensityField,
    g: DensityField,
    rd: RatioDistribution,
    params: MarketParams,
    scheme: Optional[RevenueThresholdScheme] = None,
) -> EquilibriumSolution:
    """Interior equilibrium at an admissible threshold: strict-GenAI cells
    below the ratio threshold, indifferent cells at revenue exactly v_bar."""
    one_mg = 1 - params.gamma
    a = params.alpha
    if not v_bar > one_mg:
        raise ValueError(f"admissibility failed: v_bar={v_bar} must exceed 1-gamma={one_mg}")
    top = _v_top(rd, params)
    if not v_bar < top * (1 + 1e-12):
        raise ValueError(
            f"admissibility failed: v_bar={v_bar} must lie below (1-gamma)*sup r^alpha={top}"
        )
    qt = interior_quantities(rd, p, g, v_bar, params)
    if v_bar > qt.V_tilde + params.cost + 1e-9:
        raise ValueError(
            f"admissibility failed: v_bar={v_bar} exceeds the implied GenAI revenue "
            f"plus cost {qt.V_tilde + params.cost}"
        )
    r_cells = p.values / g.values
    in_mask = r_cells >= qt.r_bar * (1 - _SNAP_RTOL)
    kappa = (one_mg / v_bar) ** (1 / a)
    q_vals = np.where(in_mask, kappa * p.values, kappa * qt.r_bar * g.values)
    beta = np.where(in_mask, 1.0 - kappa * (1.0 - qt.r_bar / r_cells), 1.0)
    beta = np.clip(beta, 0.0, 1.0)
    dx = p.grid.dx
    genai_mass = float(np.sum(beta * p.values) * dx)
    q = DensityField(
        p.grid, q_vals, floor=min(1e-300, float(q_vals.min())), normalized=False
    )
    assert abs(q.integral() - 1.0) <= 1e-9, "interior content density must normalize"
    if scheme is None:
        scheme = RevenueThresholdScheme(v_bar, max(qt.w_implied, 0.0))
    return EquilibriumSolution(
        scheme=scheme,
        classification=Classification.INTERIOR,
        beta_AI=beta,
        q=q,
        region_in=in_mask,
        quantities=qt,
        genai_mass=genai_mass,
        v_bar_effective=v_bar,
    )


def _pure_ai_solution(
    scheme: Optional[RevenueThresholdScheme],
    p: DensityField,
    g: DensityField,
    boundary_tie: bool = False,
    notes: str = "",
) -> EquilibriumSolution:
    beta = np.ones(p.grid.n_cells)
    return EquilibriumSolution(
        scheme=scheme,
        classification=Classification.PURE_AI,
        beta_AI=beta,
        q=g,
        region_in=np.zeros(p.grid.n_cells, dtype=bool),
        genai_mass=1.0,
        boundary_tie=boundary_tie,
        notes=notes,
    )


def _genai_qualified_g_mass(
    rd: RatioDistribution, v_bar: float, v_eff: float, r_bar: float, alpha: float
) -> float:
    """g-mass of contents whose raw revenue reaches v_bar at the interior
    equilibrium with indifference level v_eff."""
    cut = r_bar * (v_bar / v_eff) ** (1 / alpha) if v_bar > 0 else 0.0
    return float(np.sum(rd.g_masses[rd.r_values >= cut * (1 - _SNAP_RTOL)]))


def classify_scheme(
    scheme: RevenueThresholdScheme,
    p: DensityField,
    g: DensityField,
    rd: RatioDistribution,
    params: MarketParams,
    tol: float = 1e-9,
    assume_large_w: bool = False,
) -> EquilibriumSolution:
    """Total classification of a revenue-threshold scheme.

    Returns an interior equilibrium when the bonus matches the implied one,
    the pure-AI outcome when the model is well-trained enough (or the bonus
    is too small to take effect), the zero-compensation equilibrium when the
    threshold is unreachable, a reduced equivalent scheme when the bonus is
    smaller than implied, and Nonexistent when the bonus is too large.
    """
    one_mg = 1 - params.gamma
    a = params.alpha
    v_bar, w = scheme.v_bar, scheme.w
    top = _v_top(rd, params)
    e_g = rd.expectation_r_alpha_under_g(a)
    well_trained = one_mg * e_g + params.cost >= top - tol

    if w <= tol:
        v0 = solve_v0(rd, p, g, params)
        if v0 is None:
            return _pure_ai_solution(scheme, p, g, notes="no compensation; well-trained model")
        if abs(v_bar - v0) <= max(tol, 1e-9 * v0):
            sol = build_equilibrium(v0, p, g, rd, params, scheme=scheme)
            return sol
        sol = build_equilibrium(v0, p, g, rd, params, scheme=scheme)
        if v_bar > v0:
            sol.classification = Classification.NO_COMPENSATION_EQUIVALENT
        else:
            sol.classification = Classification.REDUCIBLE
            sol.reduced_scheme = RevenueThresholdScheme(v0, 0.0)
        return sol

    # positive bonus
    if min(one_mg * e_g + params.cost, v_bar) >= top - tol:
        tie = (
            abs(one_mg * e_g + params.cost - top) <= tol or abs(v_bar - top) <= tol
        ) and v_bar + w > one_mg * e_g + params.cost + tol
        return _pure_ai_solution(scheme, p, g, boundary_tie=tie)

    v0 = solve_v0(rd, p, g, params)
    if v0 is not None and v_bar > v0 + tol:
        # threshold unreachable: nobody's revenue attains it, equilibrium is
        # the zero-compensation one
        sol = build_equilibrium(v0, p, g, rd, params, scheme=scheme)
        sol.classification = Classification.NO_COMPENSATION_EQUIVALENT
        return sol

    if one_mg < v_bar < top:
        qt = interior_quantities(rd, p, g, v_bar, params)
        diff = (v_bar + w) - (qt.V_tilde + params.cost)
        if abs(diff) <= max(tol, 1e-7 * max(1.0, abs(qt.V_tilde))):
            return build_equilibrium(v_bar, p, g, rd, params, scheme=scheme)
        if diff > 0:
            if assume_large_w:
                sol = build_equilibrium(v_bar, p, g, rd, params, scheme=scheme)
                sol.assumed_large_w = True
                sol.notes = "bonus above implied level treated as implied (finite-N heuristic)"
                return sol
            return EquilibriumSolution(
                scheme=scheme,
                classification=Classification.NONEXISTENT,
                quantities=qt,
                notes=f"bonus exceeds implied level {qt.w_implied:.6g}",
            )

    # bonus below the implied level (or threshold at/below 1-gamma): the
    # effective indifference level sits above v_bar; solve for it
    hi = v0 if v0 is not None else top * (1 - 1e-12)
    lo = max(v_bar, one_mg * (1 + 1e-12))

    def h(t: float) -> float:
        qt_t = interior_quantities(rd, p, g, t, params)
        v_raw = t * (
            float(np.sum(rd.g_masses[_split_index(rd, qt_t.r_bar):]))
            + qt_t.M_g / qt_t.r_bar**a
        )
        qual = _genai_qualified_g_mass(rd, v_bar, t, qt_t.r_bar, a)
        return t - (v_raw + w * qual + params.cost - w)

    if h(hi) < 0:
        # even at the top of the admissible window the bonus is below the
        # implied level: it never takes effect
        return _pure_ai_solution(
            scheme, p, g, notes="bonus below the minimum effective compensation"
        )
    lo_val = h(lo)
    if lo_val > 0:
        v_eff = lo
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if h(mid) > 0:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-13 * max(1.0, hi):
                break
        v_eff = 0.5 * (lo + hi)
    sol = build_equilibrium(v_eff, p, g, rd, params, scheme=scheme)
    sol.classification = Classification.REDUCIBLE
    sol.reduced_scheme = RevenueThresholdScheme(v_eff, max(sol.quantities.w_implied, 0.0))
    return sol


def profit_at(
    v_bar: float,
    p: DensityField,
    g: DensityField,
    rd: RatioDistribution,
    params: MarketParams,
    tol: float = 1e-6,
) -> tuple[float, float]:
    """Revenue and profit at an interior threshold, computed three ways and
    cross-checked: closed formulas, definitional integrals on the constructed
    equilibrium, and revenue minus bonus times indifferent content mass."""
    one_mg = 1 - params.gamma
    a = params.alpha
    if not (one_mg < v_bar < _v_top(rd, params)):
        raise ValueError("threshold outside the interior regime")
    qt = interior_quantities(rd, p, g, v_bar, params)
    if v_bar > qt.V_tilde + params.cost + 1e-9:
        raise ValueError("threshold not admissible (implied bonus negative)")
    gam = params.gamma
    R_formula = gam * (v_bar / one_mg) * qt.M_p + gam * qt.r_bar ** (1 - a) * (
        one_mg / v_bar
    ) ** (1 / a - 1) * qt.M_g
    Mp = qt.M_p
    Pi_formula = (
        (v_bar / one_mg) * Mp
        + qt.r_bar ** (1 - a) * (one_mg / v_bar) ** (1 / a - 1) * ((gam - Mp) / (1 - Mp)) * qt.M_g
        - params.cost * qt.r_bar * (one_mg / v_bar) ** (1 / a) * Mp / (1 - Mp)
    )
    sol = build_equilibrium(v_bar, p, g, rd, params)
    w = max(qt.w_implied, 0.0)
    W_field = np.where(sol.region_in, w, 0.0)
    R_def = platform_revenue(sol.q, p, params)
    Pi_def = platform_profit(sol.q, p, W_field, params)
    Pi_mass = R_def - w * qt.M_p
    if abs(R_formula - R_def) > tol or abs(Pi_formula - Pi_def) > tol or abs(Pi_def - Pi_mass) > tol:
        raise AssertionError(
            f"profit routes disagree at v_bar={v_bar}: "
            f"R=({R_formula}, {R_def}), Pi=({Pi_formula}, {Pi_def}, {Pi_mass})"
        )
    return R_def, Pi_def


def pure_ai_profit(rd: RatioDistribution, params: MarketParams) -> float:
    """Revenue (= profit) when all creators use the generative model."""
    return params.gamma * rd.expectation_r_alpha_under_g(params.alpha)


@dataclass(frozen=True)
class OptimizeResult:
    v_star: Optional[float]
    pi_star: float
    w_star: float
    no_compensation: bool


def optimize_vstar(
    p: DensityField,
    g: DensityField,
    rd: RatioDistribution,
    params: MarketParams,
    grid_points: int = 512,
) -> OptimizeResult:
    """Profit-maximizing threshold via a log-spaced sweep plus golden-section
    refinement; the zero-compensation candidate is always compared because
    profit is only upper-semicontinuous at the top of the window."""
    if grid_points < 32:
        raise ValueError("need grid_points >= 32")
    one_mg = 1 - params.gamma
    v0 = solve_v0(rd, p, g, params)
    top = _v_top(rd, params)
    hi = v0 if v0 is not None else top * (1 - 1e-10)
    lo = one_mg * (1 + 1e-9)

    def pi_of(v: float) -> float:
        qt = interior_quantities(rd, p, g, v, params)
        a = params.alpha
        Mp = qt.M_p
        return (
            (v / one_mg) * Mp
            + qt.r_bar ** (1 - a) * (one_mg / v) ** (1 / a - 1)
            * ((params.gamma - Mp) / (1 - Mp)) * qt.M_g
            - params.cost * qt.r_bar * (one_mg / v) ** (1 / a) * Mp / (1 - Mp)
        )

    vs = np.exp(np.linspace(np.log(lo), np.log(hi), grid_points))
    pis = np.array([pi_of(v) for v in vs])
    k = int(np.argmax(pis))
    a_br = vs[max(k - 1, 0)]
    b_br = vs[min(k + 1, len(vs) - 1)]
    invphi = (np.sqrt(5.0) - 1) / 2
    c = b_br - invphi * (b_br - a_br)
    d = a_br + invphi * (b_br - a_br)
    fc, fd = pi_of(c), pi_of(d)
    for _ in range(80):
        if b_br - a_br < 1e-13 * max(1.0, b_br):
            break
        if fc > fd:
            b_br, d, fd = d, c, fc
            c = b_br - invphi * (b_br - a_br)
            fc = pi_of(c)
        else:
            a_br, c, fc = c, d, fd
            d = a_br + invphi * (b_br - a_br)
            fd = pi_of(d)
    v_star = 0.5 * (a_br + b_br)
    pi_star = pi_of(v_star)

    # zero-compensation candidate
    if v0 is not None:
        pi_nc = pi_of(v0)
        nc_v: Optional[float] = v0
    else:
        pi_nc = pure_ai_profit(rd, params)
        nc_v = None
    if pi_nc >= pi_star:
        return OptimizeResult(
            v_star=nc_v, pi_star=pi_nc, w_star=0.0, no_compensation=True
        )
    qt = interior_quantities(rd, p, g, v_star, params)
    return OptimizeResult(
        v_star=float(v_star),
        pi_star=float(pi_star),
        w_star=max(qt.w_implied, 0.0),
        no_compensation=False,
    )


def discontinuity_gap(
    rd: RatioDistribution, params: MarketParams, atom_tol: float = 0.0
) -> float:
    """Jump of the implied GenAI revenue at the top of the threshold window
    when the ratio distribution has an atom at its supremum."""
    g_top = float(rd.g_masses[-1])
    if float(rd.p_masses[-1]) <= atom_tol:
        return 0.0
    g_below = 1.0 - g_top
    if g_below <= 0:
        raise ValueError("gap undefined when all g-mass sits at the supremum ratio")
    one_mg = 1 - params.gamma
    a = params.alpha
    return (g_top / g_below) * (
        one_mg * rd.r_max**a - one_mg * rd.expectation_r_alpha_under_g(a) - params.cost
    )


@dataclass(frozen=True)
class ResidualReport:
    consistency: float
    incentive: float


def _threshold_w_field(
    scheme: RevenueThresholdScheme, V: np.ndarray
) -> np.ndarray:
    return np.where(V >= scheme.v_bar - 1e-12, scheme.w, 0.0)


def verify_equilibrium(
    sol: EquilibriumSolution,
    p: DensityField,
    g: DensityField,
    params: MarketParams,
) -> ResidualReport:
    """Recompute the content density from the strategy and the best responses
    given it; report max-norm residuals of both equilibrium conditions."""
    if sol.beta_AI is None or sol.q is None:
        raise ValueError("solution carries no equilibrium to verify")
    dx = p.grid.dx
    beta = sol.beta_AI
    genai_mass = float(np.sum(beta * p.values) * dx)
    q_re = (1 - beta) * p.values + g.values * genai_mass
    consistency = float(np.max(np.abs(q_re - sol.q.values)))
    V = (1 - params.gamma) * (p.values / sol.q.values) ** params.alpha
    if sol.xbased is not None:
        W = sol.xbased.values
    elif sol.scheme is not None and sol.reduced_scheme is not None:
        W = _threshold_w_field(sol.reduced_scheme, V)
    elif sol.scheme is not None:
        W = _threshold_w_field(sol.scheme, V)
    else:
        W = np.zeros_like(V)
    V_comp = V + W
    V_genai = float(np.sum((V_comp) * g.values) * dx)
    manual_edge = V_comp - params.cost - V_genai
    if sol.region_in is not None:
        in_mask = sol.region_in
    else:
        in_mask = beta < 1 - 1e-9
    inc_in = np.max(np.abs(manual_edge[in_mask])) if in_mask.any() else 0.0
    ai_mask = ~in_mask
    inc_ai = np.max(np.maximum(manual_edge[ai_mask], 0.0)) if ai_mask.any() else 0.0
    return ResidualReport(consistency=consistency, incentive=float(max(inc_in, inc_ai)))


def xbased_equivalent(sol: EquilibriumSolution) -> XBasedScheme:
    """Freeze an interior solution's compensation into a location-based
    scheme; the revenue indicator and the ratio indicator must agree."""
    if sol.classification is not Classification.INTERIOR:
        raise ValueError("only interior solutions have a frozen equivalent")
    # at the interior equilibrium the revenue indicator V >= v_bar holds
    # exactly on the indifferent cells, so freezing it is region-based
    return XBasedScheme(sol.q.grid, np.where(sol.region_in, sol.scheme.w, 0.0))


def solve_xbased(
    W: Union[XBasedScheme, np.ndarray, Callable[[np.ndarray], np.ndarray]],
    p: DensityField,
    g: DensityField,
    params: MarketParams,
    delta_schedule: Sequence[float] = (1e-2, 1e-3, 1e-4, 0.0),
    damping: float = 0.5,
    max_iter: int = 20000,
    tol: float = 1e-10,
) -> EquilibriumSolution:
    """Damped best-response iteration for a location-based compensation
    scheme, annealing the interiority parameter of the fixed-point map to
    zero. `W` may also be a callable of the current revenue profile, which
    lets the caller iterate a genuinely belief-dependent scheme (the map can
    then fail to converge when no equilibrium exists; that is reported as
    Undecided, never as Nonexistent)."""
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    deltas = list(delta_schedule)
    if any(b >= a for a, b in zip(deltas, deltas[1:])) or deltas[-1] < 0:
        raise ValueError("delta_schedule must strictly decrease to a final value >= 0")
    one_mg = 1 - params.gamma
    a = params.alpha
    dx = p.grid.dx
    r = p.values / g.values

    if isinstance(W, XBasedScheme):
        w_of = lambda V: W.values
        xb = W
    elif callable(W):
        w_of = W
        xb = None
    else:
        arr = np.asarray(W, dtype=float)
        w_of = lambda V: arr
        xb = XBasedScheme(p.grid, arr)

    beta = np.full(p.grid.n_cells, 0.5)
    V = np.full(p.grid.n_cells, one_mg)
    residual = np.inf

    def step(beta, V, delta):
        Wx = w_of(V)
        genai_mass = float(np.sum(beta * p.values) * dx)
        VWg = float(np.sum((V + Wx) * g.values) * dx)
        denom = np.maximum(VWg + params.cost - Wx, delta)
        with np.errstate(divide="ignore"):
            pull = np.where(denom > 0, (one_mg / np.where(denom > 0, denom, 1.0)) ** (1 / a), np.inf)
        beta_new = 1.0 + genai_mass / r - pull
        beta_new = np.where(np.isfinite(beta_new), beta_new, 0.0)
        beta_new = np.clip(beta_new, delta, 1.0)
        m_new = float(np.sum(beta_new * p.values) * dx)
        V_new = one_mg * (1.0 - beta_new + m_new / r) ** (-a)
        return beta_new, V_new

    for delta in deltas:
        for _ in range(max_iter):
            beta_new, V_new = step(beta, V, delta)
            residual = max(
                float(np.max(np.abs(beta_new - beta))), float(np.max(np.abs(V_new - V)))
            )
            beta = (1 - damping) * beta + damping * beta_new
            V = (1 - damping) * V + damping * V_new
            if residual <= tol:
                break

    genai_mass = float(np.sum(beta * p.values) * dx)
    q_vals = (1 - beta) * p.values + g.values * genai_mass
    q = DensityField(
        p.grid, q_vals, floor=min(1e-300, float(q_vals.min())), normalized=False
    )
    converged = residual <= max(tol, 1e-8)
    if not converged:
        classification = Classification.UNDECIDED
    elif np.all(beta >= 1 - 1e-9):
        classification = Classification.PURE_AI
    else:
        classification = Classification.INTERIOR
    return EquilibriumSolution(
        scheme=None,
        classification=classification,
        beta_AI=beta,
        q=q,
        region_in=beta < 1 - 1e-9,
        genai_mass=genai_mass,
        xbased=xb,
        residual=float(residual),
        notes="" if converged else "fixed-point iteration did not converge",
    )
