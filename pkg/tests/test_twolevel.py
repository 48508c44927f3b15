import numpy as np
import pytest

from genaimarket.densities import MarketParams, ratio_distribution
from genaimarket.equilibrium import interior_quantities, profit_at, solve_v0
from genaimarket.twolevel import (
    TwoLevelConfig,
    twolevel_densities,
    twolevel_gstar,
    twolevel_profit,
    twolevel_quantities,
    twolevel_ratio_distribution,
    twolevel_rbar,
    twolevel_v0,
    twolevel_wmin,
)


def test_config_defaults():
    cfg = TwoLevelConfig(g_low=0.2)
    assert cfg.g_high == pytest.approx(1.8)
    assert cfg.params.alpha == 0.5
    assert cfg.params.gamma == 0.85
    assert cfg.params.cost == pytest.approx(0.15)
    lo, hi = cfg.v_window
    assert lo == pytest.approx(0.15)
    assert hi == pytest.approx(0.15 / np.sqrt(0.2))


def test_densities_integrate_to_one():
    cfg = TwoLevelConfig(g_low=0.3)
    p, g = twolevel_densities(cfg, 200)
    assert p.integral() == pytest.approx(1.0)
    assert g.integral() == pytest.approx(1.0)
    assert np.all(g.values[:100] == pytest.approx(1.7))
    assert np.all(g.values[100:] == pytest.approx(0.3))


def test_densities_reject_odd_cells():
    with pytest.raises(ValueError):
        twolevel_densities(TwoLevelConfig(g_low=0.2), 3)


def test_rbar_limits():
    cfg = TwoLevelConfig(g_low=0.2)
    g_high = cfg.g_high
    # as v_bar drops to 1 - gamma, the threshold approaches 1/g_high
    assert twolevel_rbar(cfg, 0.15 + 1e-12) == pytest.approx(1 / g_high, rel=1e-9)
    # as v_bar rises to the upper window edge, it approaches 1/g_low
    hi = 0.15 / np.sqrt(0.2)
    assert twolevel_rbar(cfg, hi - 1e-12) == pytest.approx(1 / cfg.g_low, rel=1e-9)
    assert twolevel_rbar(cfg, 0.16) == pytest.approx(0.708641975308642, rel=1e-12)


def test_quantities_match_numeric():
    cfg = TwoLevelConfig(g_low=0.2)
    qt = twolevel_quantities(cfg, 0.16)
    assert qt.M_g == pytest.approx(np.sqrt(1.8) / 2, rel=1e-12)
    assert qt.M_p == pytest.approx(0.439453125, rel=1e-12)
    assert qt.V_tilde == pytest.approx(0.158334187330896, rel=1e-9)
    p, g = twolevel_densities(cfg, 2)
    rd = twolevel_ratio_distribution(cfg)
    num = interior_quantities(rd, p, g, 0.16, cfg.params)
    assert qt.r_bar == pytest.approx(num.r_bar, rel=1e-12)
    assert qt.V_tilde == pytest.approx(num.V_tilde, rel=1e-12)


def test_v0_matches_numeric_and_monotone():
    cfg = TwoLevelConfig(g_low=0.2)
    v0 = twolevel_v0(cfg)
    assert v0 == pytest.approx(0.2811925325436412, rel=1e-9)
    p, g = twolevel_densities(cfg, 2)
    rd = twolevel_ratio_distribution(cfg)
    assert v0 == pytest.approx(solve_v0(rd, p, g, cfg.params), rel=1e-9)
    # v0 sits strictly inside the admissible window
    lo, hi = cfg.v_window
    assert lo < v0 < hi


def test_v0_requires_weak_model():
    with pytest.raises(ValueError):
        twolevel_v0(TwoLevelConfig(g_low=0.4))


def test_gstar_root_and_regime_split():
    params = MarketParams(alpha=0.5, gamma=0.85, cost=0.15)
    g_star = twolevel_gstar(params)
    assert g_star == pytest.approx(0.271841, abs=1e-4)
    lhs = 0.15 / np.sqrt(g_star)
    rhs = 0.15 * (np.sqrt(g_star) + np.sqrt(2 - g_star)) / 2 + 0.15
    assert lhs == pytest.approx(rhs, abs=1e-9)
    # below g_star the no-compensation ceiling exceeds the well-trained bound
    assert 0.15 / np.sqrt(0.2) > 0.15 * (np.sqrt(0.2) + np.sqrt(1.8)) / 2 + 0.15
    assert 0.15 / np.sqrt(0.2) == pytest.approx(0.3354101966249685)
    assert 0.15 * (np.sqrt(0.2) + np.sqrt(1.8)) / 2 + 0.15 == pytest.approx(
        0.2841640786499874
    )
    # at g_low = 0.4 the inequality flips: 0.2372 < 0.2923
    assert 0.15 / np.sqrt(0.4) < 0.15 * (np.sqrt(0.4) + np.sqrt(1.6)) / 2 + 0.15


def test_wmin_values():
    assert twolevel_wmin(TwoLevelConfig(g_low=0.3)) == pytest.approx(
        0.017653958, abs=1e-6
    )
    assert twolevel_wmin(TwoLevelConfig(g_low=0.4)) == pytest.approx(
        0.068914579, abs=1e-6
    )
    # with g = p the scheme must cover twice the cost per qualifying creator
    assert twolevel_wmin(TwoLevelConfig(g_low=1.0)) == pytest.approx(0.30, abs=1e-9)


def test_profit_matches_numeric():
    cfg = TwoLevelConfig(g_low=0.2)
    R, Pi = twolevel_profit(cfg, 0.16)
    assert R == pytest.approx(0.8484347873182126, rel=1e-12)
    assert Pi == pytest.approx(0.783248865151315, rel=1e-9)
    p, g = twolevel_densities(cfg, 2)
    rd = ratio_distribution(p, g)
    Rn, Pin = profit_at(0.16, p, g, rd, cfg.params)
    assert R == pytest.approx(Rn, rel=1e-10)
    assert Pi == pytest.approx(Pin, rel=1e-10)


def test_profit_interior_beats_window_edge():
    cfg = TwoLevelConfig(g_low=0.2)
    _, pi_edge = twolevel_profit(cfg, 0.15 + 1e-4)
    _, pi_mid = twolevel_profit(cfg, 0.16)
    assert pi_mid > pi_edge


def test_monotonicity_in_vbar():
    cfg = TwoLevelConfig(g_low=0.2)
    vs = np.linspace(0.1501, 0.28, 50)
    rbars = [twolevel_rbar(cfg, v) for v in vs]
    vts = [twolevel_quantities(cfg, v).V_tilde for v in vs]
    Rs = [twolevel_profit(cfg, v)[0] for v in vs]
    assert np.all(np.diff(rbars) > 0)
    assert np.all(np.diff(vts) < 0)
    assert np.all(np.diff(Rs) < 0)
