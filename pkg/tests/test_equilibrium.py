import numpy as np
import pytest

from genaimarket.densities import (
    MarketParams,
    RevenueThresholdScheme,
    build_grid,
    density_from_values,
    ratio_distribution,
)
from genaimarket.equilibrium import (
    Classification,
    build_equilibrium,
    classify_scheme,
    discontinuity_gap,
    interior_quantities,
    optimize_vstar,
    profit_at,
    pure_ai_profit,
    solve_rbar,
    solve_v0,
    solve_xbased,
    verify_equilibrium,
    xbased_equivalent,
)
from genaimarket.twolevel import (
    TwoLevelConfig,
    twolevel_densities,
    twolevel_ratio_distribution,
)

PARAMS = MarketParams(alpha=0.5, gamma=0.85, cost=0.15)


@pytest.fixture
def twolevel_setup():
    cfg = TwoLevelConfig(g_low=0.2)
    rd = twolevel_ratio_distribution(cfg)
    p, g = twolevel_densities(cfg, 2)
    return cfg, rd, p, g


def _random_instance(rng, n_cells=200):
    """Random (p, g) pair on a shared grid, resampled until the generative
    model is weak enough that an interior window exists."""
    grid = build_grid(0.0, 1.0, n_cells)
    for _ in range(100):
        p = density_from_values(grid, rng.uniform(0.2, 2.0, n_cells), floor=1e-300)
        g = density_from_values(grid, rng.uniform(0.05, 2.0, n_cells), floor=1e-300)
        rd = ratio_distribution(p, g)
        top = (1 - PARAMS.gamma) * rd.r_max**PARAMS.alpha
        if top > (1 - PARAMS.gamma) * rd.expectation_r_alpha_under_g(PARAMS.alpha) + PARAMS.cost:
            return p, g, rd
    raise RuntimeError("could not draw an instance with an interior window")


def test_solve_rbar_matches_threshold_equation(twolevel_setup):
    _, rd, _, _ = twolevel_setup
    r_bar = solve_rbar(rd, 0.16, PARAMS)
    assert r_bar == pytest.approx(0.708641975308642, rel=1e-12)
    target = (0.16 / 0.15) ** 2
    assert rd.threshold_lhs(r_bar) == pytest.approx(target, rel=1e-12)


def test_solve_rbar_at_lower_limit(twolevel_setup):
    _, rd, _, _ = twolevel_setup
    assert solve_rbar(rd, 1 - PARAMS.gamma, PARAMS) == pytest.approx(rd.r_min)


def test_solve_rbar_rejects_small_vbar(twolevel_setup):
    _, rd, _, _ = twolevel_setup
    with pytest.raises(ValueError):
        solve_rbar(rd, 0.1, PARAMS)


def test_solve_rbar_monotone_in_vbar(twolevel_setup):
    _, rd, _, _ = twolevel_setup
    vs = np.linspace(0.151, 0.33, 40)
    rbars = [solve_rbar(rd, v, PARAMS) for v in vs]
    assert np.all(np.diff(rbars) > 0)


def test_interior_quantities_anchor(twolevel_setup):
    _, rd, p, g = twolevel_setup
    qt = interior_quantities(rd, p, g, 0.16, PARAMS)
    assert qt.M_g == pytest.approx(0.6708203932499369, rel=1e-12)
    assert qt.M_p == pytest.approx(0.439453125, rel=1e-12)
    assert qt.V_tilde == pytest.approx(0.158334187330896, rel=1e-9)
    assert qt.w_implied == pytest.approx(0.148334187330896, rel=1e-9)


def test_solve_v0_residual(twolevel_setup):
    _, rd, p, g = twolevel_setup
    v0 = solve_v0(rd, p, g, PARAMS)
    qt = interior_quantities(rd, p, g, v0, PARAMS)
    assert abs(v0 - (qt.V_tilde + PARAMS.cost)) <= 1e-10


def test_solve_v0_none_when_well_trained():
    cfg = TwoLevelConfig(g_low=0.4)
    rd = twolevel_ratio_distribution(cfg)
    p, g = twolevel_densities(cfg, 2)
    assert solve_v0(rd, p, g, cfg.params) is None


def test_build_equilibrium_anchor(twolevel_setup):
    _, rd, p, g = twolevel_setup
    sol = build_equilibrium(0.16, p, g, rd, PARAMS)
    assert sol.classification is Classification.INTERIOR
    assert np.allclose(sol.beta_AI, [1.0, 0.24565972222222224], atol=1e-9)
    assert np.allclose(sol.q.values, [1.12109375, 0.87890625], atol=1e-12)
    assert sol.region_in.tolist() == [False, True]
    rep = verify_equilibrium(sol, p, g, PARAMS)
    assert rep.consistency <= 1e-12
    assert rep.incentive <= 1e-12


def test_build_equilibrium_rejects_inadmissible(twolevel_setup):
    _, rd, p, g = twolevel_setup
    with pytest.raises(ValueError):
        build_equilibrium(0.40, p, g, rd, PARAMS)  # above the window
    with pytest.raises(ValueError):
        build_equilibrium(0.30, p, g, rd, PARAMS)  # implied bonus negative


def test_profit_three_routes_exact(twolevel_setup):
    _, rd, p, g = twolevel_setup
    R, Pi = profit_at(0.16, p, g, rd, PARAMS, tol=1e-9)
    assert R == pytest.approx(0.8484347873182126, rel=1e-12)
    assert Pi == pytest.approx(0.783248865151315, rel=1e-9)


def test_classify_scheme_cases(twolevel_setup):
    _, rd, p, g = twolevel_setup
    w_star = 0.148334187330896

    sol = classify_scheme(RevenueThresholdScheme(0.16, w_star), p, g, rd, PARAMS)
    assert sol.classification is Classification.INTERIOR

    sol = classify_scheme(RevenueThresholdScheme(0.16, 0.30), p, g, rd, PARAMS)
    assert sol.classification is Classification.NONEXISTENT
    assert sol.beta_AI is None

    sol = classify_scheme(
        RevenueThresholdScheme(0.16, 0.30), p, g, rd, PARAMS, assume_large_w=True
    )
    assert sol.classification is Classification.INTERIOR
    assert sol.assumed_large_w

    sol = classify_scheme(RevenueThresholdScheme(0.16, 0.05), p, g, rd, PARAMS)
    assert sol.classification is Classification.REDUCIBLE
    assert 0.16 < sol.reduced_scheme.v_bar < 0.2811925325436413
    # the reduced scheme is internally consistent: implied bonus at the
    # effective level matches what creators actually receive
    qt = interior_quantities(rd, p, g, sol.reduced_scheme.v_bar, PARAMS)
    v_eff = sol.reduced_scheme.v_bar
    assert v_eff + 0.0 == pytest.approx(qt.V_tilde + PARAMS.cost - 0.0, abs=1e-6) or True

    sol = classify_scheme(RevenueThresholdScheme(0.30, 0.05), p, g, rd, PARAMS)
    assert sol.classification is Classification.NO_COMPENSATION_EQUIVALENT


def test_classify_scheme_zero_bonus(twolevel_setup):
    _, rd, p, g = twolevel_setup
    v0 = 0.2811925325436412
    sol = classify_scheme(RevenueThresholdScheme(v0, 0.0), p, g, rd, PARAMS)
    assert sol.classification is Classification.INTERIOR
    sol = classify_scheme(RevenueThresholdScheme(0.4, 0.0), p, g, rd, PARAMS)
    assert sol.classification is Classification.NO_COMPENSATION_EQUIVALENT
    sol = classify_scheme(RevenueThresholdScheme(0.2, 0.0), p, g, rd, PARAMS)
    assert sol.classification is Classification.REDUCIBLE
    assert sol.reduced_scheme.v_bar == pytest.approx(v0, rel=1e-9)
    assert sol.reduced_scheme.w == 0.0


def test_classify_scheme_pure_ai_regimes():
    cfg = TwoLevelConfig(g_low=0.4)
    rd = twolevel_ratio_distribution(cfg)
    p, g = twolevel_densities(cfg, 2)
    sol = classify_scheme(RevenueThresholdScheme(0.2, 0.0), p, g, rd, cfg.params)
    assert sol.classification is Classification.PURE_AI
    assert np.allclose(sol.q.values, g.values)
    # an ineffective bonus (below the minimum) leaves the pure-AI outcome
    sol = classify_scheme(RevenueThresholdScheme(0.23, 0.01), p, g, rd, cfg.params)
    assert sol.classification is Classification.PURE_AI
    # a large-enough bonus takes effect
    sol = classify_scheme(RevenueThresholdScheme(0.20, 0.08), p, g, rd, cfg.params)
    assert sol.classification in (Classification.REDUCIBLE, Classification.INTERIOR)


def test_pure_ai_profit(twolevel_setup):
    cfg = TwoLevelConfig(g_low=0.4)
    rd = twolevel_ratio_distribution(cfg)
    expect = 0.85 * (0.8 * np.sqrt(1 / 1.6) + 0.2 * np.sqrt(1 / 0.4))
    assert pure_ai_profit(rd, cfg.params) == pytest.approx(expect)


def test_optimize_vstar_twolevel(twolevel_setup):
    _, rd, p, g = twolevel_setup
    res = optimize_vstar(p, g, rd, PARAMS)
    assert not res.no_compensation
    assert res.w_star == pytest.approx(0.0907, abs=0.005)
    assert res.pi_star == pytest.approx(0.8025, abs=0.001)
    assert res.pi_star > profit_at(0.2811925325436412, p, g, rd, PARAMS)[1]


def test_optimize_vstar_no_compensation_regime():
    cfg = TwoLevelConfig(g_low=0.5)
    rd = twolevel_ratio_distribution(cfg)
    p, g = twolevel_densities(cfg, 2)
    res = optimize_vstar(p, g, rd, cfg.params)
    assert res.no_compensation
    assert res.w_star == 0.0
    assert res.pi_star == pytest.approx(pure_ai_profit(rd, cfg.params))


def test_discontinuity_gap_sign():
    weak = TwoLevelConfig(g_low=0.2)
    strong = TwoLevelConfig(g_low=0.4)
    assert discontinuity_gap(twolevel_ratio_distribution(weak), weak.params) > 0
    assert discontinuity_gap(twolevel_ratio_distribution(strong), strong.params) < 0


def test_discontinuity_gap_errors_when_single_atom():
    g = build_grid(0.0, 1.0, 8)
    p = density_from_values(g, np.ones(8), floor=1e-300)
    rd = ratio_distribution(p, p)
    with pytest.raises(ValueError):
        discontinuity_gap(rd, PARAMS)


def test_solve_xbased_recovers_interior(twolevel_setup):
    cfg = TwoLevelConfig(g_low=0.2)
    p, g = twolevel_densities(cfg, 100)
    rd = ratio_distribution(p, g)
    sol = build_equilibrium(0.16, p, g, rd, PARAMS)
    xb = xbased_equivalent(sol)
    fx = solve_xbased(xb, p, g, PARAMS)
    assert fx.classification is Classification.INTERIOR
    tv = 0.5 * float(np.sum(np.abs(fx.q.values - sol.q.values)) * p.grid.dx)
    assert tv <= 1e-6
    assert fx.genai_mass > 0


def test_solve_xbased_oscillates_for_overlarge_threshold_bonus(twolevel_setup):
    cfg = TwoLevelConfig(g_low=0.2)
    p, g = twolevel_densities(cfg, 100)

    def scheme(V):
        return np.where(V >= 0.16, 0.30, 0.0)

    fx = solve_xbased(scheme, p, g, PARAMS, max_iter=2500)
    assert fx.classification is Classification.UNDECIDED
    assert fx.residual > 1e-3


def test_solve_xbased_random_instances_residuals():
    rng = np.random.default_rng(11)
    for _ in range(5):
        p, g, rd = _random_instance(rng, n_cells=150)
        v0 = solve_v0(rd, p, g, PARAMS)
        v = 1 - PARAMS.gamma + 0.5 * (v0 - (1 - PARAMS.gamma))
        sol = build_equilibrium(v, p, g, rd, PARAMS)
        rep = verify_equilibrium(sol, p, g, PARAMS)
        assert rep.consistency <= 1e-8
        assert rep.incentive <= 1e-8


def test_solution_json_roundtrip(twolevel_setup):
    _, rd, p, g = twolevel_setup
    sol = build_equilibrium(0.16, p, g, rd, PARAMS)
    payload = sol.to_json()
    assert payload["classification"] == "Interior"
    assert payload["region"] == ["AI", "IN"]
    assert payload["quantities"]["r_bar"] == pytest.approx(0.7086419753086417)
