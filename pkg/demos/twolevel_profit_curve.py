"""Closed-form walk through the two-level market.

Consumer tastes are uniform on [0, 1]; the generative model puts density
2 - g_low on the left half and g_low on the right, so the right half is the
under-served niche.  We sweep the revenue threshold across its admissible
window, print the profit curve, and compare the optimal scheme with paying
nothing at all.
"""

import numpy as np

from genaimarket import (
    TwoLevelConfig,
    optimize_vstar,
    ratio_distribution,
    twolevel_densities,
    twolevel_gstar,
    twolevel_profit,
    twolevel_quantities,
    twolevel_v0,
    twolevel_wmin,
)


def main():
    cfg = TwoLevelConfig(g_low=0.2)
    g_star = twolevel_gstar(cfg.params)
    print(f"two-level market, g_low={cfg.g_low}, gamma={cfg.gamma}, cost={cfg.params.cost}")
    print(f"regime boundary g* = {g_star:.6f}")

    if cfg.g_low < g_star:
        v0 = twolevel_v0(cfg)
        print(f"g_low < g*: the model is weak, manual creation survives; v0 = {v0:.6f}")
    else:
        print(f"g_low >= g*: pure-AI regime; minimum effective bonus = {twolevel_wmin(cfg):.6f}")
        return

    lo, _ = cfg.v_window
    print("\n  v_bar        w        R        Pi")
    for v in np.linspace(lo * 1.001, v0 * 0.9999, 12):
        qt = twolevel_quantities(cfg, v)
        R, Pi = twolevel_profit(cfg, v)
        print(f"  {v:.4f}   {max(qt.w_implied, 0):.4f}   {R:.4f}   {Pi:.4f}")

    # the same optimum via the generic grid solver
    p, g = twolevel_densities(cfg, 1000)
    rd = ratio_distribution(p, g)
    res = optimize_vstar(p, g, rd, cfg.params)
    _, pi_zero = twolevel_profit(cfg, v0)
    print(f"\noptimal scheme: v* = {res.v_star:.4f}, w* = {res.w_star:.4f}, Pi* = {res.pi_star:.4f}")
    print(f"no-compensation profit (scheme at v0): {pi_zero:.4f}")
    print(f"paying creators raises profit by {res.pi_star - pi_zero:.4f}")


if __name__ == "__main__":
    main()
