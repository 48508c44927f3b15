"""Batch command surface: solvers and simulations driven by flags or a JSON
config manifest, emitting machine-readable CSV/JSON results.

Exit codes: 0 success, 2 invalid input, 3 non-convergence warning.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .densities import (
    DensityField,
    MarketParams,
    RevenueThresholdScheme,
    build_grid,
    density_from_values,
    ratio_distribution,
)
from .equilibrium import (
    Classification,
    build_equilibrium,
    classify_scheme,
    interior_quantities,
    optimize_vstar,
    profit_at,
    pure_ai_profit,
    solve_v0,
    verify_equilibrium,
)
from .market import pregenai_equilibrium, pregenai_optimal
from .simulation import (
    ABMConfig,
    MixtureSpec,
    PLATFORM_MIXTURE,
    collapse_metrics,
    fit_generative,
    periods_to_csv,
    run_multiperiod,
    run_period,
    sample_mixture,
)
from .twolevel import (
    TwoLevelConfig,
    twolevel_gstar,
    twolevel_profit,
    twolevel_quantities,
    twolevel_rbar,
    twolevel_v0,
    twolevel_wmin,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3


def _fmt(x: float) -> str:
    return f"{float(x):.9g}"


class CliError(Exception):
    pass


def _load_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise CliError("config file must hold a JSON object")
    return cfg


def _get(args, cfg: dict, name: str, default=None, required: bool = False):
    """Flag value if given, else config field, else default."""
    val = getattr(args, name.replace("-", "_"), None)
    if val is None:
        val = cfg.get(name, default)
    if required and val is None:
        raise CliError(f"missing required parameter '{name}' (flag or config field)")
    return val


def _params(args, cfg) -> MarketParams:
    try:
        return MarketParams(
            alpha=float(_get(args, cfg, "alpha", 0.5)),
            gamma=float(_get(args, cfg, "gamma", required=True)),
            cost=float(_get(args, cfg, "cost", required=True)),
        )
    except ValueError as exc:
        raise CliError(str(exc))


def _densities(args, cfg) -> tuple[DensityField, DensityField]:
    p_file = _get(args, cfg, "p-file", required=True)
    g_file = _get(args, cfg, "g-file", required=True)
    try:
        p = DensityField.from_csv(p_file)
        g = DensityField.from_csv(g_file, floor=1e-300)
    except (OSError, ValueError) as exc:
        raise CliError(f"failed to read density file: {exc}")
    if p.grid != g.grid:
        raise CliError("p and g must share a grid")
    return p, g


def _emit(args, text: str, filename: str) -> None:
    out = getattr(args, "out", None)
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_pregenai(args) -> int:
    cfg = _load_config(args)
    params = _params(args, cfg)
    report: dict = {"alpha": params.alpha, "gamma": params.gamma, "cost": params.cost}
    W = _get(args, cfg, "W")
    grid = build_grid(0.0, 1.0, int(_get(args, cfg, "grid-cells", 64)))
    p = density_from_values(grid, np.ones(grid.n_cells), floor=1e-300)
    if W is None:
        w_star, pi_star = pregenai_optimal(params)
        report["W_star"] = w_star
        report["Pi_star"] = pi_star
        W_eval = w_star
    else:
        W_eval = float(W)
        if W_eval < 0:
            raise CliError("W must be nonnegative")
    strat, q = pregenai_equilibrium(params, W_eval, p)
    beta_h = float(strat.beta_H[0])
    report["W"] = W_eval
    report["beta_H"] = beta_h
    report["q_scale"] = beta_h
    report["Pi"] = params.gamma * beta_h ** (1 - params.alpha) - W_eval * beta_h
    _emit(args, json.dumps(report, indent=2) + "\n", "pregenai.json")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    params = _params(args, cfg)
    p, g = _densities(args, cfg)
    rd = ratio_distribution(p, g)
    v_bar = float(_get(args, cfg, "v-bar", required=True))
    w = _get(args, cfg, "w")
    try:
        if w is None:
            sol = build_equilibrium(v_bar, p, g, rd, params)
        else:
            scheme = RevenueThresholdScheme(v_bar, float(w))
            sol = classify_scheme(
                scheme, p, g, rd, params,
                assume_large_w=bool(_get(args, cfg, "assume-large-w", False)),
            )
    except ValueError as exc:
        raise CliError(str(exc))
    payload = sol.to_json()
    payload["params"] = {"alpha": params.alpha, "gamma": params.gamma, "cost": params.cost}
    _emit(args, json.dumps(payload, indent=2) + "\n", "solution.json")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _load_config(args)
    params = _params(args, cfg)
    p, g = _densities(args, cfg)
    rd = ratio_distribution(p, g)
    v_bar = float(_get(args, cfg, "v-bar", required=True))
    w = float(_get(args, cfg, "w", required=True))
    sol = classify_scheme(
        RevenueThresholdScheme(v_bar, w), p, g, rd, params,
        assume_large_w=bool(_get(args, cfg, "assume-large-w", False)),
    )
    out = {
        "classification": sol.classification.value,
        "boundary_tie": sol.boundary_tie,
        "notes": sol.notes,
    }
    if sol.reduced_scheme is not None:
        out["reduced_scheme"] = {"v_bar": sol.reduced_scheme.v_bar, "w": sol.reduced_scheme.w}
    _emit(args, json.dumps(out, indent=2) + "\n", "classification.json")
    return EXIT_OK


def cmd_curve(args) -> int:
    cfg = _load_config(args)
    params = _params(args, cfg)
    p, g = _densities(args, cfg)
    rd = ratio_distribution(p, g)
    n_points = int(_get(args, cfg, "n-points", 200))
    if n_points < 2:
        raise CliError("need n-points >= 2")
    one_mg = 1 - params.gamma
    v0 = solve_v0(rd, p, g, params)
    lines = ["v_bar,w,R,Pi,classification"]
    if v0 is None:
        pi = pure_ai_profit(rd, params)
        top = (1 - params.gamma) * rd.r_max**params.alpha
        for v in np.linspace(one_mg * (1 + 1e-6), max(top, one_mg * 2), n_points):
            lines.append(
                f"{_fmt(v)},0,{_fmt(pi)},{_fmt(pi)},{Classification.PURE_AI.value}"
            )
    else:
        for v in np.linspace(one_mg * (1 + 1e-6), v0, n_points):
            qt = interior_quantities(rd, p, g, v, params)
            R, Pi = profit_at(v, p, g, rd, params)
            w = max(qt.w_implied, 0.0)
            lines.append(
                f"{_fmt(v)},{_fmt(w)},{_fmt(R)},{_fmt(Pi)},{Classification.INTERIOR.value}"
            )
    _emit(args, "\n".join(lines) + "\n", "curve.csv")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _load_config(args)
    params = _params(args, cfg)
    p, g = _densities(args, cfg)
    rd = ratio_distribution(p, g)
    res = optimize_vstar(p, g, rd, params)
    out = {
        "v_star": res.v_star,
        "w_star": res.w_star,
        "Pi_star": res.pi_star,
        "no_compensation": res.no_compensation,
    }
    _emit(args, json.dumps(out, indent=2) + "\n", "optimum.json")
    return EXIT_OK


def cmd_twolevel(args) -> int:
    cfg = _load_config(args)
    g_low = float(_get(args, cfg, "g-low", required=True))
    gamma = float(_get(args, cfg, "gamma", 0.85))
    cost = _get(args, cfg, "cost")
    try:
        params = MarketParams(alpha=0.5, gamma=gamma, cost=float(cost) if cost is not None else 1 - gamma)
        tl = TwoLevelConfig(g_low=g_low, params=params)
    except ValueError as exc:
        raise CliError(str(exc))
    out: dict = {"g_low": g_low, "g_high": tl.g_high, "gamma": gamma, "cost": params.cost}
    g_star = twolevel_gstar(params)
    out["g_star"] = g_star
    if g_low < g_star:
        out["v0"] = twolevel_v0(tl)
    else:
        out["w_min"] = twolevel_wmin(tl)
    v_bar = _get(args, cfg, "v-bar")
    if v_bar is not None:
        v_bar = float(v_bar)
        try:
            qt = twolevel_quantities(tl, v_bar)
            R, Pi = twolevel_profit(tl, v_bar)
        except ValueError as exc:
            raise CliError(str(exc))
        out["at_v_bar"] = {
            "v_bar": v_bar,
            "r_bar": twolevel_rbar(tl, v_bar),
            "M_g": qt.M_g,
            "M_p": qt.M_p,
            "V_tilde": qt.V_tilde,
            "w_implied": qt.w_implied,
            "R": R,
            "Pi": Pi,
        }
    _emit(args, json.dumps(out, indent=2) + "\n", "twolevel.json")
    return EXIT_OK


def _abm_config(args, cfg) -> ABMConfig:
    params = MarketParams(
        alpha=float(_get(args, cfg, "alpha", 0.5)),
        gamma=float(_get(args, cfg, "gamma", 0.9)),
        cost=float(_get(args, cfg, "cost", 0.1)),
    )
    scheme = RevenueThresholdScheme(
        float(_get(args, cfg, "v-bar", required=True)),
        float(_get(args, cfg, "w", 0.0)),
    )
    bw = _get(args, cfg, "bandwidth")
    return ABMConfig(
        n_agents=int(_get(args, cfg, "n-agents", 26500)),
        n_bins=int(_get(args, cfg, "n-bins", 100)),
        params=params,
        scheme=scheme,
        seed=int(_get(args, cfg, "seed", 0)),
        max_rounds=int(_get(args, cfg, "max-rounds", 50)),
        convergence_tv=float(_get(args, cfg, "convergence-tv", 0.01)),
        train_bandwidth=float(bw) if bw is not None else None,
        shrink=float(_get(args, cfg, "shrink", 1.0)),
    )


def _sidecar(args, abm: ABMConfig, extra: dict) -> None:
    out = getattr(args, "out", None)
    if not out:
        return
    payload = {
        "n_agents": abm.n_agents,
        "n_bins": abm.n_bins,
        "alpha": abm.params.alpha,
        "gamma": abm.params.gamma,
        "cost": abm.params.cost,
        "v_bar": abm.scheme.v_bar,
        "w": abm.scheme.w,
        "seed": abm.seed,
        "max_rounds": abm.max_rounds,
        "convergence_tv": abm.convergence_tv,
        "train_bandwidth": abm.train_bandwidth,
        "shrink": abm.shrink,
        **extra,
    }
    Path(out).mkdir(parents=True, exist_ok=True)
    (Path(out) / "run_config.json").write_text(json.dumps(payload, indent=2) + "\n")


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    try:
        abm = _abm_config(args, cfg)
    except ValueError as exc:
        raise CliError(str(exc))
    train_frac = float(_get(args, cfg, "train-frac", 0.1))
    rng = np.random.default_rng(abm.seed)
    spec = MixtureSpec(PLATFORM_MIXTURE.components, abm.clip_lo, abm.clip_hi)
    n_train = max(2, int(round(train_frac * abm.n_agents)))
    model = fit_generative(
        sample_mixture(spec, n_train, rng),
        bandwidth=abm.train_bandwidth,
        clip=(abm.clip_lo, abm.clip_hi),
        shrink=abm.shrink,
    )
    contents = sample_mixture(spec, abm.n_agents, rng)
    rec = run_period(abm, model, contents, rng)
    _sidecar(args, abm, {"command": "simulate", "train_frac": train_frac})
    _emit(args, periods_to_csv([rec], spec), "period.csv")
    converged = rec.rounds_used < abm.max_rounds
    report = {
        "R": rec.R,
        "Pi": rec.Pi,
        "manual_fraction": rec.manual_fraction,
        "rounds_used": rec.rounds_used,
        "converged": converged,
    }
    _emit(args, json.dumps(report, indent=2) + "\n", "simulate.json")
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_multiperiod(args) -> int:
    cfg = _load_config(args)
    try:
        abm = _abm_config(args, cfg)
    except ValueError as exc:
        raise CliError(str(exc))
    T = int(_get(args, cfg, "periods", 10))
    if T < 1:
        raise CliError("need periods >= 1")
    train_frac = float(_get(args, cfg, "train-frac", 1.0))
    spec = MixtureSpec(PLATFORM_MIXTURE.components, abm.clip_lo, abm.clip_hi)
    records = run_multiperiod(abm, spec, T, train_frac=train_frac)
    _sidecar(args, abm, {"command": "multiperiod", "periods": T, "train_frac": train_frac})
    _emit(args, periods_to_csv(records, spec), "periods.csv")
    out = getattr(args, "out", None)
    if out:
        grid = abm.grid
        for t, rec in enumerate(records, start=1):
            lines = ["x,count"]
            for x, n in zip(grid.centers, rec.content_hist):
                lines.append(f"{_fmt(x)},{int(n)}")
            (Path(out) / f"hist_t{t:02d}.csv").write_text("\n".join(lines) + "\n")
    final = collapse_metrics(records[-1].contents, spec)
    collapsed = final["central_mass"] > 0.5
    report = {
        "total_Pi": float(sum(r.Pi for r in records)),
        "total_R": float(sum(r.R for r in records)),
        "final_metrics": final,
        "collapse": collapsed,
        "all_converged": all(r.rounds_used < abm.max_rounds for r in records),
    }
    _emit(args, json.dumps(report, indent=2) + "\n", "multiperiod.json")
    return EXIT_OK if report["all_converged"] else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    params = _params(args, cfg)
    p, g = _densities(args, cfg)
    sol_file = _get(args, cfg, "solution", required=True)
    try:
        with open(sol_file) as fh:
            payload = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CliError(f"failed to read solution file: {exc}")
    if "beta_AI" not in payload or "q" not in payload:
        raise CliError("solution file carries no equilibrium (beta_AI/q missing)")
    from .equilibrium import EquilibriumSolution

    scheme = None
    if "scheme" in payload:
        scheme = RevenueThresholdScheme(payload["scheme"]["v_bar"], payload["scheme"]["w"])
    reduced = None
    if "reduced_scheme" in payload:
        reduced = RevenueThresholdScheme(
            payload["reduced_scheme"]["v_bar"], payload["reduced_scheme"]["w"]
        )
    q = DensityField.from_json(payload["q"], floor=1e-300)
    sol = EquilibriumSolution(
        scheme=scheme,
        classification=Classification(payload["classification"]),
        beta_AI=np.asarray(payload["beta_AI"], dtype=float),
        q=q,
        region_in=np.array([tag == "IN" for tag in payload.get("region", [])])
        if payload.get("region") else None,
        reduced_scheme=reduced,
    )
    rep = verify_equilibrium(sol, p, g, params)
    out = {"consistency_residual": rep.consistency, "incentive_residual": rep.incentive}
    _emit(args, json.dumps(out, indent=2) + "\n", "verify.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genaimarket",
        description="Equilibria and simulations of a creator market with generative-AI content",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.set_defaults(fn=fn)
        sp.add_argument("--config", help="JSON config manifest; flags override fields")
        sp.add_argument("--seed", type=int, help="RNG seed")
        sp.add_argument("--out", help="output directory (default: stdout)")
        sp.add_argument("--grid-cells", type=int, help="grid resolution where applicable")
        return sp

    sp = add("pregenai", cmd_pregenai, "pre-GenAI equilibrium and optimal flat compensation")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--cost", type=float)
    sp.add_argument("--W", type=float, help="flat compensation (omit to optimize)")

    for name, fn, helptext, with_scheme in (
        ("solve", cmd_solve, "solve/classify an equilibrium at (v_bar, w)", True),
        ("classify", cmd_classify, "classify a compensation scheme", True),
        ("curve", cmd_curve, "profit curve over thresholds", False),
        ("optimize", cmd_optimize, "profit-maximizing threshold", False),
        ("verify", cmd_verify, "recheck residuals of a solution JSON", False),
    ):
        sp = add(name, fn, helptext)
        sp.add_argument("--p-file", help="consumer preference density CSV (x,value)")
        sp.add_argument("--g-file", help="generative model density CSV (x,value)")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--cost", type=float)
        if with_scheme:
            sp.add_argument("--v-bar", type=float)
            sp.add_argument("--w", type=float)
            sp.add_argument(
                "--assume-large-w",
                action="store_true",
                default=None,
                help="treat any bonus above the implied level as the implied level",
            )
        if name == "curve":
            sp.add_argument("--n-points", type=int)
        if name == "verify":
            sp.add_argument("--solution", help="equilibrium JSON produced by solve")

    sp = add("twolevel", cmd_twolevel, "closed forms for the two-level model")
    sp.add_argument("--g-low", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--cost", type=float)
    sp.add_argument("--v-bar", type=float)

    for name, fn, helptext in (
        ("simulate", cmd_simulate, "single-period finite-population simulation"),
        ("multiperiod", cmd_multiperiod, "multi-period simulation with model retraining"),
    ):
        sp = add(name, fn, helptext)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--cost", type=float)
        sp.add_argument("--v-bar", type=float)
        sp.add_argument("--w", type=float)
        sp.add_argument("--n-agents", type=int)
        sp.add_argument("--n-bins", type=int)
        sp.add_argument("--max-rounds", type=int)
        sp.add_argument("--convergence-tv", type=float)
        sp.add_argument("--train-frac", type=float)
        sp.add_argument("--bandwidth", type=float)
        sp.add_argument("--shrink", type=float)
        if name == "multiperiod":
            sp.add_argument("--periods", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
