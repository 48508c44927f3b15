"""Mean-field equilibria of a creator platform with generative-AI content.

Creators on a one-dimensional preference space choose between costly manual
creation and free sampling from a generative model; the platform pays a flat
bonus to any content whose raw revenue reaches a threshold. The package
computes the resulting equilibria, classifies compensation schemes, optimizes
the threshold, evaluates the two-level closed forms, and runs finite-population
single- and multi-period simulations of recursive model retraining.
"""

from .densities import (
    DEFAULT_FLOOR,
    DensityField,
    Grid,
    MarketParams,
    RatioDistribution,
    RevenueThresholdScheme,
    XBasedScheme,
    build_grid,
    density_from_values,
    ratio_distribution,
)
from .market import (
    CreatorStrategy,
    ai_posterior,
    compensated_revenue,
    content_distribution,
    creator_revenue,
    genai_expected_revenue,
    platform_profit,
    platform_revenue,
    pregenai_equilibrium,
    pregenai_optimal,
)
from .equilibrium import (
    Classification,
    EquilibriumSolution,
    InteriorQuantities,
    OptimizeResult,
    ResidualReport,
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
from .twolevel import (
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
from .simulation import (
    ABMConfig,
    PLATFORM_MIXTURE,
    GenerativeModel,
    MixtureSpec,
    PeriodRecord,
    bin_revenue,
    collapse_metrics,
    fit_generative,
    run_multiperiod,
    periods_to_csv,
    preference_mixture,
    run_period,
    sample_mixture,
    silverman_bandwidth,
)

__version__ = "0.1.0"
