"""Ten periods of recursive retraining: model collapse with and without pay.

Each period the platform refits its generative model on the previous
period's contents.  Without compensation the content pool drifts toward the
center and the refit model collapses onto it; a threshold bonus keeps manual
creators at the preference modes and the model anchored there.
"""

import numpy as np

from genaimarket import (
    ABMConfig,
    MarketParams,
    PLATFORM_MIXTURE,
    RevenueThresholdScheme,
    collapse_metrics,
    run_multiperiod,
)

SCHEMES = [
    ("no compensation", RevenueThresholdScheme(0.110, 0.0)),
    ("bonus 0.15 at 0.105", RevenueThresholdScheme(0.105, 0.150)),
]


def main():
    params = MarketParams(alpha=0.5, gamma=0.9, cost=0.1)
    for label, scheme in SCHEMES:
        cfg = ABMConfig(
            n_agents=26500,
            n_bins=100,
            params=params,
            scheme=scheme,
            seed=0,
            max_rounds=50,
            train_bandwidth=0.8,
            shrink=0.5,
        )
        records = run_multiperiod(cfg, PLATFORM_MIXTURE, 10)
        print(f"\n=== {label} (v_bar={scheme.v_bar}, w={scheme.w}) ===")
        print("  t     R       Pi    manual  central  modal   tv_to_p")
        for t, rec in enumerate(records, start=1):
            m = collapse_metrics(rec.contents, PLATFORM_MIXTURE)
            print(
                f"  {t:2d}  {rec.R:.4f}  {rec.Pi:.4f}  {rec.manual_fraction:.3f}"
                f"   {m['central_mass']:.3f}   {m['modal_mass']:.3f}   {m['tv_to_p']:.3f}"
            )
        total = sum(r.Pi for r in records)
        print(f"  ten-period profit: {total:.3f}")


if __name__ == "__main__":
    main()
