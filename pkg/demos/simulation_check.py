"""Brute-force check of the analytic path-length law.

Draws Boolean-model realizations, finds each one's first visible reflection
and compares the empirical distribution with the analytic one.  Independent
blocking mirrors the analysis exactly; correlated blocking is what a real
street layout does.  Raise REALIZATIONS for tighter numbers.
"""

from firstarrival import (
    BlockingMode,
    BooleanModelParams,
    SimulationConfig,
    TestLink,
    ToaDistribution,
    empirical_cdf,
    ks_distance,
    simulate_first_arrival,
)

REALIZATIONS = 5_000

model = BooleanModelParams.from_field_units(60, (10, 40, 4), (10, 80, 8))
for d, modes in ((350, (BlockingMode.INDEPENDENT, BlockingMode.CORRELATED)), (80, (BlockingMode.CORRELATED_LOS_BLOCKED,))):
    link = TestLink(d)
    analytic = ToaDistribution(model, link)
    curve = analytic.curve(points=400)
    for mode in modes:
        res = simulate_first_arrival(SimulationConfig(model, link, mode, REALIZATIONS, seed=1), analytic)
        ks = ks_distance(empirical_cdf(res.s), curve)
        diag = res.diagnostics
        print(f"d={d:4d} m  {mode.value:24s} KS={ks:.4f}  kept {diag['kept']} of {diag['attempts']} attempts")
