"""Which textbook distribution best stands in for the range bias?

Matches gamma, exponential, half-normal and Rayleigh laws to the bias moments
and ranks them by KL divergence.  The gamma law uses both moments and wins
every row; among one-parameter laws the exponential comes closest.
"""

from firstarrival import BooleanModelParams, Family, TestLink, ToaDistribution, bias_from_toa
from firstarrival.approx import MOMENT_COVERAGE, bias_moments, exponential_bias_rate, fit_family, kl_divergence

link = TestLink(200)
print("density  " + "  ".join(f"{f.value:>11s}" for f in Family) + "   rate 2*lambda*E[W] vs fitted")
for density in (10, 40, 70):
    model = BooleanModelParams.from_field_units(density, (20, 100, 5), (10, 80, 8))
    bias = bias_from_toa(ToaDistribution(model, link).curve(points=400, coverage=MOMENT_COVERAGE), link)
    moments = bias_moments(bias)
    kls = [kl_divergence(fit_family(f, moments), bias) for f in Family]
    fitted_rate = fit_family(Family.EXPONENTIAL, moments).params[0]
    print(f"{density:7d}  " + "  ".join(f"{k:11.4f}" for k in kls) + f"   {exponential_bias_rate(model):.5f} vs {fitted_rate:.5f}")
