import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from firstarrival.approx import (
    BiasMoments,
    Family,
    FittedFamily,
    MomentMatching,
    bias_moments,
    exponential_bias_rate,
    fit_family,
    kl_divergence,
)
from firstarrival.curves import DistributionCurve

moment_pairs = st.tuples(st.floats(0.1, 1e3), st.floats(0.01, 10)).map(
    lambda t: BiasMoments(t[0], t[0] ** 2 * (1 + t[1]))
)


def _curve_of(dist, hi_q=1 - 1e-13, n=4000):
    x = np.concatenate([[0.0], np.geomspace(1e-6 * dist.ppf(0.5), dist.ppf(hi_q), n)])
    return DistributionCurve(x, dist.pdf(x), dist.cdf(x), pdf_fn=dist.pdf, cdf_fn=dist.cdf)


@pytest.mark.property
@given(moment_pairs)
def test_gamma_matches_both_moments(m):
    fitted = fit_family(Family.GAMMA, m)
    m1, m2 = fitted.moments()
    assert m1 == pytest.approx(m.m1, rel=1e-9)
    assert m2 == pytest.approx(m.m2, rel=1e-9)


@pytest.mark.property
@given(moment_pairs, st.sampled_from([Family.EXPONENTIAL, Family.HALF_NORMAL, Family.RAYLEIGH]))
def test_one_parameter_families_match_their_moment(m, family):
    first = fit_family(family, m, MomentMatching.FIRST).moments()
    second = fit_family(family, m, MomentMatching.SECOND).moments()
    assert first[0] == pytest.approx(m.m1, rel=1e-9)
    assert second[1] == pytest.approx(m.m2, rel=1e-9)


def test_parameter_conventions():
    m = BiasMoments(2.0, 8.0)
    assert fit_family(Family.EXPONENTIAL, m).params == (0.5,)
    shape, rate = fit_family(Family.GAMMA, m).params
    assert shape == pytest.approx(1.0) and rate == pytest.approx(0.5)


def test_moment_validation():
    with pytest.raises(ValueError):
        BiasMoments(0.0, 1.0)
    with pytest.raises(ValueError):
        BiasMoments(2.0, 4.0)
    with pytest.raises(ValueError):
        FittedFamily(Family.EXPONENTIAL, (-1.0,))


def test_moments_of_exact_gamma_curve():
    dist = stats.gamma(2.5, scale=30.0)
    m = bias_moments(_curve_of(dist))
    assert m.m1 == pytest.approx(dist.moment(1), rel=1e-8)
    assert m.m2 == pytest.approx(dist.moment(2), rel=1e-8)


def test_moments_need_coverage():
    dist = stats.expon(scale=10.0)
    with pytest.raises(ValueError):
        bias_moments(_curve_of(dist, hi_q=0.99))


def test_kl_zero_for_identical_law():
    dist = stats.gamma(1.7, scale=40.0)
    fitted = fit_family(Family.GAMMA, bias_moments(_curve_of(dist)))
    assert kl_divergence(fitted, _curve_of(dist)) == pytest.approx(0.0, abs=1e-7)


def test_kl_known_value_between_exponentials():
    # KL(Exp(a) || Exp(b)) = log(a/b) + b/a - 1
    a, b = 0.5, 0.2
    curve = _curve_of(stats.expon(scale=1 / b))
    got = kl_divergence(FittedFamily(Family.EXPONENTIAL, (a,)), curve)
    assert got == pytest.approx(math.log(a / b) + b / a - 1, abs=1e-8)


def test_kl_floor_hits_warn():
    # bias with bounded support: the surrogate's tail hits the floor
    x = np.linspace(0, 1, 200)
    unif = stats.uniform(0, 1)
    curve = DistributionCurve(x, unif.pdf(x), unif.cdf(x), pdf_fn=unif.pdf, cdf_fn=unif.cdf)
    with pytest.warns(RuntimeWarning, match="below"):
        rep = kl_divergence(FittedFamily(Family.EXPONENTIAL, (2.0,)), curve, full_output=True)
    assert rep.floor_hits > 0


def test_exponential_rate(street_model):
    assert exponential_bias_rate(street_model) == pytest.approx(2 * 60e-6 * 25)
