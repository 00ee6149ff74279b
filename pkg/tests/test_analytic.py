import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firstarrival import analytic
from firstarrival.analytic import (
    ToaDistribution,
    bias_from_toa,
    branch_integrals,
    intensity,
    no_visible_reflection_probability,
    toa_with_blocking,
    toa_without_blocking,
)
from firstarrival.blocking import BooleanModelParams
from firstarrival.geometry import DomainError, TestLink

# frozen from an independent high-precision run of the same setup
STREET_LAMBDA_HAT_350_INF = 0.83517


def test_intensity_regression(street_model, street_link):
    res = intensity(350.0, math.inf, street_model, street_link)
    assert res.value == pytest.approx(STREET_LAMBDA_HAT_350_INF, abs=1e-5)
    assert res.tail_error_bound < 1e-9
    assert res.per_quadrant_per_orientation.shape == (8, 2)
    assert res.per_quadrant_per_orientation.sum() == pytest.approx(res.value, rel=1e-12)


def test_intensity_is_additive(street_model, street_link):
    a = intensity(350, 600, street_model, street_link).value
    b = intensity(600, 2000, street_model, street_link).value
    c = intensity(350, 2000, street_model, street_link).value
    assert a + b == pytest.approx(c, abs=1e-9)


def test_intensity_empty_window(street_model, street_link):
    assert intensity(500, 500, street_model, street_link).value == 0.0


def test_intensity_rejects_bad_window(street_model, street_link):
    with pytest.raises(DomainError):
        intensity(300, 500, street_model, street_link)
    with pytest.raises(DomainError):
        intensity(600, 500, street_model, street_link)


def test_unblocked_intensity_matches_closed_form(street_model, street_link):
    for s in (351.0, 500.0, 2000.0, 1e4):
        numeric = intensity(350, s, street_model, street_link, blocking=False).value
        closed = float(analytic._unblocked_exponent(np.array(s), street_model, street_link))
        assert numeric == pytest.approx(closed, rel=1e-8)


def test_unblocked_infinite_window_is_infinite(street_model, street_link):
    assert intensity(350, math.inf, street_model, street_link, blocking=False).value == math.inf


def test_blocking_never_increases_count(street_model, street_link):
    for s in (400.0, 1000.0, 5000.0):
        assert intensity(350, s, street_model, street_link).value <= intensity(
            350, s, street_model, street_link, blocking=False
        ).value


def test_branch_integrals_bounded(street_model, street_link):
    rate = 2 * street_model.density * street_model.mean_width
    assert np.all(branch_integrals(street_model, street_link) <= 1 / rate)


def test_no_visible_probability(street_model, street_link):
    p0 = no_visible_reflection_probability(street_model, street_link)
    assert p0 == pytest.approx(math.exp(-STREET_LAMBDA_HAT_350_INF), rel=1e-4)
    assert p0 > math.exp(-2)


@pytest.fixture(scope="module")
def street_toa(street_model, street_link):
    return ToaDistribution(street_model, street_link)


def test_count_density_kernel_matches_reference(street_toa):
    s = 350 + np.geomspace(1e-3, 2e4, 300)
    assert np.allclose(street_toa.count_density(s), street_toa.count_density_reference(s), rtol=1e-12, atol=0)


def test_mean_count_matches_intensity(street_toa, street_model, street_link):
    for s in (360.0, 700.0, 3000.0):
        assert street_toa.mean_count(s) == pytest.approx(intensity(350, s, street_model, street_link).value, abs=1e-9)


def test_pdf_is_derivative_of_cdf(street_toa):
    for s in (352.0, 500.0, 1500.0, 4000.0):
        h = 1e-3
        fd = (street_toa.cdf(s + h) - street_toa.cdf(s - h)) / (2 * h)
        assert street_toa.pdf(s) == pytest.approx(fd, rel=1e-5)


def test_cdf_boundaries(street_toa):
    assert street_toa.cdf(350.0) == 0.0
    assert street_toa.cdf(1e7) == pytest.approx(1.0, abs=1e-9)


def test_quantile_inverts_cdf(street_toa):
    for p in (0.01, 0.5, 0.99, 1 - 1e-6):
        assert street_toa.cdf(street_toa.quantile(p)) == pytest.approx(p, abs=1e-10)


def test_curve_mass(street_model, street_link):
    c = toa_with_blocking(street_model, street_link, points=400)
    assert c.cdf[0] == 0.0
    assert np.all(np.diff(c.cdf) >= 0)
    assert c.trapezoid_mass() == pytest.approx(c.cdf[-1], abs=5e-3)
    assert c.meta["lambda_hat_inf"] == pytest.approx(STREET_LAMBDA_HAT_350_INF, abs=1e-5)


def test_unblocked_curve_is_unconditioned(street_model, street_link):
    c = toa_without_blocking(street_link, street_model)
    s = c.grid
    expected = -np.expm1(-analytic._unblocked_exponent(s, street_model, street_link))
    assert np.allclose(c.cdf, expected, rtol=1e-12, atol=0)


def test_bias_is_shifted_toa(street_model, street_link):
    toa = toa_with_blocking(street_model, street_link)
    bias = bias_from_toa(toa, street_link)
    assert np.allclose(bias.grid, toa.grid - 350)
    assert bias.cdf_at(100.0) == pytest.approx(toa.cdf_at(450.0), abs=1e-15)


def test_exponent_slope_tends_to_exponential_rate(street_model, street_link):
    slope = analytic._unblocked_exponent_slope(np.array(350 * 1001.0), street_model, street_link)
    assert slope == pytest.approx(2 * street_model.density * street_model.mean_width, rel=1e-3)


@settings(max_examples=15)
@given(
    st.floats(1, 200),
    st.floats(20, 1000),
    st.integers(1, 5),
    st.integers(1, 6),
)
@pytest.mark.property
def test_corollary_bound_property(density, d, wn, on):
    model = BooleanModelParams.from_field_units(density, (5, 5 + 20 * (wn - 1), wn) if wn > 1 else (5, 5, 1),
                                                (15, 15 + 12 * (on - 1), on) if on > 1 else (15, 15, 1))
    lam = intensity(d, math.inf, model, TestLink(d)).value
    assert lam < 2
