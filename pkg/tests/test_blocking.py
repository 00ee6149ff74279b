import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from firstarrival.blocking import (
    BooleanModelParams,
    DiscreteUniform,
    expected_dilated_measure,
    visibility_probability,
)
from firstarrival.geometry import TestLink, dilated_segment_measure

pytestmark = pytest.mark.property


@st.composite
def models(draw):
    density = draw(st.floats(1, 200))
    wlo = draw(st.floats(1, 50))
    wn = draw(st.integers(1, 6))
    whi = wlo if wn == 1 else wlo + draw(st.floats(1, 80))
    olo = draw(st.floats(1, 60))
    on = draw(st.integers(1, 8))
    ohi = olo if on == 1 else draw(st.floats(olo + 0.5, 89))
    return BooleanModelParams.from_field_units(density, (wlo, whi, wn), (olo, ohi, on))


points = st.tuples(st.floats(-2000, 2000), st.floats(-2000, 2000)).map(np.array)


def test_discrete_uniform_moments():
    u = DiscreteUniform(10, 40, 4)
    assert np.array_equal(u.support, [10, 20, 30, 40])
    assert u.mean == 25
    assert u.second_moment == pytest.approx((100 + 400 + 900 + 1600) / 4)


@pytest.mark.parametrize(
    "args",
    [(10, 40, 1), (10, 10, 2), (40, 10, 4), (10, 40, 0), (10, 40, 2.5), (float("inf"), 40, 3)],
)
def test_discrete_uniform_rejects(args):
    with pytest.raises(ValueError):
        DiscreteUniform(*args)


def test_model_rejects_closed_orientation_ends():
    with pytest.raises(ValueError):
        BooleanModelParams.from_field_units(10, (10, 40, 4), (0, 80, 8))
    with pytest.raises(ValueError):
        BooleanModelParams.from_field_units(10, (10, 40, 4), (10, 90, 8))
    with pytest.raises(ValueError):
        BooleanModelParams.from_field_units(0, (10, 40, 4), (10, 80, 8))


def test_field_units_conversion():
    m = BooleanModelParams.from_field_units(60, (10, 40, 4), (10, 80, 8))
    assert m.density == pytest.approx(60e-6)
    assert np.allclose(np.degrees(m.thetas), np.linspace(10, 80, 8))


def test_sampling_stays_on_support(rng):
    u = DiscreteUniform(10, 40, 4)
    draws = u.sample(rng, 4000)
    assert set(np.unique(draws)) == {10, 20, 30, 40}
    assert np.array_equal(u.from_uniform(np.array([0.0, 0.2499, 0.25, 0.9999999])), [10, 10, 20, 40])


@given(models(), points, points)
def test_expected_measure_matches_brute_average(model, p, q):
    brute = np.mean(
        [dilated_segment_measure(p, q, w, th) for w in model.widths.support for th in model.thetas]
    )
    assert expected_dilated_measure(p, q, model) == pytest.approx(brute, rel=1e-10, abs=1e-9)


@given(models(), points)
def test_visibility_invariant_under_point_reflection(model, r):
    link = TestLink(300)
    assert visibility_probability(r, model, link) == pytest.approx(
        visibility_probability(-r, model, link), rel=1e-12
    )


@given(models(), st.floats(0, 2 * math.pi), st.floats(0, 3000), st.floats(0, 3000))
def test_visibility_nonincreasing_along_rays(model, phi, t1, t2):
    link = TestLink(300)
    u = np.array([math.cos(phi), math.sin(phi)])
    near, far = sorted((t1, t2))
    assert visibility_probability(far * u, model, link) <= visibility_probability(near * u, model, link) * (1 + 1e-12)


@given(models(), points)
def test_visibility_bounds(model, r):
    link = TestLink(300)
    rho = visibility_probability(r, model, link)
    # both legs always pay at least one square area
    assert 0 <= rho <= math.exp(-2 * model.density * model.widths.second_moment) * (1 + 1e-12)


def test_visibility_vectorised_shape(street_model, street_link):
    pts = np.zeros((3, 5, 2))
    assert visibility_probability(pts, street_model, street_link).shape == (3, 5)
