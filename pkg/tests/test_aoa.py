import math

import numpy as np
import pytest

from firstarrival.analytic import ToaDistribution
from firstarrival.aoa import (
    AngleIntervalSet,
    Interval,
    aoa_bin_probabilities,
    aoa_support,
    atom_weights,
    conditional_aoa_atoms,
    lobe_interval,
    marginal_aoa_pdf,
)
from firstarrival.blocking import BooleanModelParams
from firstarrival.geometry import DomainError, TestLink

LINK = TestLink(350)


def _deg(iset):
    return [(round(lo, 9), round(hi, 9), lc, hc) for lo, hi, lc, hc in iset.in_degrees()]


def test_single_orientation_support(single_orientation_model):
    assert _deg(aoa_support(single_orientation_model)) == [
        (60.0, 120.0, False, True),
        (150.0, 240.0, False, False),
        (300.0, 330.0, True, False),
    ]


def test_three_orientation_support_merges():
    model = BooleanModelParams.from_field_units(30, (10, 40, 4), (20, 60, 3))
    assert _deg(aoa_support(model)) == [(20.0, 330.0, False, False)]


def test_union_keeps_gap_between_open_ends():
    iset = AngleIntervalSet.union([Interval(0, 1), Interval(1, 2)])
    assert len(iset.intervals) == 2
    assert not iset.contains(1.0)
    iset = AngleIntervalSet.union([Interval(0, 1, hi_closed=True), Interval(1, 2)])
    assert len(iset.intervals) == 1


@pytest.mark.parametrize("s", [350.5, 400.0, 1000.0, 1e5])
def test_conditional_atoms(street_model, s):
    atoms = conditional_aoa_atoms(s, street_model, LINK)
    assert len(atoms) == 4 * street_model.thetas.size
    assert math.fsum(a.weight for a in atoms) == pytest.approx(1.0, abs=1e-12)
    assert all(a.weight > 0 for a in atoms)
    for a in atoms:
        iv = lobe_interval(a.quadrant, a.orientation)
        assert iv.contains(a.angle % (2 * math.pi), slack=1e-12)


def test_conditional_atoms_need_excess_length(street_model):
    with pytest.raises(DomainError):
        conditional_aoa_atoms(350.0, street_model, LINK)


def test_atom_weights_match_conditional(street_model):
    s = 600.0
    w = atom_weights(s, street_model, LINK)
    atoms = conditional_aoa_atoms(s, street_model, LINK)
    # atoms are listed orientation-major, quadrant-minor
    ours = np.array([a.weight for a in atoms]).reshape(-1, 4).T
    assert np.allclose(w / w.sum(), ours, rtol=1e-10)


@pytest.fixture(scope="module")
def single_toa(single_orientation_model):
    return ToaDistribution(single_orientation_model, LINK)


def test_marginal_zero_off_support(single_orientation_model, single_toa):
    alpha = np.radians(np.arange(0.5, 360, 1.0))
    pdf = marginal_aoa_pdf(alpha, single_orientation_model, LINK, single_toa)
    inside = aoa_support(single_orientation_model).contains(alpha)
    assert np.all(pdf[~inside] == 0)
    assert np.all(pdf >= 0)
    assert np.any(pdf[inside] > 0)


def test_marginal_integrates_to_one(single_orientation_model, single_toa):
    edges = np.radians(np.arange(0, 361, 1.0))
    p = aoa_bin_probabilities(edges, single_orientation_model, LINK, single_toa)
    assert p.sum() == pytest.approx(1.0, abs=1e-6)
    assert np.all(p >= 0)


def test_lobe_mass_matches_quadrant_share(single_orientation_model, single_toa):
    # mass of a lobe is the probability that quadrant wins, integrated over s
    iv = lobe_interval(1, math.radians(60))
    lobe = aoa_bin_probabilities(np.array([iv.lo, iv.hi]), single_orientation_model, LINK, single_toa)[0]
    s = single_toa.default_grid(4000)
    w = atom_weights(s, single_orientation_model, LINK)
    share = w[0, 0] / w.reshape(-1, s.size).sum(axis=0)
    expect = np.trapezoid(share * single_toa.pdf(s), s)
    assert lobe == pytest.approx(expect, abs=2e-3)
