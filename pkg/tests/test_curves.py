import numpy as np
import pytest

from firstarrival.curves import DistributionCurve, empirical_cdf, ks_distance


def test_single_sample_steps_once():
    c = empirical_cdf([3.5])
    assert c.cdf_at(3.4999) == 0.0
    assert c.cdf_at(3.5) == 1.0
    assert c.kind == "step"


def test_empirical_cdf_rejects_empty():
    with pytest.raises(ValueError):
        empirical_cdf([])


def test_ties_collapse():
    c = empirical_cdf([1.0, 1.0, 2.0, 3.0])
    assert np.array_equal(c.grid, [1, 2, 3])
    assert np.allclose(c.cdf, [0.5, 0.75, 1.0])


def test_ks_identical_is_zero():
    c = empirical_cdf(np.arange(10.0))
    assert ks_distance(c, c) == 0.0


def test_ks_between_shifted_steps():
    a = empirical_cdf([0.0])
    b = empirical_cdf([1.0])
    assert ks_distance(a, b) == 1.0


def test_ks_against_exact_uniform(rng):
    x = rng.random(20000)
    grid = np.linspace(0, 1, 101)
    exact = DistributionCurve(grid, np.ones_like(grid), grid.copy(), cdf_fn=lambda s: np.clip(s, 0, 1))
    # Dvoretzky-Kiefer-Wolfowitz at 1e-6 failure probability
    assert ks_distance(empirical_cdf(x), exact) < np.sqrt(np.log(2 / 1e-6) / (2 * x.size))


def test_shift_moves_grid_and_functions():
    grid = np.linspace(0, 1, 11)
    c = DistributionCurve(grid, np.ones_like(grid), grid.copy(), cdf_fn=lambda s: np.clip(s, 0, 1))
    s = c.shifted(5.0, quantity="moved")
    assert np.allclose(s.grid, grid + 5)
    assert s.cdf_at(5.5) == pytest.approx(0.5)
    assert s.meta["quantity"] == "moved"
