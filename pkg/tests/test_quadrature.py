import math

import numpy as np
import pytest

from firstarrival._quadrature import QuadratureError, adaptive_legendre


def test_polynomial_exact():
    out = adaptive_legendre(lambda x: 3 * x**2, [0.0, 1.0], [1.0, 2.0], 1e-12)
    assert np.allclose(out, [1.0, 7.0], rtol=1e-14)


def test_kinked_integrand():
    # |x - 1/3| has a derivative jump inside the interval
    out = adaptive_legendre(lambda x: np.abs(x - 1 / 3), 0.0, 1.0, 1e-12)
    assert out[0] == pytest.approx(1 / 18 + 2 / 9, abs=1e-11)


def test_unbounded_derivative_at_endpoint():
    out = adaptive_legendre(np.sqrt, 0.0, 1.0, 1e-12)
    assert out[0] == pytest.approx(2 / 3, abs=1e-11)


def test_empty_interval_is_zero():
    assert adaptive_legendre(np.exp, 1.0, 1.0, 1e-10)[0] == 0.0


def test_max_length_presplit():
    out = adaptive_legendre(np.cos, 0.0, 200 * math.pi + 1, 1e-10, max_length=5.0)
    assert out[0] == pytest.approx(math.sin(1.0), abs=1e-9)


def test_nonconvergence_raises():
    with pytest.raises(QuadratureError):
        adaptive_legendre(lambda x: np.sin(1 / x), 1e-9, 1.0, 1e-14, max_rounds=3)
