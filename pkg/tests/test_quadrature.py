import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from weibull_ratio_chart.errors import QuadratureError
from weibull_ratio_chart.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    gauss_kronrod_rule,
    integrate,
)


def test_rule_weights_sum_to_interval_length():
    assert math.isclose(KRONROD_WEIGHTS.sum(), 2.0, rel_tol=1e-15)
    assert math.isclose(GAUSS_WEIGHTS.sum(), 2.0, rel_tol=1e-15)
    assert np.allclose(NODES, -NODES[::-1], atol=0)


@pytest.mark.parametrize("degree", range(0, 32))
def test_kronrod_exact_for_polynomials_up_to_degree_31(degree):
    k, _ = gauss_kronrod_rule(lambda x: x**degree, 0.0, 1.0)
    assert k[0] == pytest.approx(1.0 / (degree + 1), rel=1e-13)


@pytest.mark.parametrize("degree", range(0, 20))
def test_embedded_gauss_exact_to_degree_19(degree):
    k, err = gauss_kronrod_rule(lambda x: x**degree, -1.0, 2.0)
    exact = (2.0 ** (degree + 1) - (-1.0) ** (degree + 1)) / (degree + 1)
    assert k[0] == pytest.approx(exact, rel=1e-13)
    assert err[0] <= 1e-12 * max(1.0, abs(exact))


@given(
    st.floats(-10, 10, allow_nan=False),
    st.floats(0.01, 20, allow_nan=False),
)
def test_sine_antiderivative(a, width):
    b = a + width
    val, _ = integrate(np.sin, a, b, rtol=1e-12, atol=1e-13)
    assert val == pytest.approx(math.cos(a) - math.cos(b), abs=1e-11)


@pytest.mark.parametrize(
    "f, a, b",
    [
        (lambda x: np.exp(-x) * np.sqrt(x), 0.0, 10.0),
        (lambda x: 1.0 / (1.0 + x**2), -3.0, 5.0),
        (lambda x: np.log(x) ** 2, 1e-9, 1.0),
        (lambda x: np.exp(-50 * (x - 0.3) ** 2), 0.0, 1.0),
    ],
)
def test_matches_scipy_quad(f, a, b):
    val, _ = integrate(f, a, b, rtol=1e-11)
    ref, _ = sp_integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    assert val == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("shape", [0.7, 1.0, 3.5, 20.0])
def test_half_line_gamma_density(shape):
    def f(x):
        with np.errstate(divide="ignore"):
            return np.exp((shape - 1) * np.log(x) - x - math.lgamma(shape))

    val, _ = integrate(f, 0.0, np.inf, rtol=1e-11)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_vector_integrand_returns_each_component():
    val, err = integrate(lambda x: np.vstack([np.ones_like(x), x, x**2]), 0.0, 3.0)
    assert val.shape == (3,) and err.shape == (3,)
    assert np.allclose(val, [3.0, 4.5, 9.0], rtol=1e-13)


def test_scalar_integrand_returns_floats():
    val, err = integrate(lambda x: x, 0.0, 1.0)
    assert isinstance(val, float) and isinstance(err, float)


def test_non_convergence_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda x: 1.0 / x, 1e-300, 1.0, limit=3)


def test_non_finite_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_bad_limits():
    with pytest.raises(ValueError):
        integrate(np.cos, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate(np.cos, -np.inf, np.inf)
