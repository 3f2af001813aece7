import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlasov_linear.errors import QuadratureFailure, UnderResolvedCurve
from vlasov_linear.numerics import (adaptive_panels, cauchy_derivative, fit_power_law, uniform_growth_ok,
                                    winding_number)


@given(st.floats(-4, 4), st.floats(0.1, 10))
def test_fit_power_law_recovers_exact_power(p, c):
    x = np.array([0.1, 0.2, 0.4, 0.8])
    slope, const, deg = fit_power_law(x, c * x**p)
    assert not deg
    assert slope == pytest.approx(p, abs=1e-9)
    assert const == pytest.approx(c, rel=1e-9)


def test_fit_power_law_degenerate():
    assert fit_power_law([1.0, 1.0], [2.0, 3.0])[2]
    assert fit_power_law([1.0, 2.0], [0.0, 0.0])[2]


@given(st.complex_numbers(max_magnitude=2), st.integers(1, 3))
def test_cauchy_derivative_of_exponential(z, order):
    d = cauchy_derivative(np.exp, complex(z), 0.3, n=48, order=order)
    assert abs(d - np.exp(z)) <= 1e-12 * max(1.0, abs(np.exp(z)))


@pytest.mark.parametrize("n", [0, 1, 3, -2])
def test_winding_number_of_monomial(n):
    w, _, _ = winding_number(lambda s: np.exp(1j * n * s) * (2 + np.cos(3 * s)), 0.0, 2 * math.pi)
    assert w == n


def test_winding_number_flags_curve_through_origin():
    with pytest.raises(UnderResolvedCurve):
        winding_number(lambda s: np.exp(1j * s) - 1.0, 0.0, 2 * math.pi, max_points=5000)


def test_uniform_growth():
    assert uniform_growth_ok(np.exp(-np.linspace(0, 5, 20)))
    assert not uniform_growth_ok(np.exp(np.linspace(0, 5, 20)))


@given(st.floats(1e-3, 0.2))
def test_adaptive_panels_resolve_near_pole(eps):
    # int_0^4 eps / (x^2 + eps^2) dx = atan(4 / eps)
    x, w, v = adaptive_panels(lambda x: eps / (x * x + eps * eps), 0.0, 4.0, 0.25)
    assert abs(np.sum(w * v).real - math.atan(4 / eps)) < 1e-11


def test_adaptive_panels_gives_up_on_singularity():
    with pytest.raises(QuadratureFailure):
        adaptive_panels(lambda x: 1 / np.abs(x - 0.3) ** 1.5, 0.0, 1.0, 0.25, max_panels=2000)
