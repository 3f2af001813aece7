import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from vlasov_linear import dispersion_function as df
from vlasov_linear import equilibria as E
from vlasov_linear.errors import DomainError, TailClassMismatch

MX = E.maxwellian()
GP = {j: E.generalized_poisson(j) for j in (1, 2, 3)}
CLOSED = [MX, GP[1], GP[2], GP[3]]


def direct_cauchy(eq, z):
    """int m0'(t)/(t-z) dt on the real line; valid off the axis only."""
    re = integrate.quad(lambda t: (complex(eq.dm0(t)) / (t - z)).real, -np.inf, np.inf, epsabs=1e-13, limit=400)[0]
    im = integrate.quad(lambda t: (complex(eq.dm0(t)) / (t - z)).imag, -np.inf, np.inf, epsabs=1e-13, limit=400)[0]
    return complex(re, im)


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
def test_value_at_origin(eq):
    oracle = 2 * integrate.quad(lambda t: float(eq.dm0(t).real) / t, 0, np.inf, epsabs=1e-14)[0]
    assert df.k_value(eq, 0.0) == pytest.approx(oracle, abs=1e-10)
    assert df.k_quadrature(eq, 0.0) == pytest.approx(oracle, abs=1e-10)


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
@settings(max_examples=10)
@given(x=st.floats(-5, 5), y=st.floats(0.8, 3.0))
def test_lower_half_plane_is_cauchy_integral(eq, x, y):
    z = complex(x, -y)
    assert abs(df.k_value(eq, z) - direct_cauchy(eq, z)) < 1e-9


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
@settings(max_examples=10)
@given(x=st.floats(-5, 5), frac=st.floats(0.3, 0.9))
def test_upper_half_plane_continuation(eq, x, frac):
    z = complex(x, frac * eq.theta_prime * (1 + abs(x)))
    expected = direct_cauchy(eq, z) - 2j * math.pi * complex(eq.dm0(z))
    assert abs(df.k_value(eq, z) - expected) < 1e-9


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
@settings(max_examples=15)
@given(x=st.floats(-12, 12), frac=st.floats(-0.99, 0.99))
def test_closed_form_matches_quadrature(eq, x, frac):
    z = complex(x, frac * eq.theta_prime * (1 + abs(x)))
    assert abs(df.k_closed(eq, z) - df.k_quadrature(eq, z)) < 1e-10


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
@pytest.mark.parametrize("x", [-3.0, -0.4, 0.0, 0.25, 1.7])
def test_real_axis_plemelj(eq, x):
    closed = complex(df.k_closed(eq, x))
    assert closed.imag == pytest.approx(-math.pi * float(eq.dm0(x).real), abs=1e-12)
    assert abs(df.k_plemelj(eq, x) - closed) < 1e-9
    assert abs(df.k_quadrature(eq, complex(x, 0.0)) - closed) < 1e-10


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
@given(x=st.floats(-8, 8), y=st.floats(0.0, 0.2))
def test_reflection_symmetry(eq, x, y):
    # m0' is real and odd, so k(-conj z) = conj k(z)
    z = complex(x, y)
    assert abs(df.k_value(eq, -z.conjugate()) - df.k_value(eq, z).conjugate()) < 1e-12


@pytest.mark.parametrize("z", [30 + 2j, -45 + 5j, 12 - 1j, 9 + 0.5j, 100 + 20j])
def test_maxwellian_far_field_against_mpmath(z):
    mpmath.mp.dps = 40
    zz = mpmath.mpc(z.real, z.imag)
    w = mpmath.exp(-(-zz) ** 2) * mpmath.erfc(-1j * (-zz))
    ref = complex(-2 * (1 - 1j * mpmath.sqrt(mpmath.pi) * zz * w))
    got = complex(df.k_closed(MX, z))
    assert abs(got - ref) <= 1e-12 * abs(ref) + 1e-300


def test_custom_gaussian_reproduces_maxwellian():
    from fixtures_custom import gaussian
    eq = E.custom(gaussian, theta=math.pi / 4, d=50.0)
    for z in (0.0, 1.2 + 0.3j, -0.7 - 0.5j, 4.0):
        assert abs(df.eval_k(eq, z).k - df.k_closed(MX, z)) < 1e-9


def test_eval_k_tags_and_domain():
    v = df.eval_k(GP[2], 0.5)
    assert v.region is df.Region.REAL and v.method is df.Method.CLOSED
    assert df.eval_k(GP[2], 0.5 - 0.1j, method="quadrature").region is df.Region.LOWER
    assert df.eval_k(GP[2], 0.5 + 0.1j).region is df.Region.UPPER
    with pytest.raises(DomainError):
        df.eval_k(GP[2], 1 + 0.6j)  # theta' = 1/4
    df.eval_k(GP[2], 1 + 0.6j, theta=0.5)


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
@given(x=st.floats(-6, 6), frac=st.floats(-0.8, 0.8))
def test_derivative(eq, x, frac):
    z = complex(x, frac * eq.theta_prime * (1 + abs(x)))
    assert abs(df.dk_value(eq, z) - df.dk_closed(eq, z)) < 1e-8


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
def test_expansion_at_zero_is_second_order(eq):
    rep = df.check_expansion_zero(eq, [0.4, 0.2, 0.1, 0.05])
    assert rep.exponent == pytest.approx(2.0, abs=0.15)


def test_expansion_at_infinity():
    thin = df.check_expansion_infinity(MX, [8, 16, 32, 64], order="Thin")
    assert thin.exponent < -5.5
    gen = df.check_expansion_infinity(GP[1], [8, 16, 32, 64])
    # -(1+iz)^-2 + i pi m0'(z) = z^-2 - 3 z^-4 + ...: the z^-3 terms cancel
    assert gen.exponent == pytest.approx(-4.0, abs=0.1)
    assert gen.max_ratio < 10
    with pytest.raises(TailClassMismatch):
        df.check_expansion_infinity(GP[1], [8, 16], order="Thin")
    with pytest.raises(ValueError):
        df.check_expansion_infinity(MX, [2, 16])


@pytest.mark.parametrize("eq", CLOSED, ids=lambda e: e.label)
def test_quadratic_decay(eq):
    for R in (50.0, 200.0):
        z = complex(R, 0.1 * R)
        ke = df.k_value(eq, z) + 1j * math.pi * complex(eq.dm0(z))
        assert abs(z * z * ke - 1) < 0.05
    assert 0 < df.estimate_decay_constant(eq) < 20


def test_k_array_shapes():
    zs = np.array([[0.1, 0.2], [0.3 - 0.1j, 1.0]])
    out = df.k_array(GP[3], zs)
    assert out.shape == (2, 2)
    assert out[1, 0] == pytest.approx(df.k_value(GP[3], 0.3 - 0.1j))
