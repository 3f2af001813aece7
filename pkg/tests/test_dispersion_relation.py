import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vlasov_linear import dispersion_function as df
from vlasov_linear import dispersion_relation as dr
from vlasov_linear import equilibria as E
from vlasov_linear.errors import BracketViolation, NoConvergence, TailClassMismatch

MX = E.maxwellian()


@given(st.floats(0.01, 0.3))
def test_poisson_j1_exact(r):
    pt = dr.solve_zeta(E.generalized_poisson(1), r)
    assert abs(pt.omega - complex(1, r)) < 1e-10
    assert pt.residual < 1e-12


@settings(max_examples=15)
@given(st.floats(0.02, 0.3))
def test_poisson_j2_against_cubic(r):
    # -u^2 (1 + 2u) = r^2 with u = 1/(1 + i zeta)
    pt = dr.solve_zeta(E.generalized_poisson(2), r)
    us = np.roots([-2, -1, 0, -r * r])
    zetas = (1 / us - 1) / 1j
    assert np.min(np.abs(zetas - pt.zeta)) < 1e-10 * abs(pt.zeta)


@pytest.mark.parametrize("r", [0.05, 0.12, 0.2])
def test_maxwellian_against_mpmath_root(r):
    mpmath.mp.dps = 30
    sp = mpmath.sqrt(mpmath.pi)
    k = lambda z: -2 * (1 - 1j * sp * z * mpmath.exp(-z * z) * mpmath.erfc(1j * z))
    pt = dr.solve_zeta(MX, r)
    ref = complex(mpmath.findroot(lambda z: k(z) - r * r, mpmath.mpc(pt.zeta.real, pt.zeta.imag), tol=1e-24))
    assert abs(pt.zeta - ref) < 1e-9 * abs(ref)


@pytest.mark.parametrize("eq", [MX, E.generalized_poisson(2), E.generalized_poisson(3)], ids=lambda e: e.label)
def test_mirror_zero_and_multiplicity(eq):
    for r in (0.05, 0.15):
        pt = dr.solve_zeta(eq, r)
        assert dr.conjugate_zero_residual(eq, pt) < 1e-10
        if df.has_closed_form(eq):
            expected = -2 * r**3 / complex(df.dk_closed(eq, pt.zeta)) - 1
            assert abs(pt.m_l - expected) < 1e-7


@pytest.mark.parametrize("eq", [MX, E.generalized_poisson(3)], ids=lambda e: e.label)
@pytest.mark.parametrize("r", [0.1, 0.2, 0.25])
def test_dissipation_bracket(eq, r):
    lo, hi, w2 = dr.dissipation_bracket(eq, r)
    assert lo <= w2 <= hi and hi > 0


def test_bracket_violation_detected():
    pt = dr.solve_zeta(MX, 0.2)
    fake = dr.DispersionPoint(pt.r, pt.zeta, complex(pt.omega1, 10.0), pt.m_l, pt.delta)
    with pytest.raises(BracketViolation):
        dr.dissipation_bracket(MX, 0.2, fake)


def test_bohm_gross_and_thin_tail():
    rep = dr.bohm_gross_residual(MX, [0.04, 0.06, 0.08, 0.1])
    assert rep.exponent > 3.5
    thin = dr.thin_tail_expansion_check(MX, [0.04, 0.06, 0.08, 0.1])
    assert thin.max_ratio < 10
    with pytest.raises(TailClassMismatch):
        dr.thin_tail_expansion_check(E.generalized_poisson(1), [0.1])


def test_outside_range():
    with pytest.raises(NoConvergence):
        dr.solve_zeta(MX, 0.5)
    with pytest.raises(NoConvergence):
        dr.solve_zeta(MX, 0.0)


def test_sweep_warm_equals_cold():
    eq = E.generalized_poisson(3)
    rs = [0.2, 0.05, 0.1]
    warm = dr.sweep(eq, rs)
    cold = dr.sweep(eq, rs, warm_start=False)
    assert [p.r for p in warm] == rs
    for a, b in zip(warm, cold):
        assert abs(a.zeta - b.zeta) < 1e-10 * abs(a.zeta)


def test_penrose_stable_equilibria():
    for eq in (MX, E.generalized_poisson(1), E.generalized_poisson(3)):
        rep = dr.penrose_check(eq, [0.1, 1.0, 3.0])
        assert rep.stable and set(rep.winding_numbers.values()) == {0}


def test_penrose_two_stream_unstable():
    from fixtures_custom import two_stream
    eq = E.custom(two_stream, theta=0.5, d=20.0)
    k0 = df.k_value(eq, 0.0)
    assert k0.real > 0  # dip at the origin: k(0) = 2 int m0'/t > 0
    rep = dr.penrose_check(eq, [0.1, 2.0])
    assert not rep.stable
    assert rep.winding_numbers[0.1] != 0 and rep.winding_numbers[2.0] == 0
    with pytest.raises(ValueError):
        dr.penrose_check(eq, [-1.0])


def test_annulus_bound_positive():
    eq = E.generalized_poisson(2)
    assert dr.annulus_lower_bound(eq, 0.1, 0.05) > 0
