import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from vlasov_linear import equilibria as E
from vlasov_linear.errors import DivergentMoment, DomainError

EQS = [E.maxwellian()] + [E.generalized_poisson(j) for j in (1, 2, 3, 4)]


@pytest.mark.parametrize("eq", EQS, ids=lambda e: e.label)
def test_unit_mass(eq):
    mass = integrate.quad(lambda t: float(eq.m0(t).real), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    assert mass == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("eq", EQS, ids=lambda e: e.label)
def test_second_moment_against_quadrature(eq):
    if eq.d <= 3:
        with pytest.raises(DivergentMoment):
            E.moment(eq, 2)
        return
    num = integrate.quad(lambda t: t * t * float(eq.m0(t).real), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    assert E.moment(eq, 2).value == pytest.approx(num, rel=1e-9)


def test_known_variances():
    assert E.moment(E.maxwellian(), 2).value == pytest.approx(0.5)
    assert E.moment(E.generalized_poisson(3), 2).value == pytest.approx(1 / 3)  # 1/(2j-3)
    assert E.moment(E.maxwellian(), 3).value == 0.0


def test_tail_classes():
    assert E.maxwellian().tail_class is E.TailClass.THIN
    assert E.generalized_poisson(1).tail_class is E.TailClass.FAT
    assert E.generalized_poisson(3).tail_class is E.TailClass.THIN
    assert math.isinf(E.generalized_poisson(1).a2)


@pytest.mark.parametrize("eq", EQS, ids=lambda e: e.label)
@given(x=st.floats(-6, 6), frac=st.floats(-0.9, 0.9))
def test_derivatives_match_cauchy(eq, x, frac):
    from vlasov_linear.numerics import cauchy_derivative
    z = complex(x, frac * eq.theta * (1 + abs(x)) * 0.5)
    d1 = cauchy_derivative(lambda w: complex(eq.m0(w)), z, 0.05, n=64)
    d2 = cauchy_derivative(lambda w: complex(eq.m0(w)), z, 0.05, n=64, order=2)
    assert abs(complex(eq.dm0(z)) - d1) < 1e-10
    assert abs(complex(eq.d2m0(z)) - d2) < 1e-8


@pytest.mark.parametrize("eq", EQS, ids=lambda e: e.label)
@given(s=st.floats(0.05, 8))
def test_fourier_transform_against_quadrature(eq, s):
    num = 2 * integrate.quad(lambda t: float(eq.m0(t).real), 0, np.inf, weight="cos", wvar=s)[0]
    assert E.eval_m0_fourier(eq, s) == pytest.approx(num, abs=1e-9)


def test_fourier_at_zero_is_mass():
    for eq in EQS:
        assert E.eval_m0_fourier(eq, 0.0) == pytest.approx(1.0)


def test_domain_checks():
    eq = E.generalized_poisson(2)
    with pytest.raises(DomainError):
        E.eval_m0(eq, 0.9j)
    assert E.eval_m0(eq, 0.3j) == pytest.approx(complex(eq.m0(0.3j)))
    assert eq.in_strip(10 + 5j) and not eq.in_strip(10 + 6j)


def test_constructor_validation():
    with pytest.raises(ValueError):
        E.generalized_poisson(0)
    with pytest.raises(ValueError):
        E.RadialEquilibrium(E.Kind.MAXWELLIAN, theta=1.0, d=math.inf)
    with pytest.raises(ValueError):
        E.maxwellian(theta_prime=1.0)
    with pytest.raises(DivergentMoment):
        E.moment(E.generalized_poisson(2), 4)


def test_custom_normalises_and_matches_maxwellian():
    from fixtures_custom import gaussian
    eq = E.custom(gaussian, theta=math.pi / 4, d=50.0)
    mx = E.maxwellian()
    for z in (0.0, 0.7 + 0.2j, -2.5 - 0.4j):
        assert abs(complex(eq.m0(z)) - complex(mx.m0(z))) < 1e-12
        assert abs(complex(eq.dm0(z)) - complex(mx.dm0(z))) < 1e-9
    assert E.moment(eq, 2).value == pytest.approx(0.5, rel=1e-8)
    assert E.eval_m0_fourier(eq, 1.3) == pytest.approx(math.exp(-1.3**2 / 4), abs=1e-9)


def test_json_round_trip(tmp_path):
    p = tmp_path / "eq.json"
    p.write_text(json.dumps({"kind": {"generalized_poisson": 3}}))
    assert E.from_json(p) == E.generalized_poisson(3)
    assert E.from_dict({"kind": "maxwellian"}) == E.maxwellian()
    eq = E.from_dict({"kind": "custom", "callback": "fixtures_custom:gaussian", "theta": 0.7, "d": 40})
    assert eq.kind is E.Kind.CUSTOM and eq.theta == 0.7
    with pytest.raises(ValueError):
        E.from_dict({"kind": "custom", "theta": 0.5, "d": 3})
    with pytest.raises(ValueError):
        E.from_dict({"kind": "kappa"})
