"""Radial equilibria: Maxwellian, generalized Poisson m_j and user callbacks.

All evaluation routines accept complex scalars or arrays. Raw methods on
:class:`RadialEquilibrium` (``m0``, ``dm0``, ``d2m0``) do no domain checking and
are what the numerical modules call; :func:`eval_m0` is the checked entry point.
"""
from __future__ import annotations

import enum
import importlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate

from . import poisson_kernels
from .errors import DivergentMoment, DomainError, PoleError, QuadratureFailure
from .numerics import QUAD_EPSABS, QUAD_EPSREL


class Kind(str, enum.Enum):
    MAXWELLIAN = "maxwellian"
    GENERALIZED_POISSON = "generalized_poisson"
    CUSTOM = "custom"


class TailClass(str, enum.Enum):
    THIN = "ThinTail"
    FAT = "FatTail"


@dataclass(frozen=True)
class Moment:
    order: int
    value: float


@dataclass(frozen=True)
class RadialEquilibrium:
    kind: Kind
    theta: float
    d: float
    j: int | None = None
    normalization: float = 1.0
    theta_prime_value: float | None = None
    tail_override: TailClass | None = None
    callback: Callable | None = field(default=None, compare=False, repr=False)
    callback_prime: Callable | None = field(default=None, compare=False, repr=False)
    callback_second: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        if not 0 < self.theta <= math.pi / 4 + 1e-15:
            raise ValueError("strip width must lie in (0, pi/4]")
        if not self.d > 1:
            raise ValueError("decay order must exceed 1")
        if self.theta_prime_value is not None and not 0 < self.theta_prime_value < self.theta:
            raise ValueError("theta' must lie in (0, theta)")

    # -- metadata -----------------------------------------------------------
    @property
    def theta_prime(self) -> float:
        return self.theta_prime_value if self.theta_prime_value is not None else self.theta / 2

    @property
    def tail_class(self) -> TailClass:
        if self.tail_override is not None:
            return self.tail_override
        return TailClass.THIN if self.d > 3 else TailClass.FAT

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind is Kind.GENERALIZED_POISSON:
            return f"GP({self.j})"
        return self.kind.value

    @property
    def a2(self) -> float:
        """Variance; infinite for fat tails."""
        try:
            return moment(self, 2).value
        except DivergentMoment:
            return math.inf

    def in_strip(self, z, theta: float | None = None):
        th = self.theta if theta is None else theta
        z = np.asarray(z, dtype=complex)
        return np.abs(z.imag) < th * (1 + np.abs(z.real))

    # -- raw evaluation -----------------------------------------------------
    def m0(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind is Kind.MAXWELLIAN:
            return np.exp(-z * z) / math.sqrt(math.pi)
        if self.kind is Kind.GENERALIZED_POISSON:
            return _gp_const(self.j) * (1 + z * z) ** (-self.j)
        return self.normalization * np.asarray(self.callback(z), dtype=complex)

    def dm0(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind is Kind.MAXWELLIAN:
            return -2 * z * np.exp(-z * z) / math.sqrt(math.pi)
        if self.kind is Kind.GENERALIZED_POISSON:
            j = self.j
            return -2 * j * _gp_const(j) * z * (1 + z * z) ** (-j - 1)
        if self.callback_prime is not None:
            return self.normalization * np.asarray(self.callback_prime(z), dtype=complex)
        return self._cauchy(z, 1)

    def d2m0(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind is Kind.MAXWELLIAN:
            return (4 * z * z - 2) * np.exp(-z * z) / math.sqrt(math.pi)
        if self.kind is Kind.GENERALIZED_POISSON:
            j = self.j
            w = 1 + z * z
            return _gp_const(j) * (-2 * j * w ** (-j - 1) + 4 * j * (j + 1) * z * z * w ** (-j - 2))
        if self.callback_second is not None:
            return self.normalization * np.asarray(self.callback_second(z), dtype=complex)
        return self._cauchy(z, 2)

    def _cauchy(self, z, order):
        # trapezoid rule on circles kept inside the strip, all nodes at once
        flat = np.ravel(np.asarray(z, dtype=complex))
        margin = self.theta * (1 + np.abs(flat.real)) - np.abs(flat.imag)
        rad = np.clip(0.5 * margin, 1e-4, 0.05)
        e = np.exp(2j * np.pi * np.arange(48) / 48)
        w = flat[:, None] + rad[:, None] * e[None, :]
        vals = self.normalization * np.asarray(self.callback(w), dtype=complex)
        out = math.factorial(order) * np.mean(vals * e[None, :] ** (-order), axis=1) / rad**order
        return out.reshape(np.shape(z)) if np.ndim(z) else out[0]


def _gp_const(j: int) -> float:
    return math.exp(math.lgamma(j) - math.lgamma(j - 0.5)) / math.sqrt(math.pi)


# -- constructors ------------------------------------------------------------
def maxwellian(theta_prime: float | None = None) -> RadialEquilibrium:
    return RadialEquilibrium(Kind.MAXWELLIAN, theta=math.pi / 4, d=math.inf, theta_prime_value=theta_prime)


def generalized_poisson(j: int, theta_prime: float | None = None) -> RadialEquilibrium:
    if int(j) != j or j < 1:
        raise ValueError("j must be a positive integer")
    return RadialEquilibrium(Kind.GENERALIZED_POISSON, theta=0.5, d=2.0 * j, j=int(j), theta_prime_value=theta_prime)


def custom(
    m0: Callable,
    theta: float,
    d: float,
    dm0: Callable | None = None,
    d2m0: Callable | None = None,
    *,
    theta_prime: float | None = None,
    tail_class: TailClass | str | None = None,
    normalize: bool = True,
    name: str = "custom",
) -> RadialEquilibrium:
    """Equilibrium from a holomorphic callback. Derivatives default to Cauchy integrals."""
    norm = 1.0
    if normalize:
        mass, _ = integrate.quad(lambda t: float(np.real(m0(np.complex128(t)))), -np.inf, np.inf,
                                 epsabs=1e-13, epsrel=1e-12, limit=400)
        if not mass > 0:
            raise QuadratureFailure("custom equilibrium has non-positive mass")
        norm = 1.0 / mass
    tc = TailClass(tail_class) if tail_class is not None else None
    return RadialEquilibrium(Kind.CUSTOM, theta=theta, d=d, normalization=norm, theta_prime_value=theta_prime,
                             tail_override=tc, callback=m0, callback_prime=dm0, callback_second=d2m0, name=name)


def from_dict(data: dict) -> RadialEquilibrium:
    kind = data.get("kind")
    tp = data.get("theta_prime")
    if kind == "maxwellian":
        return maxwellian(theta_prime=tp)
    if isinstance(kind, dict) and "generalized_poisson" in kind:
        return generalized_poisson(int(kind["generalized_poisson"]), theta_prime=tp)
    if kind == "custom":
        target = data.get("callback")
        if not target or ":" not in target:
            raise ValueError("custom equilibria need a 'callback' of the form 'module:function'")
        mod, attr = target.split(":", 1)
        fn = getattr(importlib.import_module(mod), attr)
        return custom(fn, theta=float(data["theta"]), d=float(data["d"]), theta_prime=tp,
                      tail_class=data.get("tail_class"))
    raise ValueError(f"unknown equilibrium kind {kind!r}")


def from_json(path: str | Path) -> RadialEquilibrium:
    return from_dict(json.loads(Path(path).read_text()))


# -- checked operations ------------------------------------------------------
def eval_m0(eq: RadialEquilibrium, z: complex) -> complex:
    z = complex(z)
    if not eq.in_strip(z):
        raise DomainError(f"{z} is outside the strip of width {eq.theta}")
    if eq.kind is Kind.GENERALIZED_POISSON and abs(1 + z * z) == 0.0:
        raise PoleError(f"m_j has a pole at {z}")
    return complex(eq.m0(z))


def eval_m0_fourier(eq: RadialEquilibrium, s):
    """Fourier transform with the convention m_hat(s) = int m(r) exp(-irs) dr."""
    s_arr = np.asarray(s, dtype=float)
    if eq.kind is Kind.MAXWELLIAN:
        out = np.exp(-s_arr**2 / 4)
    elif eq.kind is Kind.GENERALIZED_POISSON:
        out = poisson_kernels.fourier_profile(eq.j, s_arr)
    else:
        out = np.vectorize(lambda x: _custom_fourier(eq, float(x)), otypes=[float])(s_arr)
    return float(out) if np.ndim(out) == 0 else out


def _custom_fourier(eq: RadialEquilibrium, s: float) -> float:
    f = lambda t: float(np.real(eq.m0(np.complex128(t))))
    if s == 0.0:
        val, _ = integrate.quad(f, 0, np.inf, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
    else:
        val, _ = integrate.quad(f, 0, np.inf, weight="cos", wvar=abs(s), epsabs=QUAD_EPSABS, limlst=200)
    return 2.0 * val


def moment(eq: RadialEquilibrium, order: int) -> Moment:
    if order < 0 or int(order) != order:
        raise ValueError("order must be a nonnegative integer")
    if order >= eq.d - 1:
        raise DivergentMoment(f"moment of order {order} diverges for d = {eq.d}")
    if order % 2:
        return Moment(order, 0.0)
    k = order // 2
    if eq.kind is Kind.MAXWELLIAN:
        return Moment(order, math.gamma(k + 0.5) / math.sqrt(math.pi))
    if eq.kind is Kind.GENERALIZED_POISSON:
        j = eq.j
        val = _gp_const(j) * math.exp(math.lgamma(k + 0.5) + math.lgamma(j - k - 0.5) - math.lgamma(j))
        return Moment(order, val)
    f = lambda t: t**order * float(np.real(eq.m0(np.complex128(t))))
    val, err = integrate.quad(f, 0, np.inf, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
    if not np.isfinite(val):
        raise QuadratureFailure("moment quadrature did not converge")
    return Moment(order, 2.0 * val)
