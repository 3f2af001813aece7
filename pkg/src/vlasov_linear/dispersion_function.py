"""The dispersion function k(z) = -int m0'(t)/(z - t) dt and its continuation.

Three evaluation paths:

ClosedForm   generalized Poisson (rational in 1+iz) and Maxwellian (Faddeeva).
Quadrature   the three-branch continuation; the real-line integral runs on a
             V-shaped contour pushed away from z, so it is never near-singular.
PlemeljPV    on the real axis: -pi H(m0')(x) - i pi m0'(x), with the principal
             value split into a symmetrised Gauss-Legendre window and two tails.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .equilibria import Kind, RadialEquilibrium, TailClass, moment
from .errors import DomainError, QuadratureFailure, TailClassMismatch
from .numerics import ExpansionReport, cauchy_derivative, fit_power_law
from . import poisson_kernels

K_EPSABS = 1e-13
K_EPSREL = 1e-11
PV_WINDOW = 1e-3
_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


class Region(str, enum.Enum):
    LOWER = "LowerHalf"
    REAL = "RealAxis"
    UPPER = "UpperHalf"


class Method(str, enum.Enum):
    CLOSED = "ClosedForm"
    QUADRATURE = "Quadrature"
    PV = "PlemeljPV"


@dataclass(frozen=True)
class KValue:
    z: complex
    k: complex
    region: Region
    method: Method


@dataclass(frozen=True)
class KEffValue:
    z: complex
    k_eff: complex


def region_of(z: complex) -> Region:
    if z.imag < 0:
        return Region.LOWER
    return Region.REAL if z.imag == 0 else Region.UPPER


def has_closed_form(eq: RadialEquilibrium) -> bool:
    return eq.kind in (Kind.MAXWELLIAN, Kind.GENERALIZED_POISSON)


# -- closed forms --------------------------------------------------------------
def k_closed(eq: RadialEquilibrium, z):
    z = np.asarray(z, dtype=complex)
    if eq.kind is Kind.GENERALIZED_POISSON:
        a = [float(c) for c in poisson_kernels.kj_coefficients(eq.j).a]
        u = 1.0 / (1.0 + 1j * z)
        return -(u * u) * np.polynomial.polynomial.polyval(u, a)
    if eq.kind is Kind.MAXWELLIAN:
        if z.ndim == 0:
            zc = complex(z)
            if abs(zc) >= 8.0 and (zc * zc).real >= 45.0:
                return _k_eff_series_scalar(zc) + 2j * math.sqrt(math.pi) * zc * cmath.exp(-zc * zc)
        out = -2.0 * (1.0 - 1j * math.sqrt(math.pi) * z * special.wofz(-z))
        far = (np.abs(z) >= 8.0) & (np.real(z * z) >= 45.0)
        if np.any(far):
            zf = z[far] if out.ndim else z
            val = _maxwellian_k_eff_series(zf) - 1j * math.pi * eq.dm0(zf)
            if out.ndim:
                out[far] = val
            else:
                out = val
        return out
    raise ValueError("no closed form for this equilibrium")


def _maxwellian_k_eff_series(z):
    """sum_n (2n-1) mu_{2n-2} z^{-2n}, stopped at the smallest term.

    The Faddeeva form cancels to O(|z|^-2) and loses digits at large |z|; where
    Re z^2 >= 45 the truncation error here is below e^{-45}.
    """
    z = np.asarray(z, dtype=complex)
    if z.size == 1:
        return np.full(z.shape, _k_eff_series_scalar(complex(z.ravel()[0])))
    u = 1.0 / (z * z)
    total = np.zeros_like(z)
    term = u.copy()  # n = 1: (2n-1) mu_0 z^-2
    mu = 1.0
    prev = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for n in range(1, 200):
        a = np.abs(term)
        active &= a < prev
        if not active.any():
            break
        total = np.where(active, total + term, total)
        prev = a
        mu *= (2 * n - 1) / 2.0  # mu_{2n} from mu_{2n-2}
        term = (2 * n + 1) * mu * u ** (n + 1)
        active &= a > 1e-18 * np.abs(total)
    return total


def _k_eff_series_scalar(z: complex) -> complex:
    u = 1.0 / (z * z)
    total, term, mu, prev = 0j, u, 1.0, math.inf
    for n in range(1, 200):
        a = abs(term)
        if a >= prev:
            break
        total += term
        if a <= 1e-18 * abs(total):
            break
        prev = a
        mu *= (2 * n - 1) / 2.0
        term = (2 * n + 1) * mu * u ** (n + 1)
    return total


def dk_closed(eq: RadialEquilibrium, z):
    z = np.asarray(z, dtype=complex)
    if eq.kind is Kind.GENERALIZED_POISSON:
        a = [float(c) for c in poisson_kernels.kj_coefficients(eq.j).a]
        u = 1.0 / (1.0 + 1j * z)
        return 1j * sum(ap * (p + 2) * u ** (p + 3) for p, ap in enumerate(a))
    if eq.kind is Kind.MAXWELLIAN:
        return 2j * math.sqrt(math.pi) * (1 - 2 * z * z) * special.wofz(-z) + 4 * z
    raise ValueError("no closed form for this equilibrium")


# -- quadrature ---------------------------------------------------------------
_PANEL_HI = np.polynomial.legendre.leggauss(24)
_PANEL_LO = np.polynomial.legendre.leggauss(16)


def _panel_nodes(edges, rule):
    x, w = rule
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    return (half * x + 0.5 * (a + b)).ravel(), (half * w).ravel()


def _graded(lo: float, hi: float) -> np.ndarray:
    """Edges on [lo, hi] (one sign) with panel width about 0.5 + 0.05 |s|."""
    if hi <= 0:
        return -_graded(-hi, -lo)[::-1]
    ua, ub = math.log1p(0.1 * lo), math.log1p(0.1 * hi)
    n = max(1, int(math.ceil((ub - ua) / 0.05)))
    e = np.expm1(np.linspace(ua, ub, n + 1)) / 0.1
    e[0], e[-1] = lo, hi
    return e


def _contour_rule(eq: RadialEquilibrium, z: complex, sigma: int, lam: float, rule):
    """-int m0'(t)/(z-t) dt along t = s + i*sigma*lam*(1+|s|) by composite Gauss-Legendre.

    Graded panels (width 0.5 + 0.05|s|) cover [-L, L], split at 0 and Re z; the two tails
    |s| > L are mapped to (0, 1] through s = L/v.
    """
    L = abs(z.real) + 12.0
    cuts = sorted({-L, 0.0, z.real, L})
    edges = [np.array([cuts[0]])]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        edges.append(_graded(lo, hi)[1:])
    s, w = _panel_nodes(np.concatenate(edges), rule)
    if not math.isinf(eq.d):
        v, wv = _panel_nodes(np.linspace(0.0, 1.0, 9), rule)
        tail = L / v
        s = np.concatenate([s, tail, -tail])
        w = np.concatenate([w, wv * L / v**2, wv * L / v**2])
    t = s + 1j * sigma * lam * (1 + np.abs(s))
    dt = 1 + 1j * sigma * lam * np.sign(s)
    vals = eq.dm0(t) / (z - t) * dt
    return -complex(np.sum(w * vals))


def _lower_batch(eq: RadialEquilibrium, zs: np.ndarray, rule) -> np.ndarray:
    """k on many points with Im z <= 0: one shared node set on the raised contour."""
    lam = 0.9 * eq.theta
    L = float(np.max(np.abs(zs.real))) + 12.0
    edges = np.concatenate([_graded(-L, 0.0), _graded(0.0, L)[1:]])
    s, w = _panel_nodes(edges, rule)
    if not math.isinf(eq.d):
        v, wv = _panel_nodes(np.linspace(0.0, 1.0, 9), rule)
        s = np.concatenate([s, L / v, -L / v])
        w = np.concatenate([w, wv * L / v**2, wv * L / v**2])
    t = s + 1j * lam * (1 + np.abs(s))
    g = w * eq.dm0(t) * (1 + 1j * lam * np.sign(s))
    out = np.empty(zs.shape, dtype=complex)
    for i in range(0, zs.size, 64):
        blk = zs[i:i + 64]
        out[i:i + 64] = -np.sum(g[None, :] / (blk[:, None] - t[None, :]), axis=1)
    return out


def _contour_quadpack(eq: RadialEquilibrium, z: complex, sigma: int, lam: float) -> complex:
    def f(s):
        t = s + 1j * sigma * lam * (1 + abs(s))
        return complex(eq.dm0(t)) / (z - t) * (1 + 1j * sigma * lam * math.copysign(1.0, s))

    L = abs(z.real) + 12.0
    pts = [-np.inf, -L, 0.0, z.real, L, np.inf]
    pts = sorted(set(pts))
    total = 0.0j
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(f, lo, hi, complex_func=True, epsabs=K_EPSABS, epsrel=K_EPSREL, limit=400)
        total += val
    return -total


def _contour_integral(eq: RadialEquilibrium, z: complex, sigma: int, lam: float, engine: str = "gl") -> complex:
    if engine == "quadpack":
        out = _contour_quadpack(eq, z, sigma, lam)
    else:
        out = _contour_rule(eq, z, sigma, lam, _PANEL_HI)
        check = _contour_rule(eq, z, sigma, lam, _PANEL_LO)
        if abs(out - check) > 1e-9 * max(1.0, abs(out)):
            out = _contour_quadpack(eq, z, sigma, lam)
    if not np.isfinite(out):
        raise QuadratureFailure(f"non-finite k at {z}")
    return out


def k_quadrature(eq: RadialEquilibrium, z: complex, engine: str = "gl") -> complex:
    z = complex(z)
    lam = 0.9 * eq.theta
    # real z lies below the raised contour, which yields the limit from below (the Plemelj value)
    if z.imag <= 0:
        return _contour_integral(eq, z, +1, lam, engine)
    return _contour_integral(eq, z, -1, lam, engine) - 2j * math.pi * complex(eq.dm0(z))


def hilbert_pv(eq: RadialEquilibrium, x: float, h: float = PV_WINDOW) -> float:
    """PV int m0'(t)/(x-t) dt (i.e. pi times the Hilbert transform of m0')."""
    f = lambda t: float(np.real(eq.dm0(t)))
    # window: -int_0^h [f(x+u) - f(x-u)]/u du, smooth integrand
    u = 0.5 * h * (_GL_X + 1.0)
    w = 0.5 * h * _GL_W
    inner = -np.sum(w * (np.real(eq.dm0(x + u)) - np.real(eq.dm0(x - u))) / u)
    g = lambda t: f(t) / (x - t)
    L = abs(x) + 12.0
    pts = sorted({-np.inf, -L, 0.0, x - h, x + h, L, np.inf})
    pts = [p for p in pts if not x - h < p < x + h]
    outer = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if lo >= x - h and hi <= x + h:
            continue
        val, _ = integrate.quad(g, lo, hi, epsabs=K_EPSABS, epsrel=K_EPSREL, limit=400)
        outer += val
    return float(inner + outer)


def k_plemelj(eq: RadialEquilibrium, x: float) -> complex:
    return -hilbert_pv(eq, x) - 1j * math.pi * float(np.real(eq.dm0(x)))


# -- public evaluation ----------------------------------------------------------
def k_value(eq: RadialEquilibrium, z, method: str = "auto") -> complex:
    """Unchecked scalar k(z) for internal use (z anywhere in the full strip)."""
    z = complex(z)
    if method == "closed" or (method == "auto" and has_closed_form(eq)):
        return complex(k_closed(eq, z))
    return k_quadrature(eq, z)


def eval_k(eq: RadialEquilibrium, z, method: str = "auto", theta: float | None = None) -> KValue:
    """k(z) on the strip of width theta' (or the given width)."""
    z = complex(z)
    width = eq.theta_prime if theta is None else theta
    if not eq.in_strip(z, width):
        raise DomainError(f"{z} is outside the strip of width {width}")
    region = region_of(z)
    if method == "closed" or (method == "auto" and has_closed_form(eq)):
        return KValue(z, complex(k_closed(eq, z)), region, Method.CLOSED)
    if region is Region.REAL:
        return KValue(z, k_plemelj(eq, z.real), region, Method.PV)
    return KValue(z, k_quadrature(eq, z), region, Method.QUADRATURE)


def eval_k_eff(eq: RadialEquilibrium, z, method: str = "auto", theta: float | None = None) -> KEffValue:
    kv = eval_k(eq, z, method, theta)
    return KEffValue(kv.z, kv.k + 1j * math.pi * complex(eq.dm0(kv.z)))


def k_eff_value(eq: RadialEquilibrium, z, method: str = "auto") -> complex:
    z = complex(z)
    return k_value(eq, z, method) + 1j * math.pi * complex(eq.dm0(z))


def dk_value(eq: RadialEquilibrium, z, radius: float | None = None) -> complex:
    """k'(z) by a 64-point Cauchy circle kept inside the strip."""
    z = complex(z)
    if radius is None:
        margin = eq.theta * (1 + abs(z.real)) - abs(z.imag)
        radius = min(0.1, margin) / 2
    return cauchy_derivative(lambda w: k_value(eq, w), z, radius, n=64)


def k_array(eq: RadialEquilibrium, zs, method: str = "auto") -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    if method == "closed" or (method == "auto" and has_closed_form(eq)):
        return np.asarray(k_closed(eq, zs), dtype=complex)
    flat = zs.ravel()
    out = np.empty(flat.shape, dtype=complex)
    low = flat.imag <= 0
    if low.any():
        hi = _lower_batch(eq, flat[low], _PANEL_HI)
        lo = _lower_batch(eq, flat[low], _PANEL_LO)
        bad = np.abs(hi - lo) > 1e-9 * np.maximum(1.0, np.abs(hi))
        hi[bad] = [k_quadrature(eq, z) for z in flat[low][bad]]
        out[low] = hi
    out[~low] = [k_value(eq, z, method) for z in flat[~low]]
    return out.reshape(zs.shape)


# -- expansions -------------------------------------------------------------------
def _sample_directions(eq: RadialEquilibrium, R: float) -> list[complex]:
    # a few points on |z| = R inside the strip of width theta'/2
    tp = 0.5 * eq.theta_prime
    angle = math.atan(tp * (1 + R) / R) * 0.8
    phis = np.linspace(-angle, angle, 5)
    pts = [R * np.exp(1j * p) for p in phis]
    return [complex(p) for p in pts] + [complex(-p) for p in pts]


def check_expansion_zero(eq: RadialEquilibrium, radius_grid, method: str = "auto") -> ExpansionReport:
    radii = [float(r) for r in radius_grid]
    if not radii:
        raise ValueError("empty radius grid")
    if any(not 0 < r <= 1 for r in radii):
        raise ValueError("radii must lie in (0, 1]")
    k0 = k_value(eq, 0.0, method)
    c1 = -1j * math.pi * complex(eq.d2m0(0.0))
    rem = []
    for r in radii:
        zs = _sample_directions(eq, r)
        rem.append(max(abs(k_value(eq, z, method) - k0 - c1 * z) for z in zs))
    p, c, deg = fit_power_law(radii, rem)
    return ExpansionReport(p, c, max_ratio=max(x / r**2 for x, r in zip(rem, radii)), degenerate=deg,
                           points=list(zip(radii, rem)))


def check_expansion_infinity(eq: RadialEquilibrium, radius_grid, order: str = "General",
                             method: str = "auto") -> ExpansionReport:
    radii = [float(r) for r in radius_grid]
    if not radii:
        raise ValueError("empty radius grid")
    if any(r < 4 for r in radii):
        raise ValueError("radii must be >= 4")
    thin = order.lower().startswith("thin")
    if thin and eq.tail_class is not TailClass.THIN:
        raise TailClassMismatch(f"{eq.label} is not thin-tailed")
    a2 = moment(eq, 2).value if thin else 0.0
    rem, ratios = [], []
    for R in radii:
        worst = 0.0
        for z in _sample_directions(eq, R):
            ke = k_eff_value(eq, z, method)
            model = z**-2 + (3 * a2 * z**-4 if thin else 0.0)
            worst = max(worst, abs(ke - model))
        env = R ** (-eq.d - 1) + (R**-6 if thin else R**-4) * math.log(R)
        rem.append(worst)
        ratios.append(worst / env)
    p, c, deg = fit_power_law(radii, rem)
    return ExpansionReport(p, c, max_ratio=max(ratios), degenerate=deg, points=list(zip(radii, rem, ratios)))


def estimate_decay_constant(eq: RadialEquilibrium, xs=None, heights=(0.0, 0.5, -0.5)) -> float:
    """Empirical A with |k(z)| <= A (1+|z|)^-2 on a sample of the strip."""
    xs = np.linspace(-40, 40, 161) if xs is None else np.asarray(xs)
    best = 0.0
    for h in heights:
        zs = xs + 1j * h * eq.theta_prime * (1 + np.abs(xs))
        ks = k_array(eq, zs)
        best = max(best, float(np.max(np.abs(ks) * (1 + np.abs(zs)) ** 2)))
    return best
