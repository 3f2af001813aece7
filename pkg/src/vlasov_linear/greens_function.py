"""Green's function G(xi, tau) = delta_0(tau) + smooth(tau) for one mode.

In the variable w = theta/|xi| (r = |xi|) the smooth part is

    smooth(tau) = (r / 2 pi) int k(w) / (r^2 - k(w)) exp(i w tau r) dw,

integrated along R, or along any line / ray reached without crossing a zero of
r^2 - k. Since F(w) = k/(r^2-k) satisfies F(-conj w) = conj F(w) every line
integral folds onto a half-line and comes out real.

Paths
-----
closed  generalized Poisson j = 1, 2, 3: explicit residue sums.
high    the horizontal line Im w = gamma0 (gamma0 = half the bisected margin).
low     two residues at zeta(r), -conj zeta(r) plus the rays
        z = +-x + i gamma1 (1 + x); the ray integrand is the subtracted
        Q(r, z) = r^2 [k - z^-2] / ((r^2 - k)(r^2 - z^-2)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import dispersion_function as df
from . import poisson_kernels as pk
from .dispersion_relation import DispersionPoint, solve_zeta
from .equilibria import Kind, RadialEquilibrium, TailClass
from .errors import (ContourTooHigh, EnvelopeViolation, IdentityViolation, MissingDispersionPoint, NoConvergence,
                     UnderResolvedCurve)
from .numerics import adaptive_panels, uniform_growth_ok, winding_number

R0_DEFAULT = 0.1


@dataclass
class GreensValue:
    """Smooth part of G at one |xi| and one or more tau (arrays broadcast).

    ``delta_coeff`` is the weight of delta_0(tau), always 1.
    """

    xi_abs: float
    tau: np.ndarray | float
    smooth: np.ndarray | float
    oscillatory: np.ndarray | float | None = None
    error: np.ndarray | float | None = None
    delta_coeff: float = 1.0
    method: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def decomposition(self):
        if self.oscillatory is None:
            return None
        return {"oscillatory": self.oscillatory, "error": self.error}


# -- closed forms ------------------------------------------------------------------
def greens_closed_form(j: int, xi_abs: float, tau) -> GreensValue:
    if j not in (1, 2, 3):
        raise ValueError("closed forms exist for j = 1, 2, 3 only")
    x = float(xi_abs)
    if x <= 0:
        raise ValueError("xi_abs must be positive")
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0):
        raise ValueError("tau must be nonnegative")
    if j == 1:
        osc = -np.exp(-x * t) * np.sin(t)
        err = np.zeros_like(t)
        meta = {}
    elif j == 2:
        d = pk.poles_j2(x).residue_data
        rho, kappa, alpha, beta = d["rho"], d["kappa"], d["alpha"], d["beta"]
        err = 2 * alpha * np.exp(-(2 * rho + x) * t)
        osc = -2 * np.exp(-(x - rho) * t) * np.real((alpha + 1j * beta) * np.exp(1j * kappa * t))
        meta = {k: d[k] for k in ("rho", "kappa", "alpha", "beta")}
    else:
        d = pk.poles_j3(x).residue_data
        rho, k1, k3, a, b, dd = d["rho"], d["kappa1"], d["kappa3"], d["a"], d["b"], d["d"]
        osc = -2 * np.exp(-(x - rho) * t) * np.real((a + 1j * b) * np.exp(1j * k1 * t))
        err = -2 * np.exp(-(rho + x) * t) * np.real((-a + 1j * dd) * np.exp(1j * k3 * t))
        meta = {k: d[k] for k in ("rho", "kappa1", "kappa3", "a", "b", "d")}
    return GreensValue(x, t, osc + err, osc, err, method="closed", meta=meta)


# -- shared line/ray quadrature ---------------------------------------------------------
def _F(eq, r, w):
    k = df.k_array(eq, w)
    return k / (r * r - k)


def _Q(eq, r, z):
    k = df.k_array(eq, z)
    zm2 = z ** -2
    return r * r * (k - zm2) / ((r * r - k) * (r * r - zm2))


def _half_line_transform(g_nodes, g_scalar, x_nodes, w_nodes, X, freqs, damping, quad_tail=True):
    """Re int_0^inf g(x) exp(i a x - c a x) dx for each a in ``freqs``.

    ``g_nodes`` holds g on the Gauss nodes of [0, X]; the tail [X, inf) goes to
    QUADPACK (QAWF when a > 0). ``damping`` c >= 0 multiplies a in the decay.
    """
    out = np.empty(len(freqs))
    with warnings.catch_warnings():
        # the tail is O(1/X) small; QAWF cycle warnings there do not affect the head accuracy
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i, a in enumerate(freqs):
            out[i] = _one_transform(g_nodes, g_scalar, x_nodes, w_nodes, X, a, damping, quad_tail)
    return out


def _one_transform(g_nodes, g_scalar, x_nodes, w_nodes, X, a, damping, quad_tail):
    ph = np.exp((1j - damping) * a * x_nodes)
    head = np.sum(w_nodes * g_nodes * ph).real
    tail = 0.0
    if quad_tail:
        if a == 0.0:
            tail = integrate.quad(lambda x: g_scalar(x).real, X, np.inf, epsabs=1e-14, epsrel=1e-12,
                                  limit=500)[0]
        else:
            gr = lambda x: (g_scalar(x) * math.exp(-damping * a * x)).real
            gi = lambda x: (g_scalar(x) * math.exp(-damping * a * x)).imag
            c = integrate.quad(gr, X, np.inf, weight="cos", wvar=a, epsabs=1e-14, limlst=200)[0]
            s = integrate.quad(gi, X, np.inf, weight="sin", wvar=a, epsabs=1e-14, limlst=200)[0]
            tail = c - s
    return head + tail


# -- high frequency -----------------------------------------------------------------
def line_winding(eq: RadialEquilibrium, r: float, gamma: float) -> int:
    """Winding of r^2 - k along Im w = gamma (closed through infinity, where k -> 0)."""
    f = lambda phi: r * r - df.k_array(eq, np.tan(np.clip(phi, -np.pi / 2 + 1e-9, np.pi / 2 - 1e-9)) + 1j * gamma)
    w, _, _ = winding_number(f, -np.pi / 2, np.pi / 2, n0=512)
    return w


def _crosses(eq, r, gamma) -> bool:
    # a line passing within resolution of a zero counts as crossing it
    try:
        return line_winding(eq, r, gamma) != 0
    except UnderResolvedCurve:
        return True


def bisect_gamma0(eq: RadialEquilibrium, r: float, cap: float | None = None, iters: int = 14) -> float:
    """Largest gamma* in (0, cap] with no zero of r^2 - k below the line; returns gamma*/2."""
    cap = 0.9 * eq.theta if cap is None else cap
    try:
        on_axis = line_winding(eq, r, 0.0)
    except UnderResolvedCurve as exc:
        raise ContourTooHigh(f"a zero of r^2 - k lies within resolution of the real axis at r = {r}") from exc
    if on_axis != 0:
        raise ContourTooHigh("r^2 - k winds on the real axis (Penrose-unstable)")
    if not _crosses(eq, r, cap):
        return cap / 2
    lo, hi = 0.0, cap
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if not _crosses(eq, r, mid):
            lo = mid
        else:
            hi = mid
    return lo / 2


def greens_contour_high(eq: RadialEquilibrium, xi_abs: float, tau, gamma0: float | None = None,
                        r0: float = R0_DEFAULT, check_envelope: bool = False, envelope_C: float | None = None,
                        check_domain: bool = True) -> GreensValue:
    """Shifted-line evaluation; gamma0 = 0 gives the plain real-line quadrature."""
    r = float(xi_abs)
    if check_domain and r < r0 / 2:
        raise ValueError(f"|xi| = {r} below r0/2 = {r0 / 2}")
    g0 = bisect_gamma0(eq, r) if gamma0 is None else float(gamma0)
    if gamma0 is not None and g0 > 0 and line_winding(eq, r, g0) != 0:
        raise ContourTooHigh(f"a zero of r^2 - k lies below Im w = {g0}")
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    a_max = float(np.max(t)) * r if t.size else 0.0
    X = 40.0
    width = min(0.25, 2.0 / (a_max + 1e-12))
    xn, wn, g_nodes = adaptive_panels(lambda x: _F(eq, r, x + 1j * g0), 0.0, X, width)
    g_scalar = lambda x: complex(_F(eq, r, np.array([x + 1j * g0]))[0])
    vals = _half_line_transform(g_nodes, g_scalar, xn, wn, X, t * r, 0.0)
    smooth = (r / math.pi) * np.exp(-g0 * t * r) * vals
    out = GreensValue(r, t, smooth, method="high", meta={"gamma0": g0})
    if check_envelope:
        ratio = np.abs(smooth) * r * np.exp(g0 * t * r)
        C = envelope_C if envelope_C is not None else None
        if (C is not None and np.any(ratio > C)) or not uniform_growth_ok(ratio):
            raise EnvelopeViolation(f"|smooth| exceeds C exp(-gamma0 tau r)/r at r = {r}")
        out.meta["envelope_ratio"] = float(ratio.max())
    return out


# -- low frequency ---------------------------------------------------------------------
def zeros_between(eq: RadialEquilibrium, r: float, gamma1: float) -> int:
    """Number of zeros of r^2 - k between R and V = {x + i gamma1 (1+|x|)}.

    The lower boundary is the mirrored ray at -gamma1/2 rather than R itself:
    the lower half-plane is zero-free for stable equilibria, and the Maxwellian
    zeros sit exponentially close to R, where the winding is ill-conditioned.
    """
    def curve(h):
        def f(phi):
            x = np.tan(np.clip(phi, -np.pi / 2 + 1e-9, np.pi / 2 - 1e-9))
            return r * r - df.k_array(eq, x + 1j * h * (1 + np.abs(x)))
        return f

    w_real, _, _ = winding_number(curve(-0.5 * gamma1), -np.pi / 2, np.pi / 2, n0=1024)
    w_v, _, _ = winding_number(curve(gamma1), -np.pi / 2, np.pi / 2, n0=1024)
    return w_real - w_v


def choose_gamma1(eq: RadialEquilibrium, point: DispersionPoint, validate: bool = True) -> float:
    z1, z2 = point.zeta.real, point.zeta.imag
    g = min(0.9 * eq.theta, max(eq.theta_prime / 4, 1.5 * z2 / (1 + abs(z1))))
    if validate:
        n = zeros_between(eq, point.r, g)
        if n != 2:
            raise ContourTooHigh(f"{n} zeros between R and the rays (expected 2) at r = {point.r}")
    return g


def greens_contour_low(eq: RadialEquilibrium, xi_abs: float, tau, point: DispersionPoint | None = None,
                       gamma1: float | None = None, r0: float = R0_DEFAULT, validate: bool = True,
                       check_domain: bool = True) -> GreensValue:
    r = float(xi_abs)
    if check_domain and r > 2 * r0:
        raise ValueError(f"|xi| = {r} above 2 r0 = {2 * r0}")
    if point is None:
        try:
            point = solve_zeta(eq, r)
        except NoConvergence as exc:
            raise MissingDispersionPoint(str(exc)) from exc
    g1 = choose_gamma1(eq, point, validate) if gamma1 is None else float(gamma1)
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    osc = np.real(1j * (1 + point.m_l) * np.exp(1j * t * point.omega))

    # ray z = x + i g1 (1 + x); exp(i z tau r) = exp(-g1 a) exp((i - g1) a x), a = tau r
    z_of = lambda x: x + 1j * g1 * (1 + x)
    dz = 1 + 1j * g1
    dist = min(abs(z_of(point.zeta.real) - point.zeta), g1 * (1 + 1 / r))
    a_max = float(np.max(t)) * r if t.size else 0.0
    X = 4.0 / r + 20.0
    width = min(0.25, 0.5 * dist, 2.0 / (a_max + 1e-12))
    xn, wn, g_nodes = adaptive_panels(lambda x: _Q(eq, r, z_of(x)) * dz, 0.0, X, width)
    g_scalar = lambda x: complex(_Q(eq, r, np.array([z_of(x)]))[0] * dz)
    vals = _half_line_transform(g_nodes, g_scalar, xn, wn, X, t * r, g1)
    err = (r / math.pi) * np.exp(-g1 * t * r) * vals
    meta = {"gamma1": g1, "omega": point.omega, "m_l": point.m_l}
    return GreensValue(r, t, osc + err, osc, err, method="low", meta=meta)


def greens(eq: RadialEquilibrium, xi_abs: float, tau, method: str = "auto", r0: float = R0_DEFAULT) -> GreensValue:
    if method == "closed":
        if eq.kind is not Kind.GENERALIZED_POISSON or eq.j > 3:
            raise ValueError("closed form needs GP(j), j <= 3")
        return greens_closed_form(eq.j, xi_abs, tau)
    if method == "auto":
        method = "high" if xi_abs >= r0 else "low"
    if method == "high":
        return greens_contour_high(eq, xi_abs, tau, r0=r0)
    if method == "low":
        return greens_contour_low(eq, xi_abs, tau, r0=r0)
    raise ValueError(f"unknown method {method!r}")


# -- envelopes ------------------------------------------------------------------------------
def low_envelope(eq: RadialEquilibrium, r: float, thin: bool = False) -> float:
    tail = 0.0 if math.isinf(eq.d) else r ** (eq.d - 1)
    return tail + (r**3 if thin else r * r * math.log(1 / r))


def envelope_ratios_low(eq: RadialEquilibrium, r_grid, tau, thin: bool = False) -> np.ndarray:
    """|E_l| e^{gamma1 tau r} / envelope(r), shape (len(r_grid), len(tau))."""
    if thin and eq.tail_class is not TailClass.THIN:
        raise ValueError("thin-tail envelope needs a thin-tailed equilibrium")
    rows = []
    for r in r_grid:
        g = greens_contour_low(eq, r, tau, check_domain=False)
        rows.append(np.abs(g.error) * np.exp(g.meta["gamma1"] * g.tau * r) / low_envelope(eq, r, thin))
    return np.array(rows)


# -- normal form ------------------------------------------------------------------------------
@dataclass
class IdentityReport:
    xi_abs: float
    lhs: float
    rhs: float

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def bump(center: float, halfwidth: float):
    """C-infinity bump supported on [center - halfwidth, center + halfwidth] and its derivative."""
    def phi(t):
        u = (np.asarray(t, dtype=float) - center) / halfwidth
        out = np.zeros_like(u)
        m = np.abs(u) < 1
        out[m] = np.exp(-1 / (1 - u[m] ** 2))
        return out

    def dphi(t):
        u = (np.asarray(t, dtype=float) - center) / halfwidth
        out = np.zeros_like(u)
        m = np.abs(u) < 1
        um = u[m]
        out[m] = np.exp(-1 / (1 - um**2)) * (-2 * um / (1 - um**2) ** 2) / halfwidth
        return out

    return phi, dphi


def normal_form_identity_check(xi_abs: float, phi=None, dphi=None, support=(0.0, 10.0), tol: float = 1e-8,
                               phi0: float | None = None) -> IdentityReport:
    """For GP(1): <G_1, phi> = -int_0^inf e^{-x tau} cos(tau) (phi' - x phi) dtau.

    The left side is phi(0) + int_0^inf smooth(tau) phi(tau) dtau.
    """
    x = float(xi_abs)
    if phi is None:
        phi, dphi = bump(3.0, 2.0)
    lo, hi = max(0.0, support[0]), support[1]
    f0 = float(phi(np.array([0.0]))[0]) if phi0 is None else phi0
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    smooth = lambda t: -math.exp(-x * t) * math.sin(t)
    lhs = f0 + integrate.quad(lambda t: smooth(t) * float(phi(np.array([t]))[0]), lo, hi, **opts)[0]
    rhs = -integrate.quad(lambda t: math.exp(-x * t) * math.cos(t)
                          * (float(dphi(np.array([t]))[0]) - x * float(phi(np.array([t]))[0])), lo, hi, **opts)[0]
    rep = IdentityReport(x, lhs, rhs)
    if rep.difference > tol:
        raise IdentityViolation(f"normal-form identity off by {rep.difference:.2e}")
    return rep
