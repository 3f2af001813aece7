"""Low-frequency dispersion relation: zeros of r^2 - k(z), Penrose check, Bohm-Gross.

For small r the equation k(zeta) = r^2 has exactly two solutions in a thin
strip, zeta(r) and -conj(zeta(r)), with zeta ~ 1/r. Writing zeta = (1+delta)/r
turns it into the contraction 2 delta + delta^2 = L((1+delta)/r) with
L(z) = z^2 k(z) - 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dispersion_function as df
from .equilibria import Kind, RadialEquilibrium, TailClass, moment
from .errors import BracketViolation, NoConvergence, ResidualTooLarge, TailClassMismatch
from .numerics import ExpansionReport, fit_power_law, winding_number

FIXED_POINT_TOL = 1e-14
MAX_ITER = 100
STAGNATION_TOL = 1e-12
RESIDUAL_TOL = 1e-12


def default_r1(eq: RadialEquilibrium) -> float:
    return 0.3 if eq.kind is Kind.GENERALIZED_POISSON else 0.25


@dataclass
class PenroseReport:
    curve_samples: list
    winding_numbers: dict
    stable: bool
    no_probes: bool = False


@dataclass(frozen=True)
class DispersionPoint:
    r: float
    zeta: complex
    omega: complex
    m_l: complex
    delta: complex
    residual: float = 0.0
    iterations: int = 0

    @property
    def omega1(self) -> float:
        return self.omega.real

    @property
    def omega2(self) -> float:
        return self.omega.imag


def penrose_check(eq: RadialEquilibrium, probes, max_points: int = 400_000) -> PenroseReport:
    """Winding number of the closed curve k(R) about each positive probe."""
    probes = [float(p) for p in probes]
    if any(p <= 0 for p in probes):
        raise ValueError("probes must be positive")
    kfun = lambda phi: df.k_array(eq, np.tan(np.clip(phi, -np.pi / 2 + 1e-12, np.pi / 2 - 1e-12)).astype(complex))
    # sample the curve once on an adaptive grid good for all probes
    samples = None
    windings = {}
    for p in probes:
        w, s, v = winding_number(lambda phi: kfun(phi) - p, -np.pi / 2, np.pi / 2, n0=512,
                                 max_points=max_points)
        windings[p] = w
        if samples is None or s.size > len(samples):
            samples = list(zip(np.tan(np.clip(s, -np.pi / 2 + 1e-12, np.pi / 2 - 1e-12)), v + p))
    if samples is None:
        phi = np.linspace(-np.pi / 2 + 1e-6, np.pi / 2 - 1e-6, 257)
        samples = list(zip(np.tan(phi), kfun(phi)))
    stable = all(w == 0 for w in windings.values())
    return PenroseReport(curve_samples=samples, winding_numbers=windings, stable=stable, no_probes=not probes)


def L_function(eq: RadialEquilibrium, z: complex) -> complex:
    return z * z * df.k_value(eq, z) - 1.0


def solve_zeta(eq: RadialEquilibrium, r: float, delta0: complex = 0.0, r1: float | None = None,
               residual_tol: float = RESIDUAL_TOL) -> DispersionPoint:
    r = float(r)
    r1 = default_r1(eq) if r1 is None else r1
    if not 0 < r <= r1:
        raise NoConvergence(f"r = {r} outside (0, {r1}]")
    delta = complex(delta0)
    prev_step = math.inf
    for it in range(1, MAX_ITER + 1):
        new = (L_function(eq, (1 + delta) / r) - delta * delta) / 2
        if not np.isfinite(new):
            raise NoConvergence(f"fixed point diverged at r = {r}")
        step = abs(new - delta)
        delta = new
        # second test: stagnation at the rounding floor of L (k ~ r^2 loses digits)
        if step < FIXED_POINT_TOL or (step < STAGNATION_TOL and step >= prev_step):
            break
        prev_step = step
    else:
        raise NoConvergence(f"fixed point did not converge at r = {r} (last step {step:.2e})")
    zeta = (1 + delta) / r
    k = df.k_value(eq, zeta)
    resid = abs(k - r * r)
    if resid > residual_tol:
        raise ResidualTooLarge(f"|k(zeta) - r^2| = {resid:.2e} at r = {r}")
    dk = df.dk_value(eq, zeta)
    m_l = -2 * r * k / dk - 1
    return DispersionPoint(r=r, zeta=zeta, omega=r * zeta, m_l=m_l, delta=delta, residual=resid, iterations=it)


def sweep(eq: RadialEquilibrium, r_grid, warm_start: bool = True, **kw) -> list[DispersionPoint]:
    """Solve on a grid; warm start walks from the smallest r upwards."""
    rs = [float(r) for r in r_grid]
    out: dict[int, DispersionPoint] = {}
    prev = 0.0
    for i in sorted(range(len(rs)), key=lambda i: rs[i]):
        pt = solve_zeta(eq, rs[i], delta0=prev if warm_start else 0.0, **kw)
        out[i] = pt
        prev = pt.delta
    return [out[i] for i in range(len(rs))]


def dissipation_bracket(eq: RadialEquilibrium, r: float, point: DispersionPoint | None = None):
    pt = solve_zeta(eq, r) if point is None else point
    dm = float(np.real(eq.dm0(pt.omega1 / pt.r)))
    upper = -math.pi * dm / pt.r**2
    lower = upper / 4
    w2 = pt.omega2
    if not lower <= w2 <= upper:
        raise BracketViolation(f"omega2 = {w2:.6e} not in [{lower:.6e}, {upper:.6e}] at r = {pt.r}")
    return lower, upper, w2


def delta2(eq: RadialEquilibrium, point: DispersionPoint) -> complex:
    a2 = moment(eq, 2).value
    return point.omega - 1 - 1.5 * a2 * point.r**2


def thin_tail_expansion_check(eq: RadialEquilibrium, r_grid) -> ExpansionReport:
    """Decay of delta_2(r) = r zeta(r) - 1 - 3 a2 r^2 / 2 against r^(d-1) + r^4 log(1/r)."""
    if eq.tail_class is not TailClass.THIN:
        raise TailClassMismatch(f"{eq.label} is not thin-tailed")
    rs = [float(r) for r in r_grid]
    if not rs:
        raise ValueError("empty r grid")
    vals = [abs(delta2(eq, solve_zeta(eq, r))) for r in rs]
    env = [r ** (eq.d - 1) + r**4 * math.log(1 / r) for r in rs]
    p, c, deg = fit_power_law(rs, vals)
    return ExpansionReport(p, c, max_ratio=max(v / e for v, e in zip(vals, env)), degenerate=deg,
                           points=list(zip(rs, vals)))


def bohm_gross_residual(eq: RadialEquilibrium, r_grid) -> ExpansionReport:
    """Fit of |omega_1(r) - 1 - 3 a2 r^2 / 2| (real part only)."""
    a2 = moment(eq, 2).value
    rs = [float(r) for r in r_grid]
    vals = [abs(solve_zeta(eq, r).omega1 - 1 - 1.5 * a2 * r * r) for r in rs]
    p, c, deg = fit_power_law(rs, vals)
    return ExpansionReport(p, c, degenerate=deg, points=list(zip(rs, vals)))


def conjugate_zero_residual(eq: RadialEquilibrium, point: DispersionPoint) -> float:
    return abs(df.k_value(eq, -point.zeta.conjugate()) - point.r**2)


def annulus_lower_bound(eq: RadialEquilibrium, r: float, gamma1: float, n: int = 100) -> float:
    """min |r^2 - k(z)| / (r^2 + |z|^-2) over the curves |Im z| = c gamma1 (1+|Re z|),
    c in {1/2, 2}, sampled at n points each side."""
    x = np.concatenate([np.linspace(-4 / r, 4 / r, n)])
    best = math.inf
    for c in (0.5, 2.0):
        for sgn in (1, -1):
            z = x + 1j * sgn * c * gamma1 * (1 + np.abs(x))
            if not np.all(eq.in_strip(z)):
                continue
            k = df.k_array(eq, z)
            ratio = np.abs(r * r - k) / (r * r + np.abs(z) ** -2)
            best = min(best, float(ratio.min()))
    return best
