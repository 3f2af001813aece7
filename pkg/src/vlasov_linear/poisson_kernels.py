"""Exact algebra for the generalized Poisson equilibria m_j ~ (1+r^2)^(-j).

Two independent recursions are kept in exact rational arithmetic:

* ``kj_coefficients`` -- the positive coefficients a_p^(j) of the Volterra
  kernel K_j(xi, theta) = -z^-2 sum_p a_p (|xi|/(iz))^p, z = theta - i|xi|;
* ``qj_polynomial`` -- the polynomial Q_j with (*^j m1_hat)(r) = Q_j(|r|) e^-|r|
  obtained from iterated convolution of the Poisson kernel.

They must agree after normalisation: a_p = (p+1)! d_p / Q_j(0).

Pole computations work in the coordinate zeta = |xi| + i theta in which
K_j/(1+K_j) = N_j(zeta)/P_j(zeta) with the pole polynomial
P_j(zeta) = zeta^(j+1) + sum_p a_p |xi|^p zeta^(j-1-p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BracketFailure, RootCountMismatch, StabilityViolation


@dataclass(frozen=True)
class KjCoefficients:
    j: int
    a: tuple[Fraction, ...]
    N: Fraction  # normaliser N^(j); N^(1) := 1 by convention

    @property
    def a2(self) -> Fraction:
        """a_2^(j), taken as 0 when j < 3 (the kernel has no |xi|^2 term)."""
        return self.a[2] if self.j >= 3 else Fraction(0)


@dataclass(frozen=True)
class QjPolynomial:
    j: int
    d_coeffs: tuple[Fraction, ...]

    def __call__(self, x):
        return sum(float(c) * np.asarray(x, dtype=float) ** p for p, c in enumerate(self.d_coeffs))

    @property
    def value_at_zero(self) -> Fraction:
        return self.d_coeffs[0]

    def kernel_coefficients(self) -> tuple[Fraction, ...]:
        """a_p recovered from this polynomial: (p+1)! d_p / Q_j(0)."""
        q0 = self.d_coeffs[0]
        return tuple(math.factorial(p + 1) * d / q0 for p, d in enumerate(self.d_coeffs))


@dataclass
class PoleSet:
    """Roots of the pole polynomial P_j for one |xi|, in zeta coordinates.

    ``residue_data`` holds the named partial-fraction coefficients (alpha, beta, ...)
    for the closed-form cases and the numerical residues N_j(r)/P_j'(r) for all.
    """

    j: int
    xi_abs: float
    roots: np.ndarray
    residue_data: dict = field(default_factory=dict)
    branch_root: complex | None = None

    def theta_poles(self) -> np.ndarray:
        """Poles of K/(1+K) in the theta variable: theta = -i (zeta - |xi|)."""
        return -1j * (self.roots - self.xi_abs)

    def k_plane_poles(self) -> np.ndarray:
        """Same poles as arguments of the dispersion function k: z = theta/|xi|."""
        return self.theta_poles() / self.xi_abs


@lru_cache(maxsize=None)
def kj_coefficients(j: int) -> KjCoefficients:
    if j < 1:
        raise ValueError("j must be a positive integer")
    a = (Fraction(1),)
    N = Fraction(1)
    for jj in range(1, j):
        # a holds a^(jj); build a^(jj+1)
        weights = [a[k] / (2**k * (k + 1)) for k in range(jj)]
        N = sum(weights, Fraction(0))
        new = [Fraction(1)]
        for p in range(1, jj + 1):
            tail = sum(weights[max(p - 1, 0):], Fraction(0))
            new.append(Fraction((p + 1) * 2 ** (p - 1)) / N * tail)
        a = tuple(new)
    return KjCoefficients(j=j, a=a, N=N)


@lru_cache(maxsize=None)
def qj_polynomial(j: int) -> QjPolynomial:
    if j < 1:
        raise ValueError("j must be a positive integer")
    d = (Fraction(1),)
    for jj in range(1, j):
        # I_-[x^k] = k!/2^(k+1), I_0 and I_+ as in the convolution recursion
        base = [Fraction(math.factorial(k), 2 ** (k + 1)) * d[k] for k in range(jj)]
        new = [2 * sum(base, Fraction(0))]
        for p in range(1, jj + 1):
            new.append(Fraction(2**p, math.factorial(p)) * sum(base[p - 1:], Fraction(0)))
        d = tuple(new)
    return QjPolynomial(j=j, d_coeffs=d)


def fourier_profile(j: int, s):
    """Normalised Fourier transform m_j_hat(s) = Q_j(|s|) e^-|s| / Q_j(0)."""
    q = qj_polynomial(j)
    s = np.abs(np.asarray(s, dtype=float))
    coeffs = [float(c / q.value_at_zero) for c in q.d_coeffs]
    return np.polynomial.polynomial.polyval(s, coeffs) * np.exp(-s)


def pole_polynomial(j: int, xi_abs: float) -> np.ndarray:
    """Coefficients (highest degree first) of P_j(zeta)."""
    a = kj_coefficients(j).a
    c = np.zeros(j + 2)
    c[0] = 1.0
    for p in range(j):
        c[p + 2] = float(a[p]) * xi_abs**p
    return c


def numerator_polynomial(j: int, xi_abs: float) -> np.ndarray:
    c = pole_polynomial(j, xi_abs)
    c[0] = 0.0
    return c


def aberth_roots(coeffs, tol: float = 1e-15, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[0]
    n = c.size - 1
    dc = np.polyder(c)
    radius = 1.0 + np.max(np.abs(c[1:]))
    # offset angle avoids symmetric starts stalling on conjugate pairs
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        ratio = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        step = ratio / (1.0 - ratio * inv.sum(axis=1))
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            break
    # two Newton polishes per root
    for _ in range(2):
        z = z - np.polyval(c, z) / np.polyval(dc, z)
    return z


def _residues(j: int, xi_abs: float, roots: np.ndarray) -> np.ndarray:
    num = numerator_polynomial(j, xi_abs)
    den = np.polyder(pole_polynomial(j, xi_abs))
    return np.polyval(num, roots) / np.polyval(den, roots)


def _bisect_newton(f, df, lo: float, hi: float, tol: float = 1e-14) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise BracketFailure(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(2):
        x -= f(x) / df(x)
    return x


def poles_j2(xi_abs: float) -> PoleSet:
    """Closed-form poles for j = 2: roots {-2 rho, rho +- i kappa}."""
    if xi_abs <= 0:
        raise ValueError("xi_abs must be positive")
    x = float(xi_abs)
    rho = _bisect_newton(lambda r: r + 4 * r**3 - x, lambda r: 1 + 12 * r**2, 0.0, 2 * x)
    kappa = math.sqrt(1 + 3 * rho**2)
    alpha = -4 * rho**3 / (1 + 12 * rho**2)
    beta = -(1 + 24 * rho**4 / (1 + 12 * rho**2)) / (2 * kappa)
    roots = np.array([-2 * rho, rho + 1j * kappa, rho - 1j * kappa])
    data = dict(rho=rho, kappa=kappa, alpha=alpha, beta=beta, residues=_residues(2, x, roots))
    return PoleSet(j=2, xi_abs=x, roots=roots, residue_data=data, branch_root=roots[1])


def poles_j3(xi_abs: float) -> PoleSet:
    """Closed-form poles for j = 3: rho +- i kappa1 and -rho +- i kappa3."""
    if xi_abs <= 0:
        raise ValueError("xi_abs must be positive")
    x = float(xi_abs)
    x2 = x * x
    # cubic in u = rho^2
    f = lambda u: ((16 * u + 8) * u + (1 - 8 * x2)) * u - x2
    df = lambda u: (48 * u + 16) * u + (1 - 8 * x2)
    # one sign change in the coefficients: exactly one positive root, inside (0, 4 x2]
    u = _bisect_newton(f, df, 0.0, 4 * x2)
    rho = math.sqrt(u)
    # cancellation-free forms of rho^2 - |xi|^2 and |xi| - rho
    rho2_minus = -16 * rho**6 / (1 + 8 * rho**2)
    xi_minus_rho = -rho2_minus / (x + rho)
    kappa1 = math.sqrt((1 + 2 * rho**2 + x / rho) / 2)
    kappa3 = math.sqrt(rho**2 - 8 * rho**5 / ((1 + 8 * rho**2) * (x + rho)))
    a = rho * (1 + 4 * rho**2) * rho2_minus / (8 * rho**4 * (1 + 4 * rho**2) + x2)
    c = -a
    b_k1 = -0.25 + a * rho - x / (4 * rho) - a * x / (4 * rho**2)
    d_k3 = xi_minus_rho / (4 * rho) + a * rho + a * x / (4 * rho**2)
    roots = np.array([rho + 1j * kappa1, rho - 1j * kappa1, -rho + 1j * kappa3, -rho - 1j * kappa3])
    data = dict(
        rho=rho, kappa1=kappa1, kappa3=kappa3, a=a, b=b_k1 / kappa1, c=c, d=d_k3 / kappa3,
        residues=_residues(3, x, roots),
    )
    return PoleSet(j=3, xi_abs=x, roots=roots, residue_data=data, branch_root=roots[0])


def branch_root_prediction(j: int, xi_abs: float) -> complex:
    """Leading behaviour of the root bifurcating from +i (valid for j >= 2)."""
    a2 = float(kj_coefficients(j).a2)
    return complex(xi_abs, 1 + (3 - a2) / 2 * xi_abs**2)


def shifted_pole_polynomial(j: int, xi_abs) -> list[Fraction]:
    """Exact coefficients (highest first) of P_j(|xi| + eta) as a polynomial in eta."""
    x = Fraction(xi_abs)
    a = kj_coefficients(j).a
    base = [Fraction(0)] * (j + 2)  # ascending powers of zeta
    base[j + 1] = Fraction(1)
    for p in range(j):
        base[j - 1 - p] += a[p] * x**p
    # Taylor shift zeta = x + eta by repeated synthetic division
    c = base[:]
    n = len(c)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            c[k] += x * c[k + 1]
    return c[::-1]


def hurwitz_stable(coeffs: list[Fraction]) -> bool:
    """Routh test: True iff every root of the real polynomial has negative real part.

    A zero in the first column (the singular cases) is reported as not stable.
    """
    c = [Fraction(v) for v in coeffs]
    if c[0] < 0:
        c = [-v for v in c]
    if any(v <= 0 for v in c):
        return False
    rows = [c[0::2], c[1::2]]
    while len(rows[-1]) and len(rows) < len(c):
        top, bot = rows[-2], rows[-1]
        if bot[0] == 0:
            return False
        new = []
        for k in range(len(top) - 1):
            b_next = bot[k + 1] if k + 1 < len(bot) else Fraction(0)
            new.append((bot[0] * top[k + 1] - top[0] * b_next) / bot[0])
        if not new:
            break
        rows.append(new)
    first = [r[0] for r in rows if r]
    return len(first) == len(c) and all(v > 0 for v in first)


def poles_general(j: int, xi_abs: float, r0: float = 0.05, tol: float = 1e-12) -> PoleSet:
    """All j+1 roots of P_j by simultaneous iteration, with stability checks."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    if not 0 < xi_abs <= r0:
        raise ValueError(f"xi_abs must lie in (0, {r0}]")
    coeffs = pole_polynomial(j, xi_abs)
    roots = aberth_roots(coeffs)
    scale = np.linalg.norm(coeffs)
    resid = np.abs(np.polyval(coeffs, roots))
    distinct = np.min(np.abs(roots[:, None] - roots[None, :]) + np.eye(roots.size) * 1e300)
    if roots.size != j + 1 or np.any(resid > tol * scale) or distinct < 1e-10:
        raise RootCountMismatch(f"deflation check failed: residuals {resid}")
    # exact test; the branch root sits closer to Re = |xi| than double precision resolves for j >= 6
    if not hurwitz_stable(shifted_pole_polynomial(j, xi_abs)):
        raise StabilityViolation(f"P_{j} has a root with Re >= |xi| = {xi_abs}")
    order = np.argsort(-roots.imag)
    roots = roots[order]
    branch = complex(roots[0])
    data = dict(residues=_residues(j, xi_abs, roots), max_small_root_ratio=float(np.max(np.abs(roots[1:-1]) / xi_abs)) if j > 1 else 0.0)
    if j >= 2:
        data["branch_deviation"] = abs(branch - branch_root_prediction(j, xi_abs))
    return PoleSet(j=j, xi_abs=float(xi_abs), roots=roots, residue_data=data, branch_root=branch)
