"""Per-mode Volterra equation, free-streaming forcings and the Poisson representations.

For a fixed mode xi (only r = |xi| enters the kernel) the density solves

    rho(t) + int_0^t (t - s) M0_hat((t - s) r) rho(s) ds = h(t).

The kernel vanishes on the diagonal, so the product-trapezoid rule is explicit.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from . import poisson_kernels as pk
from .equilibria import RadialEquilibrium, eval_m0_fourier
from .errors import IdentityViolation, MeshMismatch, NonSeparable, SmallDenominatorWarning
from .greens_function import GreensValue
from .numerics import fit_power_law


def _xi_vector(xi) -> np.ndarray:
    v = np.atleast_1d(np.asarray(xi, dtype=float))
    if v.size == 1:
        return np.array([float(v[0]), 0.0, 0.0])
    if v.size != 3:
        raise ValueError("xi must be a scalar |xi| or a 3-vector")
    return v


# -- radial profiles (used for both g(x) and q(v)) ---------------------------------------
@dataclass(frozen=True)
class RadialProfile:
    """A radial density on R^3 with mass ``amplitude``.

    ``gaussian``: (2 pi s^2)^(-3/2) exp(-|x|^2 / 2 s^2), scale s.
    ``generalized_poisson``: the radial density whose one-dimensional marginal is
    proportional to (1 + u^2)^(-j) (scale 1).
    """

    kind: str = "gaussian"
    scale: float = 1.0
    j: int = 1
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "generalized_poisson"):
            raise ValueError(f"unknown profile {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.kind == "generalized_poisson" and (int(self.j) != self.j or self.j < 1):
            raise ValueError("j must be a positive integer")

    @classmethod
    def from_dict(cls, d: dict) -> "RadialProfile":
        d = dict(d)
        kind = d.pop("kind", "gaussian")
        return cls(kind=kind, scale=float(d.pop("scale", 1.0)), j=int(d.pop("j", 1)),
                   amplitude=float(d.pop("amplitude", 1.0)))

    def _cj(self) -> float:
        j = self.j
        return math.exp(math.lgamma(j) - math.lgamma(j - 0.5)) / math.sqrt(math.pi)

    def density(self, rho):
        x = np.asarray(rho, dtype=float) / self.scale
        if self.kind == "gaussian":
            base = (2 * math.pi) ** -1.5 * np.exp(-x * x / 2)
        else:
            # Q = -m'(rho) / (2 pi rho) for the marginal m = c_j (1 + u^2)^-j
            base = self._cj() * self.j / math.pi * (1 + x * x) ** (-self.j - 1)
        return self.amplitude * base / self.scale**3

    def marginal(self, u):
        x = np.asarray(u, dtype=float) / self.scale
        if self.kind == "gaussian":
            base = np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
        else:
            base = self._cj() * (1 + x * x) ** (-self.j)
        return self.amplitude * base / self.scale

    def fourier(self, s):
        """3D Fourier transform at |xi| = s, equal to the 1D transform of the marginal."""
        x = np.abs(np.asarray(s, dtype=float)) * self.scale
        if self.kind == "gaussian":
            base = np.exp(-x * x / 2)
        else:
            base = pk.fourier_profile(self.j, x)
        return self.amplitude * base

    @property
    def thin(self) -> bool:
        return self.kind == "gaussian"


# -- forcing descriptors ------------------------------------------------------------------
class ForcingKind(str, enum.Enum):
    FREE_STREAMING = "free_streaming"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class ForcingSpec:
    """Either separable free streaming f0 = g(x) q(|v|) or a synthetic h_hat(|xi|, t) callback."""

    kind: ForcingKind
    g: RadialProfile | None = None
    q: RadialProfile | None = None
    callback: Callable | None = field(default=None, compare=False, repr=False)

    @classmethod
    def free_streaming(cls, g: RadialProfile | None = None, q: RadialProfile | None = None) -> "ForcingSpec":
        return cls(ForcingKind.FREE_STREAMING, g or RadialProfile(), q or RadialProfile())

    @classmethod
    def synthetic(cls, callback: Callable) -> "ForcingSpec":
        return cls(ForcingKind.SYNTHETIC, callback=callback)

    @classmethod
    def from_dict(cls, d: dict) -> "ForcingSpec":
        kind = d.get("kind", "free_streaming")
        if kind != "free_streaming":
            raise ValueError(f"only free_streaming forcings can be read from JSON, got {kind!r}")
        if "f0" in d or "g" not in d or "q" not in d:
            raise NonSeparable("free-streaming data must be given as separate 'g' and 'q' profiles")
        return cls.free_streaming(RadialProfile.from_dict(d["g"]), RadialProfile.from_dict(d["q"]))

    def h_hat(self, xi, t) -> np.ndarray:
        r = float(np.linalg.norm(_xi_vector(xi)))
        t = np.asarray(t, dtype=float)
        if self.kind is ForcingKind.SYNTHETIC:
            return np.asarray(self.callback(r, t), dtype=complex) * np.ones_like(t, dtype=complex)
        return (self.g.fourier(r) * self.q.fourier(t * r)).astype(complex)


# -- solver -------------------------------------------------------------------------------------
@dataclass
class VolterraGrid:
    xi: np.ndarray
    t_max: float
    n_steps: int
    rho_hat: np.ndarray
    h_hat: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


def kernel_samples(eq: RadialEquilibrium, xi_abs: float, t: np.ndarray, kernel: Callable | None = None) -> np.ndarray:
    """K(t) = t M0_hat(t |xi|) on the grid; ``kernel`` replaces M0_hat if given."""
    s = t * xi_abs
    mh = eval_m0_fourier(eq, s) if kernel is None else np.asarray(kernel(s), dtype=float)
    return t * np.asarray(mh, dtype=float)


def _march(K: np.ndarray, h: np.ndarray, dt: float) -> np.ndarray:
    n = h.size
    rho = np.empty(n, dtype=complex)
    rho[0] = h[0]
    for i in range(1, n):
        # trapezoid weights: 1/2 at s = 0, 1 inside, the s = t node multiplies K(0) = 0
        acc = np.dot(K[i:0:-1], rho[:i]) - 0.5 * K[i] * rho[0]
        rho[i] = h[i] - dt * acc
    return rho


def richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    """Second-order extrapolation onto the coarse mesh: (4 fine - coarse) / 3."""
    if fine.size != 2 * (coarse.size - 1) + 1:
        raise MeshMismatch("fine mesh must halve the coarse step")
    return (4 * fine[::2] - coarse) / 3


def solve_volterra(eq: RadialEquilibrium, forcing, xi, t_max: float, n_steps: int, *,
                   richardson_extrapolate: bool = False, kernel: Callable | None = None) -> VolterraGrid:
    """Product-trapezoid solution on n_steps + 1 equispaced times.

    ``forcing`` is a :class:`ForcingSpec` or a callable h_hat(|xi|, t).
    """
    if n_steps < 8:
        raise ValueError("n_steps must be at least 8")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    xv = _xi_vector(xi)
    r = float(np.linalg.norm(xv))
    spec = forcing if isinstance(forcing, ForcingSpec) else ForcingSpec.synthetic(forcing)

    def run(n):
        t = np.linspace(0.0, t_max, n + 1)
        h = spec.h_hat(xv, t)
        return _march(kernel_samples(eq, r, t, kernel), h, t_max / n), h

    rho, h = run(n_steps)
    meta = {}
    if richardson_extrapolate:
        fine, _ = run(2 * n_steps)
        rho = richardson(rho, fine)
        meta["richardson"] = True
    return VolterraGrid(xv, float(t_max), int(n_steps), rho, h, meta)


def greens_convolution(smooth, h_hat, dt: float) -> np.ndarray:
    """rho_n = h_n + trapezoid sum of smooth(t_n - t_m) h_m; the delta part of G gives h_n.

    ``smooth`` is an array sampled at k dt, k = 0..n, or a :class:`GreensValue`
    with equispaced tau.
    """
    h = np.asarray(h_hat, dtype=complex)
    if isinstance(smooth, GreensValue):
        tau = np.atleast_1d(smooth.tau)
        if tau.size > 1 and not np.allclose(np.diff(tau), dt, rtol=1e-9, atol=0):
            raise MeshMismatch("Green's function samples are not on the forcing mesh")
        g = np.atleast_1d(np.asarray(smooth.smooth, dtype=complex))
    else:
        g = np.atleast_1d(np.asarray(smooth, dtype=complex))
    if g.size != h.size:
        raise MeshMismatch(f"{g.size} Green's samples for {h.size} forcing samples")
    n = h.size
    out = np.empty(n, dtype=complex)
    out[0] = h[0]
    for i in range(1, n):
        conv = np.dot(g[i::-1], h[: i + 1]) - 0.5 * (g[i] * h[0] + g[0] * h[i])
        out[i] = h[i] + dt * conv
    return out


def greens_solution(smooth_fn: Callable, forcing, xi_abs: float, t_max: float, n_steps: int,
                    richardson_extrapolate: bool = False) -> np.ndarray:
    """Convolution solution with G sampled from ``smooth_fn(tau)``; optional extrapolation."""
    spec = forcing if isinstance(forcing, ForcingSpec) else ForcingSpec.synthetic(forcing)

    def run(n):
        t = np.linspace(0.0, t_max, n + 1)
        return greens_convolution(np.asarray(smooth_fn(t)), spec.h_hat(xi_abs, t), t_max / n)

    out = run(n_steps)
    return richardson(out, run(2 * n_steps)) if richardson_extrapolate else out


def mesh_convergence_ratio(solver: Callable[[int], np.ndarray], n_steps: int) -> float:
    """||u(dt) - u(dt/2)|| / ||u(dt/2) - u(dt/4)|| on the coarse mesh; solver(n) -> samples."""
    a, b, c = solver(n_steps), solver(2 * n_steps), solver(4 * n_steps)
    num = np.max(np.abs(a - b[::2]))
    den = np.max(np.abs(b[::2] - c[::4]))
    return float(num / den)


def oscillation_peak(grid: VolterraGrid, window: float | None = None) -> float:
    """Angular frequency of the largest spectral peak of rho - h over the last ``window``."""
    t = grid.t
    window = grid.t_max / 2 if window is None else window
    m = t >= grid.t_max - window
    sig = (grid.rho_hat - grid.h_hat)[m]
    sig = sig - sig.mean()
    taper = np.hanning(sig.size)
    pad = 16 * sig.size
    spec = np.abs(np.fft.fft(sig * taper, pad))
    freqs = 2 * np.pi * np.fft.fftfreq(pad, d=grid.dt)
    return float(abs(freqs[np.argmax(spec)]))


# -- free streaming -----------------------------------------------------------------------------
@dataclass
class DecayReport:
    exponent: float
    times: list
    sup_values: list


_MU = np.polynomial.legendre.leggauss(96)


def _h_physical(g: RadialProfile, q: RadialProfile, R: float, t: float) -> float:
    """h(x, t) = int g(x - t v) q(v) dv at |x| = R, via y = t v in spherical coordinates."""
    mu, wmu = _MU

    def inner(y):
        d = np.sqrt(np.maximum(R * R + y * y - 2 * R * y * mu, 0.0))
        return y * y * float(q.density(y / t)) * float(np.dot(wmu, g.density(d)))

    # the y scale is set by g and R; split at 2R so the bump near y = R is seen
    opts = dict(epsabs=0.0, epsrel=1e-11, limit=400)
    split = 2 * R + g.scale
    val = integrate.quad(inner, 0.0, split, **opts)[0] + integrate.quad(inner, split, np.inf, **opts)[0]
    return 2 * math.pi * val / t**3


def sup_norm_h(g: RadialProfile, q: RadialProfile, t: float, n_radii: int = 9) -> float:
    """sup_x |h(x, t)| over a coarse radial grid |x| in [0, 4 g.scale]."""
    if t == 0:
        return float(g.density(0.0)) * q.amplitude
    radii = np.linspace(0.0, 4 * g.scale, n_radii)
    return max(abs(_h_physical(g, q, float(R), float(t))) for R in radii)


def free_streaming_forcing(forcing: ForcingSpec, t_grid, xi, decay_times=(4, 8, 16, 32, 64),
                           n_radii: int = 9):
    """h_hat on ``t_grid`` and a power-law fit of sup_x |h(., t)| over ``decay_times``."""
    if forcing.kind is not ForcingKind.FREE_STREAMING or forcing.g is None or forcing.q is None:
        raise NonSeparable("free streaming needs separable data g(x) q(|v|)")
    t = np.asarray(t_grid, dtype=float)
    h = forcing.h_hat(xi, t)
    report = None
    if decay_times:
        ts = [float(s) for s in decay_times]
        sups = [sup_norm_h(forcing.g, forcing.q, s, n_radii) for s in ts]
        p, _, _ = fit_power_law(ts, sups)
        report = DecayReport(exponent=-p, times=ts, sup_values=sups)
    return h, report


# -- Poisson representations --------------------------------------------------------------------
@dataclass(frozen=True)
class SeparableSampler:
    """h_hat(xi, v, t) = g_hat(|xi|) q(|v|) a(t) with radial q given by its profile."""

    g: RadialProfile
    q: RadialProfile
    a: Callable
    da: Callable | None = None

    def volterra_forcing(self) -> Callable:
        # h_hat(xi, t) = int exp(-i t <v, xi>) h_hat(xi, v, t) dv
        return lambda r, t: self.g.fourier(r) * self.a(np.asarray(t, dtype=float)) * self.q.fourier(
            np.asarray(t, dtype=float) * r)


@dataclass
class RepresentationResult:
    t: np.ndarray
    rho_I: np.ndarray
    rho_II: np.ndarray
    parts: dict = field(default_factory=dict)


def _fd_derivative(a: Callable, t: np.ndarray) -> np.ndarray:
    # fourth-order central differences, one-sided fourth-order stencils at the ends
    dt = t[1] - t[0]
    f = np.asarray(a(t), dtype=complex)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dt)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dt)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dt)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * dt)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * dt)
    return d


def _u_rule(q: RadialProfile, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    if q.thin:
        L = 12 * q.scale
        return L * x, L * w
    # fat marginal: u = scale tan(phi)
    phi = 0.5 * np.pi * x
    u = q.scale * np.tan(phi)
    return u, 0.5 * np.pi * w * q.scale / np.cos(phi) ** 2


def _damped_cumulative(f: np.ndarray, r: float, dt: float) -> np.ndarray:
    """I_n = int_0^{t_n} exp(-(t_n - s) r) f(s) ds by the trapezoid rule, marched stably."""
    out = np.empty_like(f)
    out[0] = 0.0
    decay = math.exp(-dt * r)
    for i in range(1, f.size):
        out[i] = decay * out[i - 1] + 0.5 * dt * (decay * f[i - 1] + f[i])
    return out


def poisson_representations(sampler: SeparableSampler, xi, t_grid, n_u: int = 400,
                            check_tol: float | None = None) -> RepresentationResult:
    """rho = R + Re{exp(-it) T} for both operator pairs, in Fourier variables.

    Re{.} in x turns into (F(xi) + conj F(-xi)) / 2, so T is evaluated at xi and -xi.
    """
    xv = _xi_vector(xi)
    r = float(np.linalg.norm(xv))
    if r <= 0:
        raise ValueError("|xi| must be positive")
    t = np.asarray(t_grid, dtype=float)
    if t.size < 5 or t[0] != 0.0 or not np.allclose(np.diff(t), t[1] - t[0]):
        raise MeshMismatch("t_grid must be equispaced, start at 0 and have at least 5 points")
    dt = float(t[1] - t[0])
    u, wu = _u_rule(sampler.q, n_u)
    near = np.min(np.abs(1 - r * u - 1j * r))
    if near < 0.1:
        warnings.warn(f"small denominator |1 - <v,xi> - i|xi|| = {near:.3g}; doubling the v rule",
                      SmallDenominatorWarning, stacklevel=2)
        u, wu = _u_rule(sampler.q, 2 * n_u)
    mq = sampler.q.marginal(u) * wu
    ghat = float(sampler.g.fourier(r))
    a = np.asarray(sampler.a(t), dtype=complex)
    da = np.asarray(sampler.da(t), dtype=complex) if sampler.da is not None else _fd_derivative(sampler.a, t)

    phase = np.exp(-1j * np.outer(t, r * u))  # exp(-i t <v, xi>)
    parts = {}
    rho = {}
    for label in ("I", "II"):
        T_pm = []
        for sgn in (1.0, -1.0):
            ru = sgn * r * u
            ph = phase if sgn > 0 else phase.conj()
            if label == "I":
                f = -1j * np.exp(1j * t) * ghat * a * (ph @ mq)
                T = _damped_cumulative(f, r, dt)
            else:
                den = 1 - ru - 1j * r
                boundary = np.exp(-t * r) * ghat * a[0] * np.sum(mq / den)
                f = np.exp(1j * t) * ghat * da * (ph @ (mq / den))
                T = boundary + _damped_cumulative(f, r, dt)
            T_pm.append(T)
        if label == "I":
            R = ghat * a * (phase @ mq)
        else:
            zz = (r - 1j * r * u) ** 2
            R = ghat * a * (phase @ (mq * zz / (1 + zz)))
        e = np.exp(-1j * t)
        rho[label] = R + 0.5 * (e * T_pm[0] + np.conj(e * T_pm[1]))
        parts[f"R_{label}"], parts[f"T_{label}"] = R, T_pm[0]
    out = RepresentationResult(t, rho["I"], rho["II"], parts)
    if check_tol is not None:
        diff = float(np.max(np.abs(out.rho_I - out.rho_II)))
        if diff > check_tol:
            raise IdentityViolation(f"representations differ by {diff:.2e}")
    return out


def poisson_greens_smooth(tau, xi_abs: float) -> np.ndarray:
    """Smooth part of the Poisson (GP(1)) Green's function, -exp(-r tau) sin tau."""
    tau = np.asarray(tau, dtype=float)
    return -np.exp(-xi_abs * tau) * np.sin(tau)
