"""Small numerical helpers shared across modules."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8


@dataclass
class ExpansionReport:
    """Log-log fit of a remainder against the expansion variable.

    ``exponent`` and ``constant`` describe ``|remainder| ~ constant * x**exponent``;
    ``max_ratio`` is the largest value of remainder / envelope when an envelope
    is supplied (``nan`` otherwise).
    """

    exponent: float
    constant: float
    max_ratio: float = math.nan
    degenerate: bool = False
    points: list = field(default_factory=list)


def fit_power_law(x, y) -> tuple[float, float, bool]:
    """Least-squares fit of ``log|y| = p log x + log c``. Returns (p, c, degenerate)."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y))
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    x, y = x[ok], y[ok]
    if np.unique(x).size < 2:
        return math.nan, math.nan, True
    p, logc = np.polyfit(np.log(x), np.log(y), 1)
    return float(p), float(math.exp(logc)), False


def cauchy_derivative(f, z: complex, radius: float, n: int = 64, order: int = 1) -> complex:
    """``f^(order)(z)`` from the trapezoid rule on a circle (spectrally accurate)."""
    phi = 2.0 * np.pi * np.arange(n) / n
    w = np.exp(1j * phi)
    vals = np.array([f(z + radius * wk) for wk in w], dtype=complex)
    return complex(math.factorial(order) * np.mean(vals * w ** (-order)) / radius**order)


def gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def uniform_growth_ok(values: np.ndarray, factor: float = 2.0) -> bool:
    """True when the max over the far half of a sequence does not exceed ``factor``
    times the max over the near half (no residual growth along the axis)."""
    v = np.abs(np.asarray(values, dtype=float))
    if v.size < 2:
        return True
    h = v.size // 2
    near, far = v[:h].max(), v[h:].max()
    return bool(far <= factor * near or far == 0.0)


def winding_number(f, s0: float, s1: float, n0: int = 256, max_points: int = 400_000,
                   closed: bool = True) -> tuple[int, np.ndarray, np.ndarray]:
    """Winding number of the curve s -> f(s) about the origin.

    ``f`` is vectorised. Segments are bisected until the argument changes by
    less than pi/4 and |df| < 0.1 * dist(curve, 0) on each. Returns
    (winding, s_samples, f_samples). Raises ``UnderResolvedCurve`` past the budget.
    """
    from .errors import UnderResolvedCurve

    s = np.linspace(s0, s1, n0)
    v = np.asarray(f(s), dtype=complex)
    while True:
        if np.any(v == 0):
            raise UnderResolvedCurve("curve passes through the origin")
        dv = np.diff(v)
        darg = np.angle(v[1:] / v[:-1])
        dist = np.minimum(np.abs(v[1:]), np.abs(v[:-1]))
        bad = (np.abs(darg) > np.pi / 4) | (np.abs(dv) > 0.1 * dist)
        if not bad.any():
            break
        if s.size + bad.sum() > max_points:
            raise UnderResolvedCurve(f"curve not resolved with {max_points} samples")
        mids = 0.5 * (s[:-1][bad] + s[1:][bad])
        if np.any(np.diff(s)[bad] < 1e-14 * max(1.0, abs(s1 - s0))):
            raise UnderResolvedCurve("curve passes through (or too close to) the origin")
        vm = np.asarray(f(mids), dtype=complex)
        s = np.concatenate([s, mids])
        v = np.concatenate([v, vm])
        order = np.argsort(s)
        s, v = s[order], v[order]
    total = np.sum(np.angle(v[1:] / v[:-1]))
    if closed:
        total += np.angle(v[0] / v[-1])
    return int(round(total / (2 * np.pi))), s, v


_GL16 = np.polynomial.legendre.leggauss(16)
_GL8 = np.polynomial.legendre.leggauss(8)


def adaptive_panels(g, a: float, b: float, max_width: float, tol: float = 1e-13,
                    max_panels: int = 50_000):
    """Composite 16-point Gauss-Legendre nodes on [a, b] adapted to the vectorised ``g``.

    Panels wider than ``max_width`` are split up front; afterwards a panel is
    bisected while its 16- and 8-point results differ by more than
    ``tol * max(1, |integral|)``. Returns (nodes, weights, g(nodes)).
    """
    from .errors import QuadratureFailure

    n0 = max(1, int(math.ceil((b - a) / max_width)))
    pending = np.linspace(a, b, n0 + 1)
    pending = np.stack([pending[:-1], pending[1:]], axis=1)
    done_x, done_w, done_v = [], [], []
    scale = None
    while pending.size:
        if pending.shape[0] > max_panels:
            raise QuadratureFailure("adaptive panel budget exceeded")
        lo, hi = pending[:, 0], pending[:, 1]
        half = 0.5 * (hi - lo)[:, None]
        mid = 0.5 * (hi + lo)[:, None]
        x16 = half * _GL16[0] + mid
        w16 = half * _GL16[1]
        x8 = half * _GL8[0] + mid
        w8 = half * _GL8[1]
        v16 = np.asarray(g(x16.ravel()), dtype=complex).reshape(x16.shape)
        v8 = np.asarray(g(x8.ravel()), dtype=complex).reshape(x8.shape)
        i16 = np.sum(w16 * v16, axis=1)
        i8 = np.sum(w8 * v8, axis=1)
        if scale is None:
            scale = max(1.0, float(np.abs(np.sum(i16))))
        ok = np.abs(i16 - i8) <= tol * scale
        done_x.append(x16[ok].ravel())
        done_w.append(w16[ok].ravel())
        done_v.append(v16[ok].ravel())
        bad = pending[~ok]
        m = 0.5 * (bad[:, 0] + bad[:, 1])
        pending = np.concatenate([np.stack([bad[:, 0], m], axis=1), np.stack([m, bad[:, 1]], axis=1)])
        if pending.size and np.min(pending[:, 1] - pending[:, 0]) < 1e-12 * max(1.0, abs(b - a)):
            raise QuadratureFailure("adaptive panels collapsed (integrand singular?)")
    x = np.concatenate(done_x)
    order = np.argsort(x)
    return x[order], np.concatenate(done_w)[order], np.concatenate(done_v)[order]
