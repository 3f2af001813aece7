"""Cross-module oracle suite used by ``vlasov-linear validate``.

Every suite returns a :class:`SuiteResult`; failures are collected, never raised,
so one report lists all of them.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import dispersion_function as df
from . import dispersion_relation as dr
from . import greens_function as gf
from . import poisson_kernels as pk
from . import volterra as vt
from .equilibria import Kind, RadialEquilibrium

DEFAULT_TOLERANCES = {
    "k_closed": 1e-8,
    "residual": 1e-10,
    "omega": 1e-10,
    "greens": 1e-7,
    "greens_line": 1e-8,
    "volterra": 1e-6,
    "convergence": 0.4,  # allowed distance of the mesh ratio from 4
    "decay": 0.1,
    "identity": 1e-8,
}

PENROSE_PROBES = (0.1, 0.5, 1.0, 2.0, 5.0)


def merge_tolerances(overrides: dict | None) -> tuple[dict, list[str]]:
    """Apply overrides that loosen a default; tighter or unknown ones are ignored and reported."""
    tol = dict(DEFAULT_TOLERANCES)
    ignored = []
    for key, val in (overrides or {}).items():
        if key not in tol:
            ignored.append(f"unknown tolerance {key!r}")
        elif float(val) < tol[key]:
            ignored.append(f"{key}={val} would tighten the default {tol[key]}")
        else:
            tol[key] = float(val)
    return tol, ignored


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class ValidationReport:
    equilibrium: str
    results: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        out = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<26} {r.detail} ({r.seconds:.1f}s)" for r in self.results]
        out.append(f"{'PASS' if self.passed else 'FAIL'}  overall [{self.equilibrium}]")
        return out


def _closed_j(eq: RadialEquilibrium) -> int | None:
    if eq.kind is Kind.GENERALIZED_POISSON and eq.j <= 3:
        return eq.j
    return None


# -- suites -------------------------------------------------------------------------------------
def suite_recursions(eq, tol):
    bad = [j for j in range(1, 9) if pk.qj_polynomial(j).kernel_coefficients() != pk.kj_coefficients(j).a]
    return not bad, "exact for j = 1..8" if not bad else f"mismatch at j = {bad}"


def suite_k_closed(eq, tol):
    if not df.has_closed_form(eq):
        return True, "no closed form (skipped)"
    rng = np.random.default_rng(7)
    th = eq.theta_prime / 2
    x = rng.uniform(-12, 12, 200)
    y = rng.uniform(-0.999, 0.999, 200) * th * (1 + np.abs(x))
    err = max(abs(df.k_closed(eq, complex(a, b)) - df.k_quadrature(eq, complex(a, b))) for a, b in zip(x, y))
    return err <= tol["k_closed"], f"max |closed - quadrature| = {err:.2e}"


def suite_penrose(eq, tol):
    rep = dr.penrose_check(eq, PENROSE_PROBES)
    return rep.stable, f"windings {sorted(set(rep.winding_numbers.values()))}"


def suite_dispersion(eq, tol):
    worst_res, worst_conj, worst_omega = 0.0, 0.0, 0.0
    for r in (0.05, 0.1, 0.15, 0.2):
        pt = dr.solve_zeta(eq, r, residual_tol=tol["residual"])
        worst_res = max(worst_res, pt.residual)
        worst_conj = max(worst_conj, dr.conjugate_zero_residual(eq, pt))
        if eq.kind is Kind.GENERALIZED_POISSON and eq.j == 1:
            worst_omega = max(worst_omega, abs(pt.omega - complex(1, r)))
    ok = worst_res <= tol["residual"] and worst_conj <= tol["residual"] and worst_omega <= tol["omega"]
    return ok, f"residual {worst_res:.1e}, mirrored zero {worst_conj:.1e}, omega error {worst_omega:.1e}"


def suite_bracket(eq, tol):
    for r in (0.1, 0.15, 0.2, 0.25):
        dr.dissipation_bracket(eq, r)
    return True, "omega2 inside [-pi m0'/(4 r^2), -pi m0'/r^2] for r in {0.1,...,0.25}"


def suite_greens(eq, tol):
    tau = np.linspace(0, 20, 41)
    j = _closed_j(eq)
    if j is not None:
        lo = gf.greens_contour_low(eq, 0.05, tau).smooth - gf.greens_closed_form(j, 0.05, tau).smooth
        hi = gf.greens_contour_high(eq, 1.0, tau, gamma0=0.0).smooth - gf.greens_closed_form(j, 1.0, tau).smooth
        err = max(np.max(np.abs(lo)), np.max(np.abs(hi)))
        return err <= tol["greens"], f"closed vs low/real line: {err:.1e}"
    a = gf.greens_contour_high(eq, 1.0, tau)
    b = gf.greens_contour_high(eq, 1.0, tau, gamma0=0.0)
    err = float(np.max(np.abs(a.smooth - b.smooth)))
    return err <= tol["greens_line"], f"shifted line vs real line at |xi| = 1: {err:.1e}"


def _bump_forcing(r, t):
    return np.exp(-(np.asarray(t) - 5.0) ** 2 / 2) + 0j


def suite_volterra(eq, tol):
    r = 0.5
    ratio = vt.mesh_convergence_ratio(lambda n: vt.solve_volterra(eq, _bump_forcing, r, 40.0, n).rho_hat, 256)
    ok = abs(ratio - 4.0) <= tol["convergence"]
    detail = f"mesh ratio {ratio:.3f}"
    j = _closed_j(eq)
    if j is not None:
        a = vt.solve_volterra(eq, _bump_forcing, r, 40.0, 2048, richardson_extrapolate=True).rho_hat
        b = vt.greens_solution(lambda t: gf.greens_closed_form(j, r, t).smooth, _bump_forcing, r, 40.0, 2048,
                               richardson_extrapolate=True)
        err = float(np.max(np.abs(a - b)))
        ok = ok and err <= tol["volterra"]
        detail += f", Volterra vs Green {err:.1e}"
    return ok, detail


def suite_free_streaming(eq, tol):
    _, rep = vt.free_streaming_forcing(vt.ForcingSpec.free_streaming(), [0.0], 1.0)
    return abs(rep.exponent - 3.0) <= tol["decay"], f"sup-norm decay exponent {rep.exponent:.3f}"


def suite_normal_form(eq, tol):
    if not (eq.kind is Kind.GENERALIZED_POISSON and eq.j == 1):
        return True, "Poisson equilibrium only (skipped)"
    worst = max(gf.normal_form_identity_check(x, tol=tol["identity"]).difference for x in (0.05, 0.5, 2.0))
    return True, f"identity holds to {worst:.1e}"


SUITES = [
    ("kernel_recursions", suite_recursions),
    ("k_closed_vs_quadrature", suite_k_closed),
    ("penrose", suite_penrose),
    ("dispersion_relation", suite_dispersion),
    ("dissipation_bracket", suite_bracket),
    ("greens_function", suite_greens),
    ("volterra", suite_volterra),
    ("free_streaming_decay", suite_free_streaming),
    ("normal_form", suite_normal_form),
]


def run_validation(eq: RadialEquilibrium, overrides: dict | None = None, only: list[str] | None = None) -> ValidationReport:
    tol, notes = merge_tolerances(overrides)
    rep = ValidationReport(eq.label, notes=notes)
    for name, fn in SUITES:
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn(eq, tol)
        except Exception as exc:  # a crash is a failure of that suite, not of the report
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rep.results.append(SuiteResult(name, bool(ok), detail, time.perf_counter() - t0))
    return rep
