"""Mesh convergence of the Volterra solver and agreement with the Green's-function convolution."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from _common import config_from_args, dump_config, write_csv
from vlasov_linear import equilibria as E
from vlasov_linear import greens_function as gf
from vlasov_linear import volterra as vt


@dataclass
class Config:
    out: str = "results/volterra"
    xi: float = 0.5
    t_max: float = 40.0
    n_base: int = 256


def forcing(r, t):
    return np.exp(-(np.asarray(t) - 5.0) ** 2 / 2) + 0j


def main(cfg: Config) -> None:
    out = Path(cfg.out)
    dump_config(cfg, out)
    rows = []
    for j in (1, 2, 3):
        eq = E.generalized_poisson(j)
        solve = lambda n, rich=False: vt.solve_volterra(eq, forcing, cfg.xi, cfg.t_max, n,
                                                        richardson_extrapolate=rich).rho_hat
        green = lambda n, rich=False: vt.greens_solution(lambda t: gf.greens_closed_form(j, cfg.xi, t).smooth,
                                                         forcing, cfg.xi, cfg.t_max, n, rich)
        for n in (cfg.n_base, 2 * cfg.n_base, 4 * cfg.n_base, 8 * cfg.n_base):
            plain = float(np.max(np.abs(solve(n) - green(n))))
            rich = float(np.max(np.abs(solve(n, True) - green(n, True))))
            rows.append([j, n, plain, rich])
        ratio = vt.mesh_convergence_ratio(solve, cfg.n_base)
        print(f"GP({j}): mesh ratio {ratio:.3f}, Richardson gap at n = {8 * cfg.n_base}: {rows[-1][3]:.2e}")
    write_csv(out / "convergence.csv", ["j", "n_steps", "plain_gap", "richardson_gap"], rows)


if __name__ == "__main__":
    main(config_from_args(Config, __doc__))
