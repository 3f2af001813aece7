"""Poles of 1 + K_j near the origin and the remainder of the branch root bifurcating from +i.

Writes poles.csv (all roots) and branch_root.csv (remainder vs |xi| with the fitted slope).
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from _common import config_from_args, dump_config, write_csv
from vlasov_linear import poisson_kernels as pk
from vlasov_linear.numerics import fit_power_law


@dataclass
class Config:
    out: str = "results/poles"
    j_max: int = 6
    xi_min: float = 0.005
    xi_max: float = 0.05
    n_xi: int = 10


def main(cfg: Config) -> None:
    out = Path(cfg.out)
    dump_config(cfg, out)
    xs = np.geomspace(cfg.xi_min, cfg.xi_max, cfg.n_xi)
    rows, branch = [], []
    for j in range(1, cfg.j_max + 1):
        rems = []
        for x in xs:
            ps = pk.poles_general(j, float(x), r0=cfg.xi_max)
            rows += [[j, x, i, z.real, z.imag] for i, z in enumerate(ps.roots)]
            rems.append(abs(ps.branch_root - pk.branch_root_prediction(j, float(x))))
        slope = fit_power_law(xs, rems)[0] if j >= 2 else float("nan")
        branch += [[j, x, e, slope] for x, e in zip(xs, rems)]
        print(f"j = {j}: branch-root remainder slope {slope:.3f}")
    write_csv(out / "poles.csv", ["j", "xi", "index", "re_zeta", "im_zeta"], rows)
    write_csv(out / "branch_root.csv", ["j", "xi", "remainder", "fitted_slope"], branch)


if __name__ == "__main__":
    main(config_from_args(Config, __doc__))
