"""Low-frequency zeros omega(r) for several equilibria, with the dissipation bracket and Bohm-Gross fit."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from _common import config_from_args, dump_config, write_csv
from vlasov_linear import dispersion_relation as dr
from vlasov_linear import equilibria as E
from vlasov_linear.errors import BracketViolation


@dataclass
class Config:
    out: str = "results/dispersion"
    r_min: float = 0.02
    r_max: float = 0.25
    n_r: int = 24


def main(cfg: Config) -> None:
    out = Path(cfg.out)
    dump_config(cfg, out)
    rs = np.linspace(cfg.r_min, cfg.r_max, cfg.n_r)
    rows = []
    for eq in (E.maxwellian(), *(E.generalized_poisson(j) for j in (1, 2, 3, 4))):
        for pt in dr.sweep(eq, rs):
            try:
                lo, hi, _ = dr.dissipation_bracket(eq, pt.r, pt)
            except BracketViolation:  # only claimed for thin tails
                lo = hi = float("nan")
            rows.append([eq.label, pt.r, pt.omega1, pt.omega2, lo, hi, pt.residual, pt.iterations])
        if eq.tail_class is E.TailClass.THIN:
            rep = dr.bohm_gross_residual(eq, rs[rs <= 0.1])
            print(f"{eq.label}: |omega1 - 1 - 3 a2 r^2/2| ~ r^{rep.exponent:.2f}")
    write_csv(out / "omega.csv", ["equilibrium", "r", "omega1", "omega2", "bracket_lo", "bracket_hi",
                                  "residual", "iterations"], rows)


if __name__ == "__main__":
    main(config_from_args(Config, __doc__))
