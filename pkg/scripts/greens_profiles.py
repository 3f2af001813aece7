"""Smooth part of the Green's function at several |xi| (high and low frequency) and the low envelope."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from _common import config_from_args, dump_config, write_csv
from vlasov_linear import equilibria as E
from vlasov_linear import greens_function as gf


@dataclass
class Config:
    out: str = "results/greens"
    equilibrium: str = "maxwellian"  # or gp<j>
    tau_max: float = 60.0
    n_tau: int = 241


def _equilibrium(name: str):
    return E.maxwellian() if name == "maxwellian" else E.generalized_poisson(int(name[2:]))


def main(cfg: Config) -> None:
    out = Path(cfg.out)
    dump_config(cfg, out)
    eq = _equilibrium(cfg.equilibrium)
    tau = np.linspace(0, cfg.tau_max, cfg.n_tau)
    rows = []
    for r in (0.05, 0.1, 0.2, 0.5, 1.0, 2.0):
        g = gf.greens(eq, r, tau)
        rows += [[r, g.method, t, s] for t, s in zip(tau, g.smooth)]
        print(f"|xi| = {r}: {g.method}, max |smooth| = {np.max(np.abs(g.smooth)):.3e}")
    write_csv(out / f"greens_{cfg.equilibrium}.csv", ["xi", "method", "tau", "smooth"], rows)
    rs = [0.1, 0.05, 0.025, 0.0125]
    ratios = gf.envelope_ratios_low(eq, rs, tau[::10], thin=eq.tail_class is E.TailClass.THIN)
    write_csv(out / f"envelope_{cfg.equilibrium}.csv", ["xi", "max_ratio"], [[r, float(x.max())] for r, x in zip(rs, ratios)])


if __name__ == "__main__":
    main(config_from_args(Config, __doc__))
