"""sup_x |h(x, t)| for free streaming with Gaussian and generalized-Poisson velocity profiles."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from _common import config_from_args, dump_config, write_csv
from vlasov_linear import volterra as vt
from vlasov_linear.numerics import fit_power_law


@dataclass
class Config:
    out: str = "results/free_streaming"
    t_min: float = 2.0
    t_max: float = 128.0
    n_t: int = 8


def main(cfg: Config) -> None:
    out = Path(cfg.out)
    dump_config(cfg, out)
    ts = np.geomspace(cfg.t_min, cfg.t_max, cfg.n_t)
    rows = []
    for name, q in (("gaussian", vt.RadialProfile()), ("gp2", vt.RadialProfile("generalized_poisson", j=2)),
                    ("gp3", vt.RadialProfile("generalized_poisson", j=3))):
        sups = [vt.sup_norm_h(vt.RadialProfile(), q, float(t)) for t in ts]
        rows += [[name, t, s] for t, s in zip(ts, sups)]
        print(f"q = {name}: decay exponent {-fit_power_law(ts[ts >= 8], np.array(sups)[ts >= 8])[0]:.3f}")
    write_csv(out / "sup_h.csv", ["velocity_profile", "t", "sup_h"], rows)


if __name__ == "__main__":
    main(config_from_args(Config, __doc__))
