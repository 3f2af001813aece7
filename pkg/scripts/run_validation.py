"""Run the oracle suite on the built-in equilibria and print one line per suite."""
import sys
from dataclasses import dataclass

from _common import config_from_args
from vlasov_linear import equilibria as E
from vlasov_linear.validate import run_validation


@dataclass
class Config:
    only: str = ""


def main(cfg: Config) -> int:
    ok = True
    for eq in (E.maxwellian(), E.generalized_poisson(1), E.generalized_poisson(2), E.generalized_poisson(3)):
        rep = run_validation(eq, only=[s for s in cfg.only.split(",") if s] or None)
        print("\n".join(rep.lines()), end="\n\n")
        ok &= rep.passed
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main(config_from_args(Config, __doc__)))
