"""Linearized Vlasov-Poisson around radial equilibria: dispersion functions, Green's functions, Volterra solvers."""
from .equilibria import RadialEquilibrium, custom, from_dict, from_json, generalized_poisson, maxwellian
from .errors import OracleFailure, VlasovError

__all__ = [
    "RadialEquilibrium",
    "custom",
    "from_dict",
    "from_json",
    "generalized_poisson",
    "maxwellian",
    "OracleFailure",
    "VlasovError",
]
__version__ = "0.1.0"
