"""Nonlocal elliptic operators with cone-supported kernels on the flat torus."""

from . import const_solver, estimate_verifier, frozen_solver, kernels, plap_lab, symbolics, torus_field
from .errors import ConfigError, NonlocalError, NonzeroMeanWarning
from .torus_field import GridFunction, RegularityOrders, TorusGrid

__version__ = "0.1.0"

__all__ = [
    "torus_field", "kernels", "symbolics", "const_solver", "frozen_solver", "plap_lab", "estimate_verifier",
    "TorusGrid", "GridFunction", "RegularityOrders", "NonlocalError", "ConfigError", "NonzeroMeanWarning",
]
