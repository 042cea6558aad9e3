"""Exact beta-ensemble computations on the momentum spine of the exterior algebra."""

from .exact_core import BudgetError, ContractError, LaurentPoly, SparseForm, hodge_star, wedge
from .spine import SpineContext, build_spine, vandermonde_check, wronskian_blade
from .tau import GramForm, hyperpfaffian, tau_polynomial

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ContractError",
    "GramForm",
    "LaurentPoly",
    "SparseForm",
    "SpineContext",
    "build_spine",
    "hodge_star",
    "hyperpfaffian",
    "tau_polynomial",
    "vandermonde_check",
    "wedge",
    "wronskian_blade",
]
