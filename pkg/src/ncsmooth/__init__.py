"""Exact PBW arithmetic and smooth noncommutative functions over triangular Lie algebras."""
from .errors import NCSmoothError
from .lie_core import LieAlgebra, triangular_flag
from .pbw import UEAElement, format_element, normal_order, parse_element, phi, uea_multiply
from .ncfunc import NCFunctionElement, commutation_rule, from_uea, nc_multiply, to_uea
from .reps import (AdaptedSystem, Representation, build_adapted_system, catalog, central_rep,
                   nilpotent_quotient_rep, tensor_rep, tilde_pi)

__version__ = "0.1.0"

__all__ = [
    "AdaptedSystem", "LieAlgebra", "NCFunctionElement", "NCSmoothError", "Representation",
    "UEAElement", "build_adapted_system", "catalog", "central_rep", "commutation_rule",
    "format_element", "from_uea", "nc_multiply", "nilpotent_quotient_rep", "normal_order",
    "parse_element", "phi", "tensor_rep", "tilde_pi", "to_uea", "triangular_flag", "uea_multiply",
]
