"""Noncommutative domains, weighted shifts on the Fock space, and isomorphism obstructions."""

from .domains import MatrixTuple, Status, domain_membership
from .fock import PolyElement, build_shifts, poisson_kernel
from .iso import Outcome, disk_detector, obstruction_search, sunada_equivalence
from .symbol import Symbol, collapse, load_symbol, normalize, parse_symbol
from .weights import compute_weights, weight_by_compositions

__version__ = "0.1.0"

__all__ = [
    "MatrixTuple", "Status", "domain_membership",
    "PolyElement", "build_shifts", "poisson_kernel",
    "Outcome", "disk_detector", "obstruction_search", "sunada_equivalence",
    "Symbol", "collapse", "load_symbol", "normalize", "parse_symbol",
    "compute_weights", "weight_by_compositions",
]
