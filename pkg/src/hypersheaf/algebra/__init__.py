"""Exact homological algebra over Z, Q and Z/m."""

from .complexes import (
    CochainMap,
    Colimit,
    ComplexError,
    FreeCochainComplex,
    GradedAbelianGroup,
    NotDirectedError,
    cohomology,
    direct_sum,
    filtered_colimit,
    is_acyclic,
    is_quasi_iso,
    mapping_cone,
)
from .lattice import (
    NonFreeKernelError,
    SubquotientBasis,
    is_injective,
    is_surjective,
    kernel_basis,
    rank,
    restrict,
    subquotient_basis,
    subquotient_invariants,
)
from .matrix import ExactMatrix, block_matrix, hstack, vstack
from .rings import INTEGERS, RATIONALS, CoefficientRing, integers_mod
from .smith import SmithForm, smith_decomposition, smith_diagonal, smith_normal_form
from .totalization import (
    CosimplicialComplex,
    DoubleComplex,
    Totalization,
    totalize_cosimplicial,
    totalize_cosimplicial_map,
    totalize_double,
)

__all__ = [
    "CochainMap", "Colimit", "ComplexError", "FreeCochainComplex", "GradedAbelianGroup",
    "NotDirectedError", "cohomology", "direct_sum", "filtered_colimit", "is_acyclic",
    "is_quasi_iso", "mapping_cone", "NonFreeKernelError", "SubquotientBasis",
    "is_injective", "is_surjective", "kernel_basis", "rank", "restrict", "subquotient_basis",
    "subquotient_invariants",
    "ExactMatrix", "block_matrix", "hstack", "vstack", "INTEGERS", "RATIONALS",
    "CoefficientRing", "integers_mod", "SmithForm", "smith_decomposition",
    "smith_diagonal", "smith_normal_form", "CosimplicialComplex", "DoubleComplex", "Totalization", "totalize_cosimplicial_map",
    "totalize_cosimplicial", "totalize_double",
]
