"""Lowest-Landau-level bases, pseudo-potential operators and spectra."""
from .basis import LLLBasis, build_basis, count_partitions, dim_b_ell, partitions
from .operators import (
    OperatorMatrix,
    angular_momentum_matrix,
    d_normalization,
    haldane_coefficient,
    lll_interaction_matrix,
    pair_coefficient,
    pair_projector_matrix,
    pseudo_hamiltonian,
    trap_matrix,
    two_body_element,
)
from .polynomials import b_ell_subspace, jastrow, laughlin_vector
from .spectral import (
    YrastCurve,
    YrastPoint,
    kernel_dimension,
    laughlin_exponent,
    measured_gap,
    restricted_pseudo_hamiltonian,
    spectrum,
    yrast_scan,
)

__all__ = [
    "LLLBasis", "build_basis", "count_partitions", "dim_b_ell", "partitions",
    "OperatorMatrix", "angular_momentum_matrix", "d_normalization", "haldane_coefficient",
    "lll_interaction_matrix", "pair_coefficient", "pair_projector_matrix", "pseudo_hamiltonian",
    "trap_matrix", "two_body_element", "b_ell_subspace", "jastrow", "laughlin_vector",
    "YrastCurve", "YrastPoint", "kernel_dimension", "laughlin_exponent", "measured_gap",
    "restricted_pseudo_hamiltonian", "spectrum", "yrast_scan",
]
