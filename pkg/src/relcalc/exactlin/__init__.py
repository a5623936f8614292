"""Exact integer linear algebra: presented abelian groups, maps, homology."""

from .complexes import Complex, cone, homology
from .groups import (
    FgAbGroup,
    GroupHom,
    HomGroup,
    Lifter,
    PreimageLattice,
    canonical_form,
    cokernel,
    direct_sum,
    direct_sum_hom,
    factor_through,
    hom_group,
    kernel,
    multiplication,
    solve_presentation,
    tensor_group,
    tensor_hom,
)
from .matrix import IntMatrix, block_diag, hstack, kron, vstack
from .smith import Echelon, KernelLattice, SmithForm, invariant_factors, kernel_lattice, smith, xgcd
