"""Invariant vector fields on compact matrix-group representations.

Numerical realizations of the isomorphism relation X = Y + psi_V on
invariant vector fields: gauge reconstruction of flows, slice
decompositions and transition maps, linearization spectra at relative
equilibria, and chain-homotopy equivalence of the slice and tube
complexes on polynomial truncations.
"""

from .groups import (
    AlgebraVector,
    GroupSpec,
    Splitting,
    adjoint,
    equivariant_splitting,
    exp_map,
    group_from_name,
    invariant_inner_product,
    splitting_from_bases,
)
from .representations import (
    EquivariantMap,
    Representation,
    VectorField,
    act,
    angular_momentum_map,
    central_force_field,
    check_equivariance,
    check_invariance,
    constant_map,
    double_rep,
    hopf_field,
    induced_field,
    induced_field_from_map,
    linear_field,
    polynomial_field,
    sign_line_rep,
    standard_rep,
)
from .isomorphism import (
    IsoWitness,
    orbit_flow_check,
    recover_witness,
    verify_isomorphism,
)
from .flows import (
    GroupTrajectory,
    Trajectory,
    find_relative_equilibrium,
    integrate_flow,
    integrate_gauge,
    verify_gauge_identity,
)
from .slices import (
    Slice,
    build_slice,
    default_splitting,
    slice_change_witness,
    slice_decompose,
    splitting_change_witness,
    stabilizer_algebra,
    stabilizer_component_gens,
    transition_differential,
    transition_map,
)
from .spectra import (
    FixedSubalgebra,
    LinearizationReport,
    compare_slice_spectra,
    fixed_subalgebra,
    linearize,
    shift_check,
)
from .homotopy import (
    EquivariantPolyBasis,
    TruncatedComplex,
    boundary_matrix,
    build_K,
    reynolds_basis,
    verify_homotopy_equivalence,
)
from .scenarios import list_builtins, run_scenario

__version__ = "0.1.0"
