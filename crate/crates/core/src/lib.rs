//! Discrimination of symmetric product-state ensembles: dense Hermitian
//! numerics, ensemble constructors, nonorthogonal-basis coordinates, the
//! square-root measurement, unambiguous discrimination as a small
//! semidefinite program, the sequential two-round protocol, and an
//! acceptance suite tying the pieces together.

pub mod ensembles;
pub mod error;
pub mod minerr;
pub mod numerics;
pub mod oblique;
pub mod unambig;
pub mod verify;

pub use ensembles::{
    gram_matrix, linear_independence_check, make_double_trine, make_product_family,
    make_symmetric_states, reciprocal_states, Ensemble, PureState, SymmetricFamilyParams,
    PRODUCT_FAMILY_PAIRS,
};
pub use error::{Error, Result};
pub use minerr::{
    build_srm, build_srm_for_family, chen_analysis, error_probability, local_unitary_witness,
    perfect_discrimination_check, srm_matches_closed_form, srm_optimality_check,
    success_probability, ChenReport, DistilledBasis, Povm, SrmOutcome,
};
pub use numerics::{
    hermitian_eig, kron, matrix_function_on_support, min_eigenvalue, psd_check,
    schmidt_decompose, ComplexMatrix, EigDecomposition, Hermitian, SchmidtDecomposition,
};
pub use oblique::{change_of_basis, coords_in_basis, ObliqueBasis, ObliqueCoords};
pub use unambig::{
    build_reciprocal_povm, check_dual_certificate, equiprobable_optimum, monte_carlo_protocol,
    sequential_protocol_exact, solve_ud_primal, ud_condition_check, ProtocolResult, UdSolution,
};
pub use verify::{run_acceptance, CriterionResult, Level};
