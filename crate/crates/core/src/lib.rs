//! Exact sumset decompositions over `F_q^n`.
//!
//! Given `S, T ⊆ F_q^n`, [`decompose`] produces `S' ⊆ S` and `T' ⊆ T` with
//! `(S' + T) ∪ (S + T') = S + T` and `|S'| + |T'| <= 2 m_{floor(d/2)} + q^n - m_d`,
//! together with a certificate that can be re-checked independently. The
//! [`verify`] module holds the AP-free and sum-free corollary checks and brute-force
//! baselines for tiny instances.

pub mod cli;
pub mod cover;
pub mod decompose;
pub mod error;
pub mod field;
pub mod matrix;
pub mod monomial;
pub mod sum_matrix;
pub mod vanishing;
pub mod verify;

pub use cover::{first_nonzero_position, line_cover, pivot_basis, LineCover, PivotBasis};
pub use decompose::{
    choose_degree, decompose, degree_bound, symmetric_subset, verify_decomposition, Certificate,
    Decomposition,
};
pub use error::{Error, Result};
pub use field::{complement, make_field, sumset, FieldVector, Limits, PointSet, PrimeField, Space};
pub use matrix::{matrix_rank, Matrix};
pub use monomial::{
    capset_bound_m, count_m, enumerate_monomials, growth_estimate, CountTable, GrowthPoint,
    Monomial,
};
pub use sum_matrix::{clp_decompose, sum_matrix, ClpCertificate, SumMatrix};
pub use vanishing::{build_vanishing_space, eval_poly, PolySubspace, Polynomial};
pub use verify::{
    check_capset_bound, check_sumfree_bound, greedy_decomposition, is_ap_free, is_matching_sumfree,
    oracle_min_decomposition, CapsetReport, OracleResult, OrderedPairFamily, SumfreeReport,
};
