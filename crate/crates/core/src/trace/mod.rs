// SPDX-License-Identifier: Apache-2.0

//! Pure trace polynomials and the generators acting on them.

mod basis;
mod delta;
mod eval;
mod flow;
mod generator;
mod letter;
mod parse;
mod poly;
mod sparse;
mod tables;
mod word;

pub use basis::{basis_dimension, closure_basis, enumerate_basis, Basis, BASIS_CAP};
pub use delta::{apply_delta, apply_delta_tilde, apply_generator, delta_term, delta_tilde_term};
pub use eval::{evaluate_at_identity, evaluate_on_sample};
pub use flow::{
    basis_moments, default_tolerance, expectation_trace, flow, integrate_linear, EXPM_TOL,
};
pub use generator::{build_generator, build_generator_for, GeneratorOperator, Size};
pub use letter::{Letter, Source, Variant};
pub use parse::{parse_matrix_polynomial, parse_trace_polynomial};
pub use poly::{TracePolynomial, PRUNE_THRESHOLD};
pub use sparse::SparseMatrix;
pub use tables::{drift_coef, pair_rule, Coef, PairRule, PAIR_RULES};
pub use word::{minimal_rotation, necklace_count, necklaces, TraceProduct, Word};
