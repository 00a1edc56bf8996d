// SPDX-License-Identifier: Apache-2.0

//! Integration of the multiplicative SDEs and covariation oracles.

mod bracket;
mod config;
mod matfile;
mod sample;
mod simulate;

pub use bracket::{
    bracket_coefficient, bracket_template, default_probe, estimate_all_brackets, estimate_bracket,
    BracketEstimate,
};
pub use config::{default_dt, Orientation, Scheme, TrajectoryConfig, COND_MAX, INVERSE_TOLERANCE};
pub use matfile::{format_matrix, load_matrix, parse_matrix, save_matrix};
pub use sample::{evaluate_word, DetMatrix, GlSample, ProcessState};
pub use simulate::{simulate, simulate_replica, simulate_with_inverse_tracking, DriftReport};
