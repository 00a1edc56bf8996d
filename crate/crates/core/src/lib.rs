// SPDX-License-Identifier: Apache-2.0

//! Multiplicative (λ, τ)-Brownian motions on `GL_N(ℂ)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod spectral;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations.
pub type Params = model::ModelParams<f64>;
pub type Matrix = linalg::CMat<f64>;
pub type Sample = sim::GlSample<f64>;
pub type TraceConfig = sim::TrajectoryConfig<f64>;
pub type Polynomial = trace::TracePolynomial<f64>;
pub type Generator = trace::GeneratorOperator<f64>;

/// Single-precision instantiations.
pub type Params32 = model::ModelParams<f32>;
pub type Matrix32 = linalg::CMat<f32>;
pub type Sample32 = sim::GlSample<f32>;
pub type TraceConfig32 = sim::TrajectoryConfig<f32>;
pub type Polynomial32 = trace::TracePolynomial<f32>;
pub type Generator32 = trace::GeneratorOperator<f32>;
