// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra: products, LU, exponentials, spectra.

mod eigh;
mod expm;
mod lu;
mod matrix;

pub use eigh::{hermitian_eigenvalues, tridiagonalize, Tridiagonal};
pub use expm::{expm, expm_with_inverse, pade_plan};
pub use lu::{inverse_with_condition, Lu};
pub use matrix::CMat;
