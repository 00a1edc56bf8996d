// SPDX-License-Identifier: Apache-2.0

//! Spectra of self-adjoint evaluations `PP*`, smooth functional calculus and
//! the Monte-Carlo and exact scans built on them.

mod fit;
mod hs;
mod poly;
mod quad;
mod scans;
mod smooth;
mod spectrum;

pub use fit::{fit_loglog, LogLogFit};
pub use hs::{chi, chi_derivative, hs_trace, HsResult, HS_TOLERANCE};
pub use poly::SelfAdjointPoly;
pub use quad::{adaptive_gauss_kronrod, QuadResult};
pub use scans::{
    replica_spectrum, spectrum_inclusion_check, variance_scan, weak_convergence_scan, DetBuilder,
    InclusionConfig, InclusionReport, McSettings, VariancePoint, VarianceScan, WeakConvergenceScan,
    VARIANCE_FLOOR,
};
pub use smooth::{bump_moments, fatten, SmoothFunction, MAX_ORDER};
pub use spectrum::{empirical_spectrum, SpectralSample, HERMITIAN_TOLERANCE};
