// SPDX-License-Identifier: Apache-2.0

//! Helffer–Sjöstrand functional calculus.
//!
//! For `f ∈ C^{k+1}_c(ℝ)` and Hermitian `H`,
//!
//! ```text
//! tr_N f(H) = (1/π) ∫_ℂ ∂̄F_k(f)(z) tr_N (H - z)⁻¹ d²z,
//! F_k(f)(x + iy) = Σ_{l ≤ k} (iy)^l / l! · f^{(l)}(x) χ(y).
//! ```
//!
//! The integrand at `z̄` is the conjugate of the one at `z`, so only the
//! upper half plane is integrated.

use super::quad::adaptive_gauss_kronrod;
use super::smooth::SmoothFunction;
use crate::error::{Error, Result};
use crate::linalg::{tridiagonalize, CMat};
use crate::scalar::{Real, C};

/// Absolute tolerance on `tr_N f(H)`.
pub const HS_TOLERANCE: f64 = 1e-6;

const MAX_PANELS: usize = 4000;

fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth even cutoff, `1` on `|y| ≤ 1/2` and `0` on `|y| ≥ 1`.
pub fn chi(y: f64) -> f64 {
    let t = 2.0 * y.abs() - 1.0;
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let (a, b) = (psi(1.0 - t), psi(t));
        a / (a + b)
    }
}

pub fn chi_derivative(y: f64) -> f64 {
    let t = 2.0 * y.abs() - 1.0;
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (psi(1.0 - t), psi(t));
    let da = -a / ((1.0 - t) * (1.0 - t));
    let db = b / (t * t);
    let dt = (da * b - a * db) / ((a + b) * (a + b));
    2.0 * dt * y.signum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsResult {
    /// Quadrature value of `tr_N f(H)`.
    pub value: f64,
    /// `tr_N f(H)` from the eigenvalues.
    pub eigen_sum: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// `∂̄F_k(f)(x + iy)`.
fn dbar_extension(f: &SmoothFunction, k: usize, x: f64, y: f64) -> C<f64> {
    let iy = C::new(0.0, y);
    let mut pow = C::new(1.0, 0.0);
    let mut fact = 1.0;
    let dchi = chi_derivative(y);
    let mut sum = C::new(0.0, 0.0);
    for l in 0..=k {
        if l > 0 {
            pow *= iy;
            fact *= l as f64;
        }
        if dchi != 0.0 {
            sum += pow * (f.derivative(l, x) / fact);
        }
    }
    let top = pow * (0.5 * f.derivative(k + 1, x) * chi(y) / fact);
    top + C::new(0.0, 0.5) * sum * dchi
}

/// `tr_N f(H)` by the Helffer–Sjöstrand formula with extension order `k`.
pub fn hs_trace<T: Real>(f: &SmoothFunction, k: usize, h: &CMat<T>) -> Result<HsResult> {
    if k + 1 > f.max_order() {
        return Err(Error::InvalidArgument(format!(
            "order {k} needs derivatives up to {}, function provides {}",
            k + 1,
            f.max_order()
        )));
    }
    let spectrum = super::spectrum::empirical_spectrum(h)?;
    let tri = tridiagonalize(&h.map_precision::<f64>());
    let eigen_sum = spectrum.trace_of(|x| f.value(x));
    let (lo, hi) = f.support();
    let (xa, xb) = (lo - 1.0, hi + 1.0);
    let mut breaks: Vec<f64> = vec![lo, hi];
    breaks.extend(
        spectrum
            .eigenvalues
            .iter()
            .copied()
            .filter(|&e| e > lo && e < hi),
    );
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let inner_tol = 0.1 * HS_TOLERANCE;
    let mut evaluations = 0usize;
    let mut failure = None;
    let outer = adaptive_gauss_kronrod(
        |y| {
            let inner = adaptive_gauss_kronrod(
                |x| {
                    let d = dbar_extension(f, k, x, y);
                    if d == C::new(0.0, 0.0) {
                        return 0.0;
                    }
                    (d * tri.resolvent_trace(C::new(x, y))).re
                },
                xa,
                xb,
                &breaks,
                inner_tol,
                MAX_PANELS,
            );
            match inner {
                Ok(r) => {
                    evaluations += r.evaluations;
                    r.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        &[0.5],
        0.5 * std::f64::consts::PI * HS_TOLERANCE * 0.5,
        MAX_PANELS,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = 2.0 / std::f64::consts::PI;
    Ok(HsResult {
        value: scale * outer.value,
        eigen_sum,
        error_estimate: scale * outer.error + inner_tol,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn cutoff_shape() {
        assert_eq!(chi(0.3), 1.0);
        assert_eq!(chi(-0.5), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert!((chi(0.75) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for &y in &[0.6, 0.75, 0.9, -0.7] {
            let fd = (chi(y + h) - chi(y - h)) / (2.0 * h);
            assert!((fd - chi_derivative(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn scalar_bump_at_zero() {
        let f = SmoothFunction::bump(0.0, 1.0, 1.0).unwrap();
        let r = hs_trace(&f, 3, &CMat::<f64>::zeros(1)).unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-4, "{r:?}");
        assert!((r.eigen_sum - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn vanishing_and_indicator() {
        let h = CMat::from_diag(&[c(-0.5, 0.0), c(0.2, 0.0), c(1.1, 0.0)]);
        let zero = SmoothFunction::bump(5.0, 1.0, 1.0).unwrap();
        assert!(hs_trace(&zero, 3, &h).unwrap().value.abs() < 1e-8);
        let one = SmoothFunction::mollified_indicator(&[(-3.0, 3.0)], 0.5).unwrap();
        let r = hs_trace(&one, 3, &h).unwrap();
        assert!((r.value - 1.0).abs() < 1e-4, "{r:?}");
    }
}
