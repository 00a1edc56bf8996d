// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMat};
use crate::scalar::Real;

/// Largest accepted `‖H - H*‖_F` relative to `max(‖H‖_F, 1)`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Sorted eigenvalues of one Hermitian evaluation, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub t: f64,
    pub seed: u64,
    pub poly_id: String,
}

impl SpectralSample {
    pub fn with_metadata(mut self, t: f64, seed: u64, poly_id: impl Into<String>) -> Self {
        self.t = t;
        self.seed = seed;
        self.poly_id = poly_id.into();
        self
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    /// `tr_N f(H)` from the eigenvalues.
    pub fn trace_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.eigenvalues.iter().map(|&x| f(x)).sum::<f64>() / self.n as f64
    }
}

pub fn empirical_spectrum<T: Real>(h: &CMat<T>) -> Result<SpectralSample> {
    let scale = h.frobenius_norm().to_f64_lossy().max(1.0);
    let defect = h.hermitian_defect().to_f64_lossy();
    if !(defect <= HERMITIAN_TOLERANCE * scale) {
        return Err(Error::NotHermitian(defect));
    }
    let eigenvalues = hermitian_eigenvalues(h)?
        .into_iter()
        .map(Real::to_f64_lossy)
        .collect();
    Ok(SpectralSample {
        eigenvalues,
        n: h.n(),
        t: 0.0,
        seed: 0,
        poly_id: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn identity_and_diagonal() {
        let s = empirical_spectrum(&CMat::<f64>::identity(4)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0; 4]);
        let d = CMat::from_diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let s = empirical_spectrum(&d).unwrap();
        for (x, y) in s.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat::<f64>::identity(3);
        m.set(0, 1, c(1.0, 0.0));
        assert!(matches!(
            empirical_spectrum(&m),
            Err(Error::NotHermitian(_))
        ));
    }
}
