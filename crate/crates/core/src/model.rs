// SPDX-License-Identifier: Apache-2.0

//! Model parameters of the rotated elliptic Brownian motion and sampling of
//! its Gaussian increments.
//!
//! A Wigner increment `ΔH` over a step `dt` is Hermitian with
//! `E[(ΔH)_{ij} (ΔH)_{kl}] = (dt/N) δ_{il} δ_{jk}`: real diagonal entries of
//! variance `dt/N` and complex off-diagonal entries with `E|h_{ij}|² = dt/N`.
//! The elliptic increment is `ΔZ = e^{iθ}(a ΔH + i b ΔH̃)` for two independent
//! Wigner increments, whose law only depends on
//! `λ = a² + b²` and `τ = λ - e^{2iθ}(a² - b²)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{c, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    /// Variance `λ ≥ 0`.
    pub lambda: T,
    /// Complex covariance `τ`, with `|τ - λ| ≤ λ`.
    pub tau: C<T>,
    /// Rotation angle θ in radians.
    pub theta: T,
    pub a: T,
    pub b: T,
    /// Per-process time scales σ_ℓ, one per process.
    pub sigmas: Vec<T>,
}

fn check_sigmas<T: Real>(sigmas: &[T]) -> Result<()> {
    if sigmas.is_empty() {
        return Err(Error::Scale("at least one time scale is required".into()));
    }
    for (l, s) in sigmas.iter().enumerate() {
        if !(*s > T::zero()) || !s.is_finite() {
            return Err(Error::Scale(format!("sigma[{l}] = {s} must be positive")));
        }
    }
    Ok(())
}

/// Solves `(a, b, θ)` from `(λ, τ)` with `θ = arg(λ - τ)/2 ∈ (-π/2, π/2]`.
pub fn validate_params<T: Real>(lambda: T, tau: C<T>, sigmas: &[T]) -> Result<ModelParams<T>> {
    if !lambda.is_finite() || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::Admissibility("parameters must be finite".into()));
    }
    if lambda < T::zero() {
        return Err(Error::Admissibility(format!("lambda = {lambda} < 0")));
    }
    let gap = (c(lambda, T::zero()) - tau).norm();
    let slack = T::lit(64.0) * T::epsilon() * lambda.max(T::one());
    if gap > lambda + slack {
        return Err(Error::Admissibility(format!(
            "|tau - lambda| = {gap} exceeds lambda = {lambda}"
        )));
    }
    check_sigmas(sigmas)?;
    let gap = gap.min(lambda);
    let half = T::lit(0.5);
    let a = ((lambda + gap) * half).sqrt();
    let b = ((lambda - gap) * half).max(T::zero()).sqrt();
    if a == T::zero() && b == T::zero() {
        return Err(Error::Degenerate);
    }
    let theta = if gap == T::zero() {
        T::zero()
    } else {
        (c(lambda, T::zero()) - tau).arg() * half
    };
    Ok(ModelParams {
        lambda,
        tau,
        theta,
        a,
        b,
        sigmas: sigmas.to_vec(),
    })
}

/// `λ = a² + b²`, `τ = λ - e^{2iθ}(a² - b²)`.
pub fn params_from_abtheta<T: Real>(a: T, b: T, theta: T, sigmas: &[T]) -> Result<ModelParams<T>> {
    if a < T::zero() || b < T::zero() || !a.is_finite() || !b.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "a = {a}, b = {b} must be finite and nonnegative"
        )));
    }
    if a == T::zero() && b == T::zero() {
        return Err(Error::Degenerate);
    }
    check_sigmas(sigmas)?;
    let lambda = a * a + b * b;
    let two_theta = theta + theta;
    let rot = c(two_theta.cos(), two_theta.sin());
    let tau = c(lambda, T::zero()) - rot * (a * a - b * b);
    Ok(ModelParams {
        lambda,
        tau,
        theta,
        a,
        b,
        sigmas: sigmas.to_vec(),
    })
}

impl<T: Real> ModelParams<T> {
    /// Number of processes `p`.
    pub fn arity(&self) -> usize {
        self.sigmas.len()
    }

    /// `λ - τ`, the coefficient of the `⟨Z, Z⟩` bracket.
    pub fn lambda_minus_tau(&self) -> C<T> {
        c(self.lambda, T::zero()) - self.tau
    }

    /// Same parameters with a different list of time scales.
    pub fn with_sigmas(&self, sigmas: &[T]) -> Result<Self> {
        check_sigmas(sigmas)?;
        Ok(Self {
            sigmas: sigmas.to_vec(),
            ..self.clone()
        })
    }

    pub fn sigma(&self, process: usize) -> T {
        self.sigmas[process]
    }

    pub fn map_precision<U: Real>(&self) -> ModelParams<U> {
        ModelParams {
            lambda: U::lit(self.lambda.to_f64_lossy()),
            tau: c(
                U::lit(self.tau.re.to_f64_lossy()),
                U::lit(self.tau.im.to_f64_lossy()),
            ),
            theta: U::lit(self.theta.to_f64_lossy()),
            a: U::lit(self.a.to_f64_lossy()),
            b: U::lit(self.b.to_f64_lossy()),
            sigmas: self
                .sigmas
                .iter()
                .map(|s| U::lit(s.to_f64_lossy()))
                .collect(),
        }
    }
}

#[derive(Clone)]
pub struct HermitianIncrement<T> {
    pub matrix: CMat<T>,
    pub dt: T,
    pub n: usize,
}

#[derive(Clone)]
pub struct EllipticIncrement<'a, T> {
    pub matrix: CMat<T>,
    pub dt: T,
    pub n: usize,
    pub params: &'a ModelParams<T>,
}

#[inline]
fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

fn check_step<T: Real>(n: usize, dt: T) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} must be positive"
        )));
    }
    Ok(())
}

/// Fills `out` with a Wigner increment scaled by `scale` (no allocation).
fn fill_hermitian<T: Real, R: Rng + ?Sized>(n: usize, dt: T, rng: &mut R, out: &mut CMat<T>) {
    let var = dt / T::from_usize_lossy(n);
    let sd_diag = var.sqrt();
    let sd_off = (var * T::lit(0.5)).sqrt();
    let (re, im) = out.parts_mut();
    for i in 0..n {
        re[i * n + i] = sd_diag * normal::<T, R>(rng);
        im[i * n + i] = T::zero();
        for j in i + 1..n {
            let x = sd_off * normal::<T, R>(rng);
            let y = sd_off * normal::<T, R>(rng);
            re[i * n + j] = x;
            im[i * n + j] = y;
            re[j * n + i] = x;
            im[j * n + i] = -y;
        }
    }
}

pub fn sample_hermitian_increment<T: Real, R: Rng + ?Sized>(
    n: usize,
    dt: T,
    rng: &mut R,
) -> Result<HermitianIncrement<T>> {
    check_step(n, dt)?;
    let mut matrix = CMat::zeros(n);
    fill_hermitian(n, dt, rng, &mut matrix);
    Ok(HermitianIncrement { matrix, dt, n })
}

/// Writes `e^{iθ}(a ΔH + i b ΔH̃)` into `out`; a zero `a` or `b` skips the
/// corresponding draw.
pub(crate) fn fill_elliptic<T: Real, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    n: usize,
    dt: T,
    rng: &mut R,
    out: &mut CMat<T>,
    scratch: &mut CMat<T>,
) {
    let zero = T::zero();
    if params.a != zero {
        fill_hermitian(n, dt, rng, out);
        out.scale_real_mut(params.a);
    } else {
        let (re, im) = out.parts_mut();
        re.iter_mut().for_each(|x| *x = zero);
        im.iter_mut().for_each(|x| *x = zero);
    }
    if params.b != zero {
        fill_hermitian(n, dt, rng, scratch);
        out.axpy(c(zero, params.b), scratch);
    }
    if params.theta != zero {
        out.scale_mut(c(params.theta.cos(), params.theta.sin()));
    }
}

pub fn sample_elliptic_increment<'a, T: Real, R: Rng + ?Sized>(
    params: &'a ModelParams<T>,
    n: usize,
    dt: T,
    rng: &mut R,
) -> Result<EllipticIncrement<'a, T>> {
    check_step(n, dt)?;
    let mut matrix = CMat::zeros(n);
    let mut scratch = CMat::zeros(n);
    fill_elliptic(params, n, dt, rng, &mut matrix, &mut scratch);
    Ok(EllipticIncrement {
        matrix,
        dt,
        n,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_rng;

    const TOL: f64 = 1e-12;

    #[test]
    fn unitary_case() {
        let p = validate_params(1.0f64, c(0.0, 0.0), &[1.0]).unwrap();
        assert!((p.a - 1.0).abs() < TOL && p.b.abs() < TOL && p.theta.abs() < TOL);
    }

    #[test]
    fn tau_equal_lambda_splits_evenly() {
        let p = validate_params(1.0, c(1.0, 0.0), &[1.0]).unwrap();
        let h = 0.5f64.sqrt();
        assert!((p.a - h).abs() < TOL && (p.b - h).abs() < TOL && p.theta == 0.0);
    }

    #[test]
    fn outside_the_disk_is_rejected() {
        assert!(matches!(
            validate_params(1.0, c(3.0, 0.0), &[1.0]),
            Err(Error::Admissibility(_))
        ));
        assert!(matches!(
            validate_params(-1.0, c(0.0, 0.0), &[1.0]),
            Err(Error::Admissibility(_))
        ));
        assert!(matches!(
            validate_params(1.0, c(0.0, 0.0), &[1.0, 0.0]),
            Err(Error::Scale(_))
        ));
    }

    #[test]
    fn abtheta_examples() {
        let p = params_from_abtheta(1.0f64, 0.0, 0.0, &[1.0]).unwrap();
        assert!((p.lambda - 1.0).abs() < TOL && p.tau.norm() < TOL);
        let h = 0.5f64.sqrt();
        for theta in [0.0, 0.7, -2.0] {
            let p = params_from_abtheta(h, h, theta, &[1.0]).unwrap();
            assert!((p.lambda - 1.0).abs() < TOL && (p.tau - c(1.0, 0.0)).norm() < TOL);
        }
        let p = params_from_abtheta(0.0, 1.0, 0.0, &[1.0]).unwrap();
        assert!((p.tau - c(2.0, 0.0)).norm() < TOL);
        assert_eq!(
            params_from_abtheta(0.0, 0.0, 0.0, &[1.0]),
            Err(Error::Degenerate)
        );
    }

    #[test]
    fn scalar_hermitian_increment_is_standard_normal_scale() {
        let mut rng = replica_rng(7, 0);
        let h = sample_hermitian_increment(1, 1.0, &mut rng).unwrap();
        assert_eq!(h.matrix.im()[0], 0.0);
        assert!(sample_hermitian_increment::<f64, _>(3, 0.0, &mut rng).is_err());
    }

    #[test]
    fn hermitian_increment_is_exactly_hermitian() {
        let mut rng = replica_rng(1, 2);
        let h = sample_hermitian_increment(9, 0.3, &mut rng).unwrap();
        assert_eq!(h.matrix, h.matrix.adjoint());
    }

    #[test]
    fn elliptic_increment_unitary_case_is_hermitian() {
        let p = validate_params(1.0, c(0.0, 0.0), &[1.0]).unwrap();
        let mut rng = replica_rng(3, 4);
        let z = sample_elliptic_increment(&p, 6, 0.1, &mut rng).unwrap();
        assert_eq!(z.matrix, z.matrix.adjoint());
    }

    proptest::proptest! {
        #[test]
        fn round_trip_through_abtheta(
            lambda in 0.05f64..5.0,
            r in 0.0f64..1.0,
            phi in -3.1f64..3.1,
        ) {
            let tau = c(lambda, 0.0) - c(phi.cos(), phi.sin()) * (r * lambda);
            let p = validate_params(lambda, tau, &[1.0]).unwrap();
            let q = params_from_abtheta(p.a, p.b, p.theta, &[1.0]).unwrap();
            proptest::prop_assert!((q.lambda - lambda).abs() <= 1e-12 * lambda.max(1.0));
            proptest::prop_assert!((q.tau - tau).norm() <= 1e-12 * lambda.max(1.0));
        }
    }
}
