// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo estimates of the one-step quadratic covariation
//! `⟨G^{ε₁}, G^{ε₂}⟩ ♯ V`.
//!
//! Every variant satisfies `dG^ε = c_ε L_ε dW_ε R_ε + (drift)` with
//!
//! | ε       | c_ε  | L_ε     | W_ε | R_ε   |
//! |---------|------|---------|-----|-------|
//! | Id      | iσ   | G       | Z   | I     |
//! | Star    | -iσ  | I       | Z*  | G*    |
//! | Inv     | -iσ  | I       | Z   | G⁻¹   |
//! | InvStar | iσ   | G⁻¹*    | Z*  | I     |
//!
//! and `dW V dW' = κ(W, W') tr_N(V) I dt`, so the bracket equals
//! `c₁ c₂ κ · L₁ R₂ · tr_N(R₁ V L₂)`. The estimator regresses the empirical
//! `ΔG^{ε₁} V ΔG^{ε₂} / dt` on that template.

use rand::Rng;

use super::sample::ProcessState;
use crate::error::{Error, Result};
use crate::linalg::{expm_with_inverse, CMat};
use crate::model::{fill_elliptic, ModelParams};
use crate::scalar::{c, to_c64, Real, C};
use crate::trace::Variant;

fn c_coef(v: Variant) -> C<f64> {
    match v {
        Variant::Id | Variant::InvStar => C::new(0.0, 1.0),
        Variant::Star | Variant::Inv => C::new(0.0, -1.0),
    }
}

fn is_adjoint_noise(v: Variant) -> bool {
    matches!(v, Variant::Star | Variant::InvStar)
}

/// `κ(W₁, W₂)` for the noises driving the two variants.
fn kappa(v1: Variant, v2: Variant, lambda: f64, tau: C<f64>) -> C<f64> {
    let lam = C::new(lambda, 0.0);
    match (is_adjoint_noise(v1), is_adjoint_noise(v2)) {
        (false, false) => lam - tau,
        (true, true) => lam - tau.conj(),
        _ => lam,
    }
}

/// Lemma coefficient `c₁ c₂ σ² κ` of the cell `(ε₁, ε₂)`.
pub fn bracket_coefficient<T: Real>(
    v1: Variant,
    v2: Variant,
    params: &ModelParams<T>,
    sigma: T,
) -> C<f64> {
    let s2 = sigma.to_f64_lossy().powi(2);
    c_coef(v1) * c_coef(v2) * kappa(v1, v2, params.lambda.to_f64_lossy(), to_c64(params.tau)) * s2
}

fn left<T: Real>(v: Variant, s: &ProcessState<T>) -> Option<&CMat<T>> {
    match v {
        Variant::Id => Some(&s.g),
        Variant::InvStar => Some(&s.g_inv_adj),
        _ => None,
    }
}

fn right<T: Real>(v: Variant, s: &ProcessState<T>) -> Option<&CMat<T>> {
    match v {
        Variant::Star => Some(&s.g_adj),
        Variant::Inv => Some(&s.g_inv),
        _ => None,
    }
}

fn product<T: Real>(a: Option<&CMat<T>>, b: Option<&CMat<T>>, n: usize) -> CMat<T> {
    match (a, b) {
        (Some(a), Some(b)) => a.matmul(b),
        (Some(a), None) | (None, Some(a)) => a.clone(),
        (None, None) => CMat::identity(n),
    }
}

/// Template matrix `L₁ R₂ · tr_N(R₁ V L₂)` at the state `s`.
pub fn bracket_template<T: Real>(
    v1: Variant,
    v2: Variant,
    s: &ProcessState<T>,
    v: &CMat<T>,
) -> CMat<T> {
    let n = v.n();
    let outer = product(left(v1, s), right(v2, s), n);
    let mut inner = v.clone();
    if let Some(r1) = right(v1, s) {
        inner = r1.matmul(&inner);
    }
    if let Some(l2) = left(v2, s) {
        inner = inner.matmul(l2);
    }
    outer.scale(inner.trace_normalized())
}

#[derive(Debug, Clone, Copy)]
pub struct BracketEstimate {
    pub eps1: Variant,
    pub eps2: Variant,
    /// Fitted coefficient of the template.
    pub coefficient: C<f64>,
    /// Standard errors of the real and imaginary parts.
    pub std_error: (f64, f64),
    /// Value predicted by the covariation lemma.
    pub expected: C<f64>,
}

impl BracketEstimate {
    /// Largest of the real/imaginary deviations in units of standard error.
    pub fn z_score(&self) -> f64 {
        let d = self.coefficient - self.expected;
        let zr = if self.std_error.0 > 0.0 {
            d.re.abs() / self.std_error.0
        } else if d.re == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let zi = if self.std_error.1 > 0.0 {
            d.im.abs() / self.std_error.1
        } else if d.im == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        zr.max(zi)
    }
}

/// Fixed non-identity starting point and test matrix used by the estimator.
pub fn default_probe<T: Real>(n: usize) -> Result<(ProcessState<T>, CMat<T>)> {
    let m = CMat::from_fn(n, |i, j| {
        let x = (i * 7 + j * 3 + 1) as f64;
        c(
            T::lit(0.35 * (x * 0.7).sin()),
            T::lit(0.25 * (x * 1.3).cos()),
        )
    });
    let m = m.scale(c(T::lit(1.0 / (n as f64).sqrt()), T::zero()));
    let (g, g_inv) = expm_with_inverse(&m)?;
    let v = CMat::from_fn(n, |i, j| {
        let base = if i == j { 1.0 } else { 0.0 };
        let x = (3 * i + 5 * j + 2) as f64;
        c(
            T::lit(base + 0.3 * (x * 0.9).cos() / (n as f64).sqrt()),
            T::lit(0.2 * (x * 0.4).sin() / (n as f64).sqrt()),
        )
    });
    Ok((ProcessState::from_pair(g, g_inv), v))
}

struct Accumulator {
    sum: C<f64>,
    sum_sq: (f64, f64),
}

/// Estimates all 16 cells from the same replicas, process 0 of `params`.
pub fn estimate_all_brackets<T: Real, R: Rng + ?Sized>(
    params: &ModelParams<T>,
    n: usize,
    dt: T,
    reps: usize,
    rng: &mut R,
) -> Result<Vec<BracketEstimate>> {
    if reps < 2 {
        return Err(Error::InvalidArgument(
            "at least two replicas are needed".into(),
        ));
    }
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} must be positive"
        )));
    }
    let sigma = params.sigma(0);
    let (s0, v) = default_probe::<T>(n)?;
    let cells: Vec<(Variant, Variant)> = Variant::ALL
        .iter()
        .flat_map(|&a| Variant::ALL.iter().map(move |&b| (a, b)))
        .collect();
    // conj(template) / ‖template‖², so that a Frobenius pairing gives the fit
    let weights: Vec<CMat<T>> = cells
        .iter()
        .map(|&(a, b)| {
            let t = bracket_template(a, b, &s0, &v);
            let norm2 = t.frobenius_norm().powi(2);
            let mut w = t.adjoint();
            w.scale_real_mut(T::one() / norm2);
            w
        })
        .collect();
    let mut acc: Vec<Accumulator> = cells
        .iter()
        .map(|_| Accumulator {
            sum: C::new(0.0, 0.0),
            sum_sq: (0.0, 0.0),
        })
        .collect();
    let mut dz = CMat::zeros(n);
    let mut scratch = CMat::zeros(n);
    for _ in 0..reps {
        fill_elliptic(params, n, dt, rng, &mut dz, &mut scratch);
        dz.scale_mut(c(T::zero(), sigma));
        let (e, e_inv) = expm_with_inverse(&dz)?;
        let g1 = s0.g.matmul(&e);
        let gi1 = e_inv.matmul(&s0.g_inv);
        let s1 = ProcessState::from_pair(g1, gi1);
        let delta: Vec<CMat<T>> = Variant::ALL
            .iter()
            .map(|&var| s1.get(var) - s0.get(var))
            .collect();
        let v_delta: Vec<CMat<T>> = delta.iter().map(|d| v.matmul(d)).collect();
        for (k, &(a, b)) in cells.iter().enumerate() {
            // ⟨T, ΔG₁ V ΔG₂⟩ / ‖T‖² = tr(W ΔG₁ (V ΔG₂)) with W = T*/‖T‖²
            let wd = weights[k].matmul(&delta[a.index()]);
            let beta = to_c64(wd.trace_of_product(&v_delta[b.index()])) / dt.to_f64_lossy();
            acc[k].sum += beta;
            acc[k].sum_sq.0 += beta.re * beta.re;
            acc[k].sum_sq.1 += beta.im * beta.im;
        }
    }
    let r = reps as f64;
    Ok(cells
        .iter()
        .zip(acc)
        .map(|(&(a, b), acc)| {
            let mean = acc.sum / r;
            let var_re = ((acc.sum_sq.0 - r * mean.re * mean.re) / (r - 1.0)).max(0.0);
            let var_im = ((acc.sum_sq.1 - r * mean.im * mean.im) / (r - 1.0)).max(0.0);
            BracketEstimate {
                eps1: a,
                eps2: b,
                coefficient: mean,
                std_error: ((var_re / r).sqrt(), (var_im / r).sqrt()),
                expected: bracket_coefficient(a, b, params, sigma),
            }
        })
        .collect())
}

/// Single-cell version of [`estimate_all_brackets`].
pub fn estimate_bracket<T: Real, R: Rng + ?Sized>(
    eps1: Variant,
    eps2: Variant,
    params: &ModelParams<T>,
    n: usize,
    dt: T,
    reps: usize,
    rng: &mut R,
) -> Result<BracketEstimate> {
    let all = estimate_all_brackets(params, n, dt, reps, rng)?;
    Ok(all[eps1.index() * 4 + eps2.index()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;
    use crate::rng::replica_rng;

    #[test]
    fn lemma_cells_spot_values() {
        let p = validate_params(1.0, C::new(0.5, 0.3), &[2.0]).unwrap();
        let lam = 1.0;
        let tau = C::new(0.5, 0.3);
        assert_eq!(
            bracket_coefficient(Variant::Id, Variant::Star, &p, 2.0),
            C::new(4.0 * lam, 0.0)
        );
        let d = bracket_coefficient(Variant::Id, Variant::Inv, &p, 2.0) + (tau - lam) * 4.0;
        assert!(d.norm() < 1e-15);
        let d =
            bracket_coefficient(Variant::Star, Variant::Star, &p, 2.0) - (tau.conj() - lam) * 4.0;
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn unit_tau_kills_id_id_cell() {
        let p = validate_params(1.0, C::new(1.0, 0.0), &[1.0]).unwrap();
        let mut rng = replica_rng(1, 0);
        let est = estimate_bracket(Variant::Id, Variant::Id, &p, 6, 1e-3, 400, &mut rng).unwrap();
        assert_eq!(est.expected, C::new(0.0, 0.0));
        assert!(est.z_score() < 5.0, "{est:?}");
    }
}
