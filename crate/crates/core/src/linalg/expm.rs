// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection follows the backward-error bounds of Higham (2005) for
//! double precision. The approximant `r(X) = q(X)⁻¹ p(X)` satisfies
//! `r(-X) = p(X)⁻¹ q(X) = r(X)⁻¹`, so the inverse exponential comes out of the
//! same polynomial evaluation, and `r(X)` is exactly unitary whenever `X` is
//! skew-Hermitian (up to rounding).

use super::{CMat, Lu};
use crate::error::Result;
use crate::scalar::{c, Real};

#[allow(clippy::excessive_precision)]
const THETA_3: f64 = 1.495585217958292e-2;
#[allow(clippy::excessive_precision)]
const THETA_5: f64 = 2.539398330063230e-1;
#[allow(clippy::excessive_precision)]
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Chosen Padé degree and number of squarings for a given 1-norm.
pub fn pade_plan(norm1: f64) -> (usize, u32) {
    if norm1 <= THETA_3 {
        (3, 0)
    } else if norm1 <= THETA_5 {
        (5, 0)
    } else if norm1 <= THETA_7 {
        (7, 0)
    } else if norm1 <= THETA_9 {
        (9, 0)
    } else {
        let s = (norm1 / THETA_13).log2().ceil().max(0.0) as u32;
        (13, s)
    }
}

fn add_scaled<T: Real>(acc: &mut CMat<T>, coef: f64, m: &CMat<T>) {
    acc.axpy(c(T::lit(coef), T::zero()), m);
}

/// Returns `(U, V)` with `p = V + U`, `q = V - U`.
fn pade_uv<T: Real>(x: &CMat<T>, m: usize) -> (CMat<T>, CMat<T>) {
    let n = x.n();
    let one = |coef: f64| CMat::scaled_identity(n, c(T::lit(coef), T::zero()));
    let x2 = x.matmul(x);
    match m {
        3 | 5 | 7 | 9 => {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            // even powers X^0, X^2, ..., X^{m-1}
            let mut powers = vec![x2.clone()];
            while powers.len() < (m - 1) / 2 {
                let last = powers.last().unwrap().matmul(&x2);
                powers.push(last);
            }
            let mut u_inner = one(b[1]);
            let mut v = one(b[0]);
            for (k, p) in powers.iter().enumerate() {
                let deg = 2 * (k + 1);
                add_scaled(&mut u_inner, b[deg + 1], p);
                add_scaled(&mut v, b[deg], p);
            }
            (x.matmul(&u_inner), v)
        }
        _ => {
            let b = &B13;
            let x4 = x2.matmul(&x2);
            let x6 = x4.matmul(&x2);
            let mut u_hi = CMat::zeros(n);
            add_scaled(&mut u_hi, b[13], &x6);
            add_scaled(&mut u_hi, b[11], &x4);
            add_scaled(&mut u_hi, b[9], &x2);
            let mut u_inner = x6.matmul(&u_hi);
            add_scaled(&mut u_inner, b[7], &x6);
            add_scaled(&mut u_inner, b[5], &x4);
            add_scaled(&mut u_inner, b[3], &x2);
            u_inner.add_scaled_identity(c(T::lit(b[1]), T::zero()));
            let u = x.matmul(&u_inner);
            let mut v_hi = CMat::zeros(n);
            add_scaled(&mut v_hi, b[12], &x6);
            add_scaled(&mut v_hi, b[10], &x4);
            add_scaled(&mut v_hi, b[8], &x2);
            let mut v = x6.matmul(&v_hi);
            add_scaled(&mut v, b[6], &x6);
            add_scaled(&mut v, b[4], &x4);
            add_scaled(&mut v, b[2], &x2);
            v.add_scaled_identity(c(T::lit(b[0]), T::zero()));
            (u, v)
        }
    }
}

/// `exp(X)`.
pub fn expm<T: Real>(x: &CMat<T>) -> Result<CMat<T>> {
    Ok(expm_impl(x, false)?.0)
}

/// `(exp(X), exp(-X))` from a single polynomial evaluation.
pub fn expm_with_inverse<T: Real>(x: &CMat<T>) -> Result<(CMat<T>, CMat<T>)> {
    let (e, inv) = expm_impl(x, true)?;
    Ok((e, inv.expect("inverse requested")))
}

fn expm_impl<T: Real>(x: &CMat<T>, with_inverse: bool) -> Result<(CMat<T>, Option<CMat<T>>)> {
    let norm = x.norm_one().to_f64_lossy();
    let (m, s) = pade_plan(norm);
    let scaled;
    let xs = if s > 0 {
        let mut y = x.clone();
        y.scale_real_mut(T::lit(0.5f64.powi(s as i32)));
        scaled = y;
        &scaled
    } else {
        x
    };
    let (u, v) = pade_uv(xs, m);
    let p = &v + &u;
    let q = &v - &u;
    let mut e = Lu::factor(&q)?.solve(&p);
    let mut inv = if with_inverse {
        Some(Lu::factor(&p)?.solve(&q))
    } else {
        None
    };
    for _ in 0..s {
        e = e.matmul(&e);
        if let Some(i) = inv.as_mut() {
            *i = i.matmul(i);
        }
    }
    Ok((e, inv))
}
