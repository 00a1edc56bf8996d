// SPDX-License-Identifier: Apache-2.0

//! `e^{tL}` acting on a vector by adaptive Dormand–Prince 5(4) integration.

use super::generator::GeneratorOperator;
use super::poly::TracePolynomial;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Default integration tolerance in double precision.
pub const EXPM_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Tolerance used for a scalar type: `1e-12` in double precision, looser
/// when the type cannot resolve it.
pub fn default_tolerance<T: Real>() -> T {
    T::lit(EXPM_TOL).max(T::epsilon() * T::lit(1e3))
}

/// Integrates `y' = f(y)` from `0` to `t` for a linear `f`.
pub fn integrate_linear<T: Real>(
    y0: &[C<T>],
    t: T,
    tol: T,
    mut f: impl FnMut(&[C<T>], &mut [C<T>]),
) -> Result<Vec<C<T>>> {
    let n = y0.len();
    let mut y = y0.to_vec();
    if t == T::zero() || n == 0 {
        return Ok(y);
    }
    if t < T::zero() {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let zero = C::new(T::zero(), T::zero());
    let mut k: Vec<Vec<C<T>>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    let l = |x: f64| T::lit(x);
    f(&y, &mut k[0]);
    let mut h = {
        let fnorm = k[0].iter().map(|z| z.norm()).fold(T::zero(), T::max);
        let ynorm = y.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        if fnorm > T::zero() {
            (l(0.01) * ynorm.max(tol) / fnorm).min(t)
        } else {
            t
        }
    };
    let mut time = T::zero();
    let mut steps = 0usize;
    while time < t {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Tolerance(format!(
                "flow needed more than {MAX_STEPS} steps"
            )));
        }
        if time + h > t {
            h = t - time;
        }
        let stage = |coefs: &[(usize, f64)], k: &Vec<Vec<C<T>>>, out: &mut [C<T>]| {
            for i in 0..n {
                let mut s = zero;
                for &(j, a) in coefs {
                    s += k[j][i] * l(a);
                }
                out[i] = y[i] + s * h;
            }
        };
        stage(&[(0, A21)], &k, &mut tmp);
        f(&tmp, &mut k[1]);
        stage(&[(0, A31), (1, A32)], &k, &mut tmp);
        f(&tmp, &mut k[2]);
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &mut tmp);
        f(&tmp, &mut k[3]);
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &mut tmp);
        f(&tmp, &mut k[4]);
        stage(
            &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)],
            &k,
            &mut tmp,
        );
        f(&tmp, &mut k[5]);
        stage(
            &[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)],
            &k,
            &mut y_new,
        );
        f(&y_new, &mut k[6]);
        let mut err = T::zero();
        for i in 0..n {
            let e = (k[0][i] * l(E1)
                + k[2][i] * l(E3)
                + k[3][i] * l(E4)
                + k[4][i] * l(E5)
                + k[5][i] * l(E6)
                + k[6][i] * l(E7))
                * h;
            let scale = tol + tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Tolerance("non-finite flow state".into()));
        }
        if err <= T::one() {
            time += h;
            std::mem::swap(&mut y, &mut y_new);
            // first-same-as-last: f(y_new) becomes the next first stage
            k.swap(0, 6);
        }
        let factor = if err == T::zero() {
            l(5.0)
        } else {
            (l(0.9) * err.powf(l(-0.2))).min(l(5.0)).max(l(0.2))
        };
        h *= factor;
        if h < t * T::epsilon() * l(16.0) && time < t {
            return Err(Error::Tolerance(format!(
                "step size underflow at t = {time}"
            )));
        }
    }
    Ok(y)
}

/// Coefficients of `e^{tL} P` in the operator basis.
pub fn flow<T: Real>(p: &TracePolynomial<T>, t: T, op: &GeneratorOperator<T>) -> Result<Vec<C<T>>> {
    let v0 = op.coordinates(p)?;
    integrate_linear(&v0, t, default_tolerance(), |x, y| op.matrix.mul_vec(x, y))
}

/// `E[P(G_t)] = (e^{tL} P)(1)`.
pub fn expectation_trace<T: Real>(
    p: &TracePolynomial<T>,
    t: T,
    op: &GeneratorOperator<T>,
) -> Result<C<T>> {
    let v = flow(p, t, op)?;
    Ok(v.iter().fold(C::new(T::zero(), T::zero()), |s, z| s + z))
}

/// Expected value of every basis element at time `t`, from the adjoint flow
/// `u' = Lᵀ u`, `u(0) = (1, …, 1)`.
pub fn basis_moments<T: Real>(t: T, op: &GeneratorOperator<T>) -> Result<Vec<C<T>>> {
    let ones = vec![C::new(T::one(), T::zero()); op.dim()];
    integrate_linear(&ones, t, default_tolerance(), |x, y| {
        op.matrix.mul_vec_transposed(x, y)
    })
}
