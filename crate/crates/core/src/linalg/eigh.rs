// SPDX-License-Identifier: Apache-2.0

//! Hermitian eigenvalues via Householder tridiagonalisation and implicit QL.

use super::CMat;
use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

/// Real symmetric tridiagonal matrix unitarily similar to a Hermitian input.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[k]` couples rows `k` and `k + 1`.
    pub off: Vec<T>,
}

/// Reduces a Hermitian matrix to real symmetric tridiagonal form.
///
/// Only the lower triangle is read; the caller is responsible for
/// Hermiticity.
pub fn tridiagonalize<T: Real>(h: &CMat<T>) -> Tridiagonal<T> {
    let n = h.n();
    let mut a: Vec<C<T>> = (0..n * n).map(|k| h.get(k / n, k % n)).collect();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let mut v = vec![C::<T>::new(T::zero(), T::zero()); n];
    let mut p = vec![C::<T>::new(T::zero(), T::zero()); n];
    for k in 0..n.saturating_sub(1) {
        let m = k + 1;
        let mut sigma = T::zero();
        for i in m..n {
            sigma += a[i * n + k].norm_sqr();
        }
        let norm_x = sigma.sqrt();
        let x0 = a[m * n + k];
        if norm_x == T::zero() {
            off[k] = T::zero();
            continue;
        }
        let phase = if x0.norm() == T::zero() {
            c(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        // v = x - alpha e1, normalised
        for i in m..n {
            v[i] = a[i * n + k];
        }
        v[m] -= alpha;
        let vnorm = (0..n).skip(m).map(|i| v[i].norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            off[k] = alpha.norm();
            continue;
        }
        for vi in v.iter_mut().take(n).skip(m) {
            *vi /= vnorm;
        }
        // p = A v on the trailing block
        for i in m..n {
            let mut s = C::new(T::zero(), T::zero());
            for j in m..n {
                s += a[i * n + j] * v[j];
            }
            p[i] = s;
        }
        let mut kk = C::new(T::zero(), T::zero());
        for i in m..n {
            kk += v[i].conj() * p[i];
        }
        // w = p - K v
        for i in m..n {
            p[i] -= v[i] * kk;
        }
        let two = T::lit(2.0);
        for i in m..n {
            for j in m..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[i * n + j] -= upd * two;
            }
        }
        off[k] = alpha.norm();
        a[m * n + k] = alpha;
        a[k * n + m] = alpha.conj();
        for i in m + 1..n {
            a[i * n + k] = C::new(T::zero(), T::zero());
            a[k * n + i] = C::new(T::zero(), T::zero());
        }
    }
    for i in 0..n {
        diag[i] = a[i * n + i].re;
    }
    Tridiagonal { diag, off }
}

impl<T: Real> Tridiagonal<T> {
    /// Eigenvalues by the implicit QL algorithm, sorted ascending.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let n = self.diag.len();
        let mut d = self.diag.clone();
        let mut e = vec![T::zero(); n];
        e[..n.saturating_sub(1)].copy_from_slice(&self.off);
        let eps = T::epsilon();
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= eps * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 100 {
                    return Err(Error::Tolerance(
                        "tridiagonal QL iteration did not converge".into(),
                    ));
                }
                let mut g = (d[l + 1] - d[l]) / (T::lit(2.0) * e[l]);
                let mut r = g.hypot(T::one());
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut cs, mut p) = (T::one(), T::one(), T::zero());
                let mut i = m;
                let mut deflated = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = cs * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == T::zero() {
                        d[i + 1] -= p;
                        e[m] = T::zero();
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    cs = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + T::lit(2.0) * cs * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = cs * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = T::zero();
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(d)
    }

    /// `tr_N (T - z)⁻¹` for non-real `z`, from the characteristic polynomial
    /// recurrence `-D'(z)/D(z)` in ratio form.
    pub fn resolvent_trace(&self, z: C<T>) -> C<T> {
        let n = self.diag.len();
        let zero = C::new(T::zero(), T::zero());
        let one = C::new(T::one(), T::zero());
        // r_k = D_k / D_{k-1}, s_k = D_k' / D_k
        let mut r_prev = one; // r_0 = D_0 / D_{-1} unused, D_0 = 1
        let mut s_prev2 = zero; // s_{k-2}
        let mut s_prev = zero; // s_{k-1}, D_0' = 0
        for k in 0..n {
            let a = C::new(self.diag[k], T::zero()) - z;
            let (r, s) = if k == 0 {
                let r = a;
                (r, -one / r)
            } else {
                let b2 = self.off[k - 1] * self.off[k - 1];
                let r = a - C::new(b2, T::zero()) / r_prev;
                let s = (-one + a * s_prev) / r - s_prev2 * b2 / (r * r_prev);
                (r, s)
            };
            s_prev2 = s_prev;
            s_prev = s;
            r_prev = r;
        }
        -s_prev / T::from_usize_lossy(n)
    }
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Real>(h: &CMat<T>) -> Result<Vec<T>> {
    tridiagonalize(h).eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Lu;

    fn hermitian(n: usize) -> CMat<f64> {
        let m = CMat::from_fn(n, |i, j| {
            c(
                ((3 * i + 5 * j) % 11) as f64 / 11.0 - 0.5,
                ((7 * i + 2 * j) % 13) as f64 / 13.0 - 0.5,
            )
        });
        m.hermitian_part()
    }

    #[test]
    fn diagonal_input_sorted() {
        let d = CMat::from_diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn trace_and_frobenius_are_preserved() {
        let h = hermitian(12);
        let ev = hermitian_eigenvalues(&h).unwrap();
        let tr: f64 = ev.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
        let f2: f64 = ev.iter().map(|x| x * x).sum();
        assert!((f2 - h.frobenius_norm().powi(2)).abs() < 1e-11);
    }

    #[test]
    fn shifted_matrix_is_singular_at_each_eigenvalue() {
        let h = hermitian(6);
        for lam in hermitian_eigenvalues(&h).unwrap() {
            let mut s = h.clone();
            s.add_scaled_identity(c(-lam, 0.0));
            let det = Lu::factor(&s)
                .map(|lu| lu.determinant().norm())
                .unwrap_or(0.0);
            assert!(det < 1e-10, "det {det} at {lam}");
        }
    }

    #[test]
    fn resolvent_trace_matches_dense_inverse() {
        let h = hermitian(9);
        let tri = tridiagonalize(&h);
        for z in [c(0.1, 0.3), c(-1.0, 1e-3), c(2.0, -0.5)] {
            let mut s = h.clone();
            s.add_scaled_identity(-z);
            let dense = Lu::factor(&s).unwrap().inverse().trace_normalized();
            let fast = tri.resolvent_trace(z);
            assert!(
                (dense - fast).norm() < 1e-9 * dense.norm().max(1.0),
                "{dense} vs {fast}"
            );
        }
    }
}
