// SPDX-License-Identifier: Apache-2.0

//! LU factorisation with partial pivoting.

use num_traits::Zero;

use super::CMat;
use crate::error::{Error, Result};
use crate::scalar::{c, Real, C};

/// `y += z x` on split rows.
#[inline(always)]
fn axpy_row<T: Real>(z: C<T>, xr: &[T], xi: &[T], yr: &mut [T], yi: &mut [T]) {
    let len = xr.len();
    let (xi, yr, yi) = (&xi[..len], &mut yr[..len], &mut yi[..len]);
    let nzi = -z.im;
    for j in 0..len {
        yr[j] = z.re.mul_add(xr[j], nzi.mul_add(xi[j], yr[j]));
        yi[j] = z.re.mul_add(xi[j], z.im.mul_add(xr[j], yi[j]));
    }
}

pub struct Lu<T> {
    lu: CMat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &CMat<T>) -> Result<Self> {
        let n = a.n();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu.get(k, k).norm();
            for i in k + 1..n {
                let v = lu.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err(Error::Singularity {
                    cond: f64::INFINITY,
                });
            }
            if p != k {
                perm.swap(p, k);
                let (re, im) = lu.parts_mut();
                for j in 0..n {
                    re.swap(k * n + j, p * n + j);
                    im.swap(k * n + j, p * n + j);
                }
            }
            let inv = lu.get(k, k).inv();
            let (re, im) = lu.parts_mut();
            let (top_re, rest_re) = re.split_at_mut((k + 1) * n);
            let (top_im, rest_im) = im.split_at_mut((k + 1) * n);
            let (uk_re, uk_im) = (&top_re[k * n + k + 1..], &top_im[k * n + k + 1..]);
            for (row_re, row_im) in rest_re.chunks_exact_mut(n).zip(rest_im.chunks_exact_mut(n)) {
                let l = c(row_re[k], row_im[k]) * inv;
                row_re[k] = l.re;
                row_im[k] = l.im;
                if l.is_zero() {
                    continue;
                }
                let (ri, ii) = (&mut row_re[k + 1..], &mut row_im[k + 1..]);
                axpy_row(-l, uk_re, uk_im, ri, ii);
            }
        }
        Ok(Self { lu, perm })
    }

    /// Solves `A X = B` for a square right-hand side.
    pub fn solve(&self, b: &CMat<T>) -> CMat<T> {
        let n = self.lu.n();
        assert_eq!(b.n(), n);
        let (bre, bim) = (b.re(), b.im());
        let mut xre = vec![T::zero(); n * n];
        let mut xim = vec![T::zero(); n * n];
        for (i, &p) in self.perm.iter().enumerate() {
            xre[i * n..(i + 1) * n].copy_from_slice(&bre[p * n..(p + 1) * n]);
            xim[i * n..(i + 1) * n].copy_from_slice(&bim[p * n..(p + 1) * n]);
        }
        let (lre, lim) = (self.lu.re(), self.lu.im());
        // forward substitution with unit lower factor, row operations on whole rows
        for i in 0..n {
            for k in 0..i {
                let (ar, ai) = (lre[i * n + k], lim[i * n + k]);
                if ar == T::zero() && ai == T::zero() {
                    continue;
                }
                let (head, tail) = xre.split_at_mut(i * n);
                let (hi, ti) = xim.split_at_mut(i * n);
                let (rk, ik) = (&head[k * n..(k + 1) * n], &hi[k * n..(k + 1) * n]);
                let (ri, ii) = (&mut tail[..n], &mut ti[..n]);
                axpy_row(c(-ar, -ai), rk, ik, ri, ii);
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let (ar, ai) = (lre[i * n + k], lim[i * n + k]);
                if ar == T::zero() && ai == T::zero() {
                    continue;
                }
                let (head, tail) = xre.split_at_mut(k * n);
                let (hi, ti) = xim.split_at_mut(k * n);
                let (rk, ik) = (&tail[..n], &ti[..n]);
                let (ri, ii) = (&mut head[i * n..(i + 1) * n], &mut hi[i * n..(i + 1) * n]);
                axpy_row(c(-ar, -ai), rk, ik, ri, ii);
            }
            let inv = c(lre[i * n + i], lim[i * n + i]).inv();
            let (ri, ii) = (&mut xre[i * n..(i + 1) * n], &mut xim[i * n..(i + 1) * n]);
            for j in 0..n {
                let (a, b) = (ri[j], ii[j]);
                ri[j] = a * inv.re - b * inv.im;
                ii[j] = a * inv.im + b * inv.re;
            }
        }
        CMat::from_parts(n, xre, xim)
    }

    pub fn inverse(&self) -> CMat<T> {
        self.solve(&CMat::identity(self.lu.n()))
    }

    pub fn determinant(&self) -> C<T> {
        let n = self.lu.n();
        let mut d = c(T::one(), T::zero());
        for i in 0..n {
            d *= self.lu.get(i, i);
        }
        let mut swaps = 0;
        let mut seen = vec![false; n];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut j = i;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            swaps += len - 1;
        }
        if swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

/// Inverse together with the 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
pub fn inverse_with_condition<T: Real>(a: &CMat<T>) -> Result<(CMat<T>, f64)> {
    let inv = Lu::factor(a)?.inverse();
    let cond = (a.norm_one() * inv.norm_one()).to_f64_lossy();
    if !cond.is_finite() {
        return Err(Error::Singularity { cond });
    }
    Ok((inv, cond))
}
