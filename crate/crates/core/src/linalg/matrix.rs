// SPDX-License-Identifier: Apache-2.0

//! Dense square complex matrices stored as split real/imaginary planes.
//!
//! The split layout keeps the inner product loops on plain `T` slices so
//! they vectorise; every public accessor still speaks `Complex<T>`.

use std::ops::{Add, AddAssign, Mul, Sub};

use num_traits::{One, Zero};

use crate::scalar::{c, Real, C};

const IB: usize = 4;
const JB: usize = 8;

#[derive(Clone, PartialEq)]
pub struct CMat<T> {
    n: usize,
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> std::fmt::Debug for CMat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self.get(i, j);
                write!(f, "{:+.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> CMat<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            re: vec![T::zero(); n * n],
            im: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.re[i * n + i] = T::one();
        }
        m
    }

    pub fn scaled_identity(n: usize, z: C<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, z);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_diag(d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, z) in d.iter().enumerate() {
            m.set(i, i, *z);
        }
        m
    }

    /// Builds from row-major complex entries.
    pub fn from_rows(n: usize, entries: &[C<T>]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        let mut m = Self::zeros(n);
        for (k, z) in entries.iter().enumerate() {
            m.re[k] = z.re;
            m.im[k] = z.im;
        }
        m
    }

    pub fn from_parts(n: usize, re: Vec<T>, im: Vec<T>) -> Self {
        assert_eq!(re.len(), n * n);
        assert_eq!(im.len(), n * n);
        Self { n, re, im }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn re(&self) -> &[T] {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &[T] {
        &self.im
    }

    #[inline]
    pub fn parts_mut(&mut self) -> (&mut [T], &mut [T]) {
        (&mut self.re, &mut self.im)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        let k = i * self.n + j;
        c(self.re[k], self.im[k])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C<T>) {
        let k = i * self.n + j;
        self.re[k] = z.re;
        self.im[k] = z.im;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, z: C<T>) {
        let k = i * self.n + j;
        self.re[k] += z.re;
        self.im[k] += z.im;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j];
                out.im[j * n + i] = -self.im[i * n + j];
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j];
                out.im[j * n + i] = self.im[i * n + j];
            }
        }
        out
    }

    pub fn scale(&self, z: C<T>) -> Self {
        let mut out = self.clone();
        out.scale_mut(z);
        out
    }

    pub fn scale_mut(&mut self, z: C<T>) {
        for k in 0..self.re.len() {
            let (a, b) = (self.re[k], self.im[k]);
            self.re[k] = a * z.re - b * z.im;
            self.im[k] = a * z.im + b * z.re;
        }
    }

    pub fn scale_real_mut(&mut self, s: T) {
        self.re.iter_mut().for_each(|x| *x *= s);
        self.im.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += z * other`
    pub fn axpy(&mut self, z: C<T>, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for k in 0..self.re.len() {
            let (a, b) = (other.re[k], other.im[k]);
            self.re[k] += a * z.re - b * z.im;
            self.im[k] += a * z.im + b * z.re;
        }
    }

    pub fn add_scaled_identity(&mut self, z: C<T>) {
        for i in 0..self.n {
            self.add_at(i, i, z);
        }
    }

    /// Matrix product into a preallocated output.
    pub fn matmul_into(&self, rhs: &Self, out: &mut Self) {
        let n = self.n;
        assert_eq!(n, rhs.n);
        assert_eq!(n, out.n);
        let jb_end = n - n % JB;
        let ib_end = n - n % IB;
        for i0 in (0..ib_end).step_by(IB) {
            for j0 in (0..jb_end).step_by(JB) {
                self.block(rhs, out, i0, j0);
            }
        }
        // ragged edges
        for i in 0..n {
            let j_from = if i < ib_end { jb_end } else { 0 };
            for j in j_from..n {
                let (mut sr, mut si) = (T::zero(), T::zero());
                for k in 0..n {
                    let (ar, ai) = (self.re[i * n + k], self.im[i * n + k]);
                    let (br, bi) = (rhs.re[k * n + j], rhs.im[k * n + j]);
                    sr += ar * br - ai * bi;
                    si += ar * bi + ai * br;
                }
                out.re[i * n + j] = sr;
                out.im[i * n + j] = si;
            }
        }
    }

    /// `IB x JB` register tile of the product.
    #[inline(always)]
    fn block(&self, rhs: &Self, out: &mut Self, i0: usize, j0: usize) {
        let n = self.n;
        let mut cr = [[T::zero(); JB]; IB];
        let mut ci = [[T::zero(); JB]; IB];
        for k in 0..n {
            let br: &[T; JB] = rhs.re[k * n + j0..k * n + j0 + JB].try_into().unwrap();
            let bi: &[T; JB] = rhs.im[k * n + j0..k * n + j0 + JB].try_into().unwrap();
            for r in 0..IB {
                let ar = self.re[(i0 + r) * n + k];
                let ai = self.im[(i0 + r) * n + k];
                for j in 0..JB {
                    cr[r][j] = ar.mul_add(br[j], cr[r][j]);
                    cr[r][j] = (-ai).mul_add(bi[j], cr[r][j]);
                    ci[r][j] = ar.mul_add(bi[j], ci[r][j]);
                    ci[r][j] = ai.mul_add(br[j], ci[r][j]);
                }
            }
        }
        for r in 0..IB {
            let row = (i0 + r) * n + j0;
            out.re[row..row + JB].copy_from_slice(&cr[r]);
            out.im[row..row + JB].copy_from_slice(&ci[r]);
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.n);
        self.matmul_into(rhs, &mut out);
        out
    }

    pub fn trace(&self) -> C<T> {
        let mut s = C::zero();
        for i in 0..self.n {
            s += self.get(i, i);
        }
        s
    }

    /// Normalised trace `Tr(M) / N`.
    pub fn trace_normalized(&self) -> C<T> {
        self.trace() / T::from_usize_lossy(self.n)
    }

    /// `Tr(self * rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &Self) -> C<T> {
        let n = self.n;
        assert_eq!(n, rhs.n);
        let (mut sr, mut si) = (T::zero(), T::zero());
        for i in 0..n {
            for k in 0..n {
                let (ar, ai) = (self.re[i * n + k], self.im[i * n + k]);
                let (br, bi) = (rhs.re[k * n + i], rhs.im[k * n + i]);
                sr += ar * br - ai * bi;
                si += ar * bi + ai * br;
            }
        }
        c(sr, si)
    }

    pub fn frobenius_norm(&self) -> T {
        let s: T = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| *a * *a + *b * *b)
            .sum();
        s.sqrt()
    }

    /// `sqrt(tr_N(M M*))`.
    pub fn normalized_frobenius_norm(&self) -> T {
        self.frobenius_norm() / T::from_usize_lossy(self.n).sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        let n = self.n;
        let mut best = T::zero();
        for j in 0..n {
            let mut s = T::zero();
            for i in 0..n {
                s += self.get(i, j).norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for k in 0..self.re.len() {
            best = best.max(c(self.re[k], self.im[k]).norm());
        }
        best
    }

    /// Frobenius norm of `self - I`.
    pub fn distance_to_identity(&self) -> T {
        let n = self.n;
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut z = self.get(i, j);
                if i == j {
                    z -= C::one();
                }
                s += z.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Frobenius norm of `self - self*`.
    pub fn hermitian_defect(&self) -> T {
        let n = self.n;
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                let z = self.get(i, j) - self.get(j, i).conj();
                s += z.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.n;
        let half = T::lit(0.5);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let z = (self.get(i, j) + self.get(j, i).conj()) * half;
                out.set(i, j, z);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|x| x.is_finite())
    }

    pub fn map_precision<U: Real>(&self) -> CMat<U> {
        CMat {
            n: self.n,
            re: self.re.iter().map(|x| U::lit(x.to_f64_lossy())).collect(),
            im: self.im.iter().map(|x| U::lit(x.to_f64_lossy())).collect(),
        }
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for k in 0..out.re.len() {
            out.re[k] -= rhs.re[k];
            out.im[k] -= rhs.im[k];
        }
        out
    }
}

impl<T: Real> AddAssign<&CMat<T>> for CMat<T> {
    fn add_assign(&mut self, rhs: &CMat<T>) {
        assert_eq!(self.n, rhs.n);
        for k in 0..self.re.len() {
            self.re[k] += rhs.re[k];
            self.im[k] += rhs.im[k];
        }
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        self.matmul(rhs)
    }
}
