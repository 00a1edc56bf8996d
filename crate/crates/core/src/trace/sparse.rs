// SPDX-License-Identifier: Apache-2.0

use crate::scalar::{Real, C};

/// Compressed sparse rows, complex entries.
#[derive(Debug, Clone)]
pub struct SparseMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C<T>>,
}

impl<T: Real> SparseMatrix<T> {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C<T>)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<C<T>> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("non-empty") += v;
                continue;
            }
            cols.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C<T> {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => C::new(T::zero(), T::zero()),
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[C<T>], y: &mut [C<T>]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.n) {
            let mut s = C::new(T::zero(), T::zero());
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[k] * x[self.cols[k]];
            }
            *yr = s;
        }
    }

    /// `y = Aᵀ x`.
    pub fn mul_vec_transposed(&self, x: &[C<T>], y: &mut [C<T>]) {
        y.iter_mut().for_each(|v| *v = C::new(T::zero(), T::zero()));
        for (r, &xr) in x.iter().enumerate().take(self.n) {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.cols[k]] += self.values[k] * xr;
            }
        }
    }

    /// `self + w · other` with the same dimension.
    pub fn add_scaled(&self, w: C<T>, other: &Self) -> Self {
        let mut t = self.triplets();
        t.extend(other.triplets().into_iter().map(|(r, c, v)| (r, c, v * w)));
        Self::from_triplets(self.n, t)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C<T>)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push((r, self.cols[k], self.values[k]));
            }
        }
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|r| {
                self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|z| z.norm())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), T::max)
    }
}
