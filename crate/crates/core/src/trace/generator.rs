// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use super::basis::{closure_basis, enumerate_basis, Basis};
use super::delta::{delta_term, delta_tilde_term};
use super::poly::{TracePolynomial, PRUNE_THRESHOLD};
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{c, Real, C};

/// Matrix size for the generator: finite `N` (weight `1/N²` on `Δ̃`) or the
/// free limit (weight 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Size {
    Finite(usize),
    Infinite,
}

impl Size {
    pub fn weight<T: Real>(self) -> T {
        match self {
            Size::Finite(n) => {
                let n = T::from_usize_lossy(n);
                T::one() / (n * n)
            }
            Size::Infinite => T::zero(),
        }
    }
}

impl std::fmt::Display for Size {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Size::Finite(n) => write!(f, "{n}"),
            Size::Infinite => f.write_str("inf"),
        }
    }
}

/// `Δ + c Δ̃` as a sparse matrix whose column `j` is the image of basis
/// element `j`.
#[derive(Debug, Clone)]
pub struct GeneratorOperator<T> {
    pub basis: Basis,
    pub delta: SparseMatrix<T>,
    pub delta_tilde: SparseMatrix<T>,
    pub matrix: SparseMatrix<T>,
    pub size: Size,
    pub c: T,
    pub params: ModelParams<T>,
}

fn column<T: Real>(
    basis: &Basis,
    j: usize,
    params: &ModelParams<T>,
    tilde: bool,
) -> Result<Vec<(usize, usize, C<T>)>> {
    let key = basis.get(j);
    let mut image = TracePolynomial::zero();
    let one = c(T::one(), T::zero());
    if tilde {
        delta_tilde_term(key, one, params, &mut image)?;
    } else {
        delta_term(key, one, params, &mut image)?;
    }
    image.prune(T::lit(PRUNE_THRESHOLD));
    let mut out = Vec::with_capacity(image.len());
    for (k, v) in image.terms() {
        if k.total_degree() > key.total_degree() {
            return Err(Error::Closure(format!("{key} maps onto {k}")));
        }
        let i = basis
            .position(k)
            .ok_or_else(|| Error::Closure(format!("image {k} of {key} is not in the basis")))?;
        out.push((i, j, *v));
    }
    Ok(out)
}

fn assemble<T: Real>(
    basis: &Basis,
    params: &ModelParams<T>,
    tilde: bool,
) -> Result<SparseMatrix<T>> {
    let cols: Vec<Vec<(usize, usize, C<T>)>> = (0..basis.len())
        .into_par_iter()
        .map(|j| column(basis, j, params, tilde))
        .collect::<Result<_>>()?;
    Ok(SparseMatrix::from_triplets(
        basis.len(),
        cols.into_iter().flatten().collect(),
    ))
}

impl<T: Real> GeneratorOperator<T> {
    pub fn from_basis(basis: Basis, params: &ModelParams<T>, size: Size) -> Result<Self> {
        let delta = assemble(&basis, params, false)?;
        let delta_tilde = assemble(&basis, params, true)?;
        Self::from_parts(basis, delta, delta_tilde, params.clone(), size)
    }

    fn from_parts(
        basis: Basis,
        delta: SparseMatrix<T>,
        delta_tilde: SparseMatrix<T>,
        params: ModelParams<T>,
        size: Size,
    ) -> Result<Self> {
        let weight: T = size.weight();
        let matrix = delta.add_scaled(c(weight, T::zero()), &delta_tilde);
        Ok(Self {
            basis,
            delta,
            delta_tilde,
            matrix,
            size,
            c: weight,
            params,
        })
    }

    /// Same operator at another matrix size, reusing `Δ` and `Δ̃`.
    pub fn with_size(&self, size: Size) -> Result<Self> {
        Self::from_parts(
            self.basis.clone(),
            self.delta.clone(),
            self.delta_tilde.clone(),
            self.params.clone(),
            size,
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficient vector of `p` in the basis.
    pub fn coordinates(&self, p: &TracePolynomial<T>) -> Result<Vec<C<T>>> {
        let mut v = vec![C::new(T::zero(), T::zero()); self.dim()];
        for (k, z) in p.terms() {
            let i = self.basis.position(k).ok_or_else(|| {
                Error::InvalidArgument(format!("{k} is not in the span of the generator basis"))
            })?;
            v[i] += *z;
        }
        Ok(v)
    }

    pub fn polynomial(&self, v: &[C<T>]) -> TracePolynomial<T> {
        let mut p = TracePolynomial::zero();
        for (i, z) in v.iter().enumerate() {
            p.add_term(self.basis.get(i).clone(), *z);
        }
        p
    }
}

fn check_basis_params<T: Real>(params: &ModelParams<T>, p: usize) -> Result<()> {
    if params.arity() < p {
        return Err(Error::Arity(format!(
            "{p} processes requested but {} time scales were given",
            params.arity()
        )));
    }
    Ok(())
}

/// Generator on the full space `E_d` over `p` processes.
pub fn build_generator<T: Real>(
    p: usize,
    d: usize,
    params: &ModelParams<T>,
    size: Size,
) -> Result<GeneratorOperator<T>> {
    check_basis_params(params, p)?;
    let basis = enumerate_basis(p, d)?;
    GeneratorOperator::from_basis(basis, params, size)
}

/// Generator restricted to the smallest invariant subspace containing `seed`.
pub fn build_generator_for<T: Real>(
    seed: &TracePolynomial<T>,
    params: &ModelParams<T>,
    size: Size,
) -> Result<GeneratorOperator<T>> {
    check_basis_params(params, seed.arity())?;
    let basis = closure_basis(seed, params)?;
    GeneratorOperator::from_basis(basis, params, size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;
    use crate::trace::letter::{Letter, Variant};
    use crate::trace::word::TraceProduct;

    #[test]
    fn degree_one_operator_is_diagonal() {
        let params = validate_params(1.0, C::new(0.3, 0.2), &[1.5]).unwrap();
        let op = build_generator(1, 1, &params, Size::Finite(4)).unwrap();
        assert_eq!(op.dim(), 5);
        let x = TraceProduct::single(&[Letter::process(0, Variant::Id)]);
        let j = op.basis.position(&x).unwrap();
        let want = (C::new(0.3, 0.2) - 1.0) * (0.5 * 1.5 * 1.5);
        assert!((op.matrix.get(j, j) - want).norm() < 1e-15);
        for i in 0..5 {
            if i != j {
                assert_eq!(op.matrix.get(i, j), C::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn finite_and_free_differ_by_scaled_tilde_part() {
        let params = validate_params(1.0, C::new(0.5, 0.0), &[1.0]).unwrap();
        let fin = build_generator(1, 3, &params, Size::Finite(8)).unwrap();
        let free = fin.with_size(Size::Infinite).unwrap();
        for (r, col, v) in fin.matrix.triplets() {
            let d = v - free.matrix.get(r, col) - fin.delta_tilde.get(r, col) / 64.0;
            assert!(d.norm() < 1e-15);
        }
    }

    #[test]
    fn square_maps_within_two_elements() {
        let params = validate_params(1.0, C::new(0.0, 0.0), &[1.0]).unwrap();
        let op = build_generator(1, 2, &params, Size::Infinite).unwrap();
        let x = Letter::process(0, Variant::Id);
        let sq = TraceProduct::single(&[x, x]);
        let j = op.basis.position(&sq).unwrap();
        let nonzero: Vec<_> = op
            .matrix
            .triplets()
            .into_iter()
            .filter(|t| t.1 == j)
            .collect();
        assert_eq!(nonzero.len(), 2);
    }
}
