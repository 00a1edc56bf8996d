// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::letter::Letter;
use super::word::TraceProduct;
use crate::scalar::{Real, C};

/// Coefficients with modulus at or below this are dropped after every
/// operator application.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Finite complex combination of trace products.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePolynomial<T> {
    terms: BTreeMap<TraceProduct, C<T>>,
}

impl<T: Real> Default for TracePolynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> TracePolynomial<T> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(z: C<T>) -> Self {
        Self::monomial(TraceProduct::one(), z)
    }

    pub fn monomial(key: TraceProduct, z: C<T>) -> Self {
        let mut p = Self::zero();
        p.add_term(key, z);
        p
    }

    /// `tr(w)` for a single word.
    pub fn trace_of(letters: &[Letter]) -> Self {
        Self::monomial(TraceProduct::single(letters), C::new(T::one(), T::zero()))
    }

    pub fn add_term(&mut self, key: TraceProduct, z: C<T>) {
        if z.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(C::zero);
        *entry += z;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TraceProduct, &C<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &TraceProduct) -> C<T> {
        self.terms.get(key).copied().unwrap_or_else(C::zero)
    }

    /// Removes coefficients of modulus `≤ threshold`.
    pub fn prune(&mut self, threshold: T) {
        self.terms.retain(|_, z| z.norm() > threshold);
    }

    pub fn pruned(mut self) -> Self {
        self.prune(T::lit(PRUNE_THRESHOLD));
        self
    }

    pub fn scale(&self, z: C<T>) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), *v * z);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), *v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                out.add_term(k1.mul(k2), *v1 * *v2);
            }
        }
        out
    }

    /// Largest total degree among the terms.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(TraceProduct::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn arity(&self) -> usize {
        self.terms
            .keys()
            .map(TraceProduct::arity)
            .max()
            .unwrap_or(0)
    }

    pub fn has_det(&self) -> bool {
        self.terms.keys().any(TraceProduct::has_det)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T {
        self.terms
            .values()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn map_precision<U: Real>(&self) -> TracePolynomial<U> {
        TracePolynomial {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    (
                        k.clone(),
                        C::new(U::lit(v.re.to_f64_lossy()), U::lit(v.im.to_f64_lossy())),
                    )
                })
                .collect(),
        }
    }
}

impl<T: Real> fmt::Display for TracePolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (key, z)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if z.im.is_zero() {
                write!(f, "{}", z.re)?;
            } else {
                write!(f, "({}{:+}i)", z.re, z.im)?;
            }
            if !key.is_one() {
                write!(f, " * {key}")?;
            }
        }
        Ok(())
    }
}
