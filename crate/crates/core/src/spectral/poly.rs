// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{Real, C};
use crate::sim::{evaluate_word, GlSample};
use crate::trace::{parse_matrix_polynomial, Letter, Source};

/// Matrix polynomial `P = Σ c_k w_k`, evaluated through `PP*`.
#[derive(Debug, Clone)]
pub struct SelfAdjointPoly<T> {
    pub id: String,
    pub terms: Vec<(C<T>, Vec<Letter>)>,
}

impl<T: Real> SelfAdjointPoly<T> {
    pub fn new(id: impl Into<String>, terms: Vec<(C<T>, Vec<Letter>)>) -> Self {
        Self {
            id: id.into(),
            terms,
        }
    }

    /// Parses the matrix-polynomial text syntax, e.g. `g1 + g1* + a1`.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::new(text.trim(), parse_matrix_polynomial(text)?))
    }

    /// Number of processes referenced.
    pub fn arity(&self) -> usize {
        self.letters()
            .filter_map(|l| l.process_index())
            .map(|l| l + 1)
            .max()
            .unwrap_or(0)
    }

    /// Number of deterministic matrices referenced.
    pub fn det_arity(&self) -> usize {
        self.letters()
            .filter_map(|l| match l.source {
                Source::Det(j) => Some(j + 1),
                Source::Process(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// True when some word needs `G⁻¹` or `G⁻¹*`.
    pub fn uses_inverse(&self) -> bool {
        self.letters().any(|l| {
            matches!(
                l.variant,
                crate::trace::Variant::Inv | crate::trace::Variant::InvStar
            )
        })
    }

    fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.terms.iter().flat_map(|(_, w)| w.iter())
    }

    /// `P(sample)`.
    pub fn eval(&self, sample: &GlSample<T>) -> Result<CMat<T>> {
        if self.arity() > sample.arity() {
            return Err(Error::Arity(format!(
                "polynomial {} uses {} processes, sample has {}",
                self.id,
                self.arity(),
                sample.arity()
            )));
        }
        let mut m = CMat::zeros(sample.n());
        for (z, word) in &self.terms {
            m.axpy(*z, &evaluate_word(word, sample)?);
        }
        Ok(m)
    }

    /// `(MM* + (MM*)*) / 2` with `M = P(sample)`.
    pub fn eval_pp_star(&self, sample: &GlSample<T>) -> Result<CMat<T>> {
        let m = self.eval(sample)?;
        Ok(m.matmul(&m.adjoint()).hermitian_part())
    }
}
