// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::poly::TracePolynomial;
use super::word::Word;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::sim::{evaluate_word, GlSample};

/// `P(1)`: every trace evaluates to 1, so this is the coefficient sum.
pub fn evaluate_at_identity<T: Real>(p: &TracePolynomial<T>) -> C<T> {
    p.terms()
        .fold(C::new(T::zero(), T::zero()), |s, (_, z)| s + z)
}

/// `P` evaluated with normalised traces of the sample's matrices.
pub fn evaluate_on_sample<T: Real>(p: &TracePolynomial<T>, sample: &GlSample<T>) -> Result<C<T>> {
    if p.arity() > sample.arity() {
        return Err(Error::Arity(format!(
            "polynomial uses {} processes, sample has {}",
            p.arity(),
            sample.arity()
        )));
    }
    let mut cache: HashMap<&Word, C<T>> = HashMap::new();
    let mut total = C::new(T::zero(), T::zero());
    for (key, z) in p.terms() {
        let mut value = *z;
        for w in key.factors() {
            let tr = match cache.get(w) {
                Some(v) => *v,
                None => {
                    let v = evaluate_word(w.letters(), sample)?.trace_normalized();
                    cache.insert(w, v);
                    v
                }
            };
            value *= tr;
        }
        total += value;
    }
    Ok(total)
}
