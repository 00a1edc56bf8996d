// SPDX-License-Identifier: Apache-2.0

//! The operators `Δ` (splits a trace in two) and `Δ̃` (merges two traces).

use super::letter::{Letter, Variant};
use super::poly::{TracePolynomial, PRUNE_THRESHOLD};
use super::tables::{drift_coef, pair_rule};
use super::word::{TraceProduct, Word};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{c, Real, C};

fn check_letters<T: Real>(key: &TraceProduct, params: &ModelParams<T>) -> Result<()> {
    for w in key.factors() {
        for l in w.letters() {
            match l.process_index() {
                None => return Err(Error::UnsupportedLetter(format!("{l} in tr({w})"))),
                Some(p) if p >= params.arity() => {
                    return Err(Error::Arity(format!(
                        "{l} refers to process {} but only {} time scales were given",
                        p + 1,
                        params.arity()
                    )))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn sigma2<T: Real>(params: &ModelParams<T>, l: &Letter) -> T {
    let s = params.sigma(l.process_index().expect("checked"));
    s * s
}

fn expand(process: usize, q: &[Variant]) -> impl Iterator<Item = Letter> + '_ {
    q.iter().map(move |&v| Letter::process(process, v))
}

/// Applies `Δ` to one trace product, accumulating into `out`.
pub fn delta_term<T: Real>(
    key: &TraceProduct,
    coef: C<T>,
    params: &ModelParams<T>,
    out: &mut TracePolynomial<T>,
) -> Result<()> {
    check_letters(key, params)?;
    let half = T::lit(0.5);
    let factors = key.factors();
    let mut diagonal = C::new(T::zero(), T::zero());
    for (f, w) in factors.iter().enumerate() {
        let letters = w.letters();
        for (k, lk) in letters.iter().enumerate() {
            let s2 = sigma2(params, lk);
            diagonal += drift_coef(lk.variant).value(params.lambda, params.tau) * (s2 * half);
            for (kk, lkk) in letters.iter().enumerate().skip(k + 1) {
                if lk.process_index() != lkk.process_index() {
                    continue;
                }
                let process = lk.process_index().expect("checked");
                let rule = pair_rule(lk.variant, lkk.variant);
                let value = rule.coef.value(params.lambda, params.tau) * s2 * coef;
                // A = letters[..k], B = letters[k+1..kk], C = letters[kk+1..]
                let first: Vec<Letter> = letters[..k]
                    .iter()
                    .copied()
                    .chain(expand(process, rule.q1))
                    .chain(letters[kk + 1..].iter().copied())
                    .collect();
                let second: Vec<Letter> = expand(process, rule.q2)
                    .chain(letters[k + 1..kk].iter().copied())
                    .collect();
                let new_key = TraceProduct::new(
                    factors
                        .iter()
                        .enumerate()
                        .filter(|(g, _)| *g != f)
                        .map(|(_, w)| w.clone())
                        .chain([Word::raw(first), Word::raw(second)]),
                );
                out.add_term(new_key, value);
            }
        }
    }
    out.add_term(key.clone(), diagonal * coef);
    Ok(())
}

/// Applies `Δ̃` to one trace product, accumulating into `out`.
pub fn delta_tilde_term<T: Real>(
    key: &TraceProduct,
    coef: C<T>,
    params: &ModelParams<T>,
    out: &mut TracePolynomial<T>,
) -> Result<()> {
    check_letters(key, params)?;
    let factors = key.factors();
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            let (wi, wj) = (factors[i].letters(), factors[j].letters());
            for (k, lk) in wi.iter().enumerate() {
                for (kk, lkk) in wj.iter().enumerate() {
                    if lk.process_index() != lkk.process_index() {
                        continue;
                    }
                    let process = lk.process_index().expect("checked");
                    let rule = pair_rule(lk.variant, lkk.variant);
                    let value =
                        rule.coef.value(params.lambda, params.tau) * sigma2(params, lk) * coef;
                    // tr(A X B) tr(C X' D) -> tr(A Q1 D C Q2 B)
                    let merged: Vec<Letter> = wi[..k]
                        .iter()
                        .copied()
                        .chain(expand(process, rule.q1))
                        .chain(wj[kk + 1..].iter().copied())
                        .chain(wj[..kk].iter().copied())
                        .chain(expand(process, rule.q2))
                        .chain(wi[k + 1..].iter().copied())
                        .collect();
                    let new_key = TraceProduct::new(
                        factors
                            .iter()
                            .enumerate()
                            .filter(|(g, _)| *g != i && *g != j)
                            .map(|(_, w)| w.clone())
                            .chain([Word::raw(merged)]),
                    );
                    out.add_term(new_key, value);
                }
            }
        }
    }
    Ok(())
}

pub fn apply_delta<T: Real>(
    p: &TracePolynomial<T>,
    params: &ModelParams<T>,
) -> Result<TracePolynomial<T>> {
    let mut out = TracePolynomial::zero();
    for (key, coef) in p.terms() {
        delta_term(key, *coef, params, &mut out)?;
    }
    Ok(out.pruned())
}

pub fn apply_delta_tilde<T: Real>(
    p: &TracePolynomial<T>,
    params: &ModelParams<T>,
) -> Result<TracePolynomial<T>> {
    let mut out = TracePolynomial::zero();
    for (key, coef) in p.terms() {
        delta_tilde_term(key, *coef, params, &mut out)?;
    }
    Ok(out.pruned())
}

/// `(Δ + weight·Δ̃) P`.
pub fn apply_generator<T: Real>(
    p: &TracePolynomial<T>,
    params: &ModelParams<T>,
    weight: T,
) -> Result<TracePolynomial<T>> {
    let mut out = TracePolynomial::zero();
    for (key, coef) in p.terms() {
        delta_term(key, *coef, params, &mut out)?;
        if weight != T::zero() {
            delta_tilde_term(key, *coef * c(weight, T::zero()), params, &mut out)?;
        }
    }
    out.prune(T::lit(PRUNE_THRESHOLD));
    Ok(out)
}
