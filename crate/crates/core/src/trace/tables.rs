// SPDX-License-Identifier: Apache-2.0

//! Splitting and merging rules for a pair of letters of the same process.
//!
//! For a pair `(X^{ε₁}, X^{ε₂})` the Itô correction of the trace of
//! `A X^{ε₁} B X^{ε₂} C` is `σ² c tr(A Q₁ C) tr(Q₂ B)`, and for two traces
//! `tr(A X^{ε₁} B) tr(C X^{ε₂} D)` it is `σ² c tr(A Q₁ D C Q₂ B) / N²`.
//! Each entry stores `c` as a combination of `τ - λ`, `τ̄ - λ` and `λ`,
//! together with the words `Q₁`, `Q₂` over the same process.

use super::letter::Variant::{self, Id, Inv, InvStar, Star};
use crate::scalar::{c, Real, C};

/// Coefficient `c` of a cell, before the `σ²` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coef {
    /// `τ - λ`
    TauMinusLambda,
    /// `-(τ - λ)`
    NegTauMinusLambda,
    /// `τ̄ - λ`
    TauBarMinusLambda,
    /// `-(τ̄ - λ)`
    NegTauBarMinusLambda,
    /// `λ`
    Lambda,
    /// `-λ`
    NegLambda,
}

impl Coef {
    pub fn value<T: Real>(self, lambda: T, tau: C<T>) -> C<T> {
        let lam = c(lambda, T::zero());
        match self {
            Coef::TauMinusLambda => tau - lam,
            Coef::NegTauMinusLambda => lam - tau,
            Coef::TauBarMinusLambda => tau.conj() - lam,
            Coef::NegTauBarMinusLambda => lam - tau.conj(),
            Coef::Lambda => lam,
            Coef::NegLambda => -lam,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRule {
    pub coef: Coef,
    pub q1: &'static [Variant],
    pub q2: &'static [Variant],
}

const fn rule(coef: Coef, q1: &'static [Variant], q2: &'static [Variant]) -> PairRule {
    PairRule { coef, q1, q2 }
}

/// Rows indexed by `ε₁`, columns by `ε₂`, in the order `Id, Star, Inv, InvStar`.
pub const PAIR_RULES: [[PairRule; 4]; 4] = [
    [
        rule(Coef::TauMinusLambda, &[Id], &[Id]),
        rule(Coef::Lambda, &[Id, Star], &[]),
        rule(Coef::NegTauMinusLambda, &[], &[]),
        rule(Coef::NegLambda, &[Id], &[InvStar]),
    ],
    [
        rule(Coef::Lambda, &[], &[Id, Star]),
        rule(Coef::TauBarMinusLambda, &[Star], &[Star]),
        rule(Coef::NegLambda, &[Inv], &[Star]),
        rule(Coef::NegTauBarMinusLambda, &[], &[InvStar, Star]),
    ],
    [
        rule(Coef::NegTauMinusLambda, &[], &[]),
        rule(Coef::NegLambda, &[Star], &[Inv]),
        rule(Coef::TauMinusLambda, &[Inv], &[Inv]),
        rule(Coef::Lambda, &[], &[InvStar, Inv]),
    ],
    [
        rule(Coef::NegLambda, &[InvStar], &[Id]),
        rule(Coef::NegTauBarMinusLambda, &[], &[]),
        rule(Coef::Lambda, &[InvStar, Inv], &[]),
        rule(Coef::TauBarMinusLambda, &[InvStar], &[InvStar]),
    ],
];

pub fn pair_rule(e1: Variant, e2: Variant) -> &'static PairRule {
    &PAIR_RULES[e1.index()][e2.index()]
}

/// Drift coefficient of a single letter, before the `σ²/2` factor.
pub fn drift_coef(v: Variant) -> Coef {
    match v {
        Id | Inv => Coef::TauMinusLambda,
        Star | InvStar => Coef::TauBarMinusLambda,
    }
}
