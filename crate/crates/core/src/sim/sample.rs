// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::Real;
use crate::trace::{Letter, Source, Variant};

/// `(G, G*, G⁻¹, G⁻¹*)` for one process at one time.
#[derive(Clone)]
pub struct ProcessState<T> {
    pub g: CMat<T>,
    pub g_adj: CMat<T>,
    pub g_inv: CMat<T>,
    pub g_inv_adj: CMat<T>,
}

impl<T: Real> ProcessState<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_pair(CMat::identity(n), CMat::identity(n))
    }

    pub fn from_pair(g: CMat<T>, g_inv: CMat<T>) -> Self {
        Self {
            g_adj: g.adjoint(),
            g_inv_adj: g_inv.adjoint(),
            g,
            g_inv,
        }
    }

    pub fn get(&self, variant: Variant) -> &CMat<T> {
        match variant {
            Variant::Id => &self.g,
            Variant::Star => &self.g_adj,
            Variant::Inv => &self.g_inv,
            Variant::InvStar => &self.g_inv_adj,
        }
    }

    /// `‖G G⁻¹ - I‖` in normalised Frobenius norm.
    pub fn inverse_defect(&self) -> T {
        self.g.matmul(&self.g_inv).distance_to_identity()
    }

    /// `1e-8 ‖G‖ ‖G⁻¹‖` with normalised Frobenius norms.
    pub fn inverse_tolerance(&self) -> T {
        T::lit(super::INVERSE_TOLERANCE)
            * self.g.normalized_frobenius_norm()
            * self.g_inv.normalized_frobenius_norm()
    }
}

/// Deterministic companion matrix with its adjoint.
#[derive(Clone)]
pub struct DetMatrix<T> {
    pub a: CMat<T>,
    pub a_adj: CMat<T>,
}

impl<T: Real> DetMatrix<T> {
    pub fn new(a: CMat<T>) -> Self {
        Self {
            a_adj: a.adjoint(),
            a,
        }
    }
}

#[derive(Clone)]
pub struct GlSample<T> {
    pub time: T,
    pub processes: Vec<ProcessState<T>>,
    pub deterministic: Vec<DetMatrix<T>>,
    pub seed: u64,
    pub stream: u64,
}

impl<T: Real> GlSample<T> {
    pub fn n(&self) -> usize {
        self.processes
            .first()
            .map(|s| s.g.n())
            .or_else(|| self.deterministic.first().map(|d| d.a.n()))
            .unwrap_or(0)
    }

    pub fn arity(&self) -> usize {
        self.processes.len()
    }

    /// Attaches deterministic matrices, which must all be `N × N`.
    pub fn with_deterministic(mut self, mats: Vec<DetMatrix<T>>) -> Result<Self> {
        let n = self.n();
        for (j, m) in mats.iter().enumerate() {
            if m.a.n() != n {
                return Err(Error::InvalidArgument(format!(
                    "deterministic matrix a{} is {}x{}, expected {n}x{n}",
                    j + 1,
                    m.a.n(),
                    m.a.n()
                )));
            }
        }
        self.deterministic = mats;
        Ok(self)
    }

    pub fn letter(&self, letter: &Letter) -> Result<&CMat<T>> {
        match letter.source {
            Source::Process(l) => self
                .processes
                .get(l)
                .map(|s| s.get(letter.variant))
                .ok_or_else(|| {
                    Error::Index(format!("{letter}: sample has {} processes", self.arity()))
                }),
            Source::Det(j) => {
                let m = self.deterministic.get(j).ok_or_else(|| {
                    Error::Index(format!(
                        "{letter}: sample has {} deterministic matrices",
                        self.deterministic.len()
                    ))
                })?;
                match letter.variant {
                    Variant::Id => Ok(&m.a),
                    Variant::Star => Ok(&m.a_adj),
                    _ => Err(Error::UnsupportedLetter(letter.to_string())),
                }
            }
        }
    }
}

/// Ordered product of the matrices substituted for `letters`; the empty word
/// gives `I`.
pub fn evaluate_word<T: Real>(letters: &[Letter], sample: &GlSample<T>) -> Result<CMat<T>> {
    let n = sample.n();
    let Some((first, rest)) = letters.split_first() else {
        return Ok(CMat::identity(n));
    };
    let mut acc = sample.letter(first)?.clone();
    let mut tmp = CMat::zeros(n);
    for l in rest {
        acc.matmul_into(sample.letter(l)?, &mut tmp);
        std::mem::swap(&mut acc, &mut tmp);
    }
    Ok(acc)
}
