// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::delta::{delta_term, delta_tilde_term};
use super::poly::TracePolynomial;
use super::word::{necklace_count, necklaces, TraceProduct, Word};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{Real, C};

/// Largest basis the generator will assemble.
pub const BASIS_CAP: usize = 200_000;

/// Indexed list of trace products.
#[derive(Debug, Clone)]
pub struct Basis {
    elements: Vec<TraceProduct>,
    index: HashMap<TraceProduct, usize>,
}

impl Basis {
    pub fn from_elements(elements: Vec<TraceProduct>) -> Self {
        let index = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        Self { elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[TraceProduct] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &TraceProduct {
        &self.elements[i]
    }

    pub fn position(&self, key: &TraceProduct) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn max_degree(&self) -> usize {
        self.elements
            .iter()
            .map(TraceProduct::total_degree)
            .max()
            .unwrap_or(0)
    }
}

/// `dim E_d` over `4p` letters: coefficients of `∏_m (1 - x^m)^{-c_m}` up to
/// `x^d`, where `c_m` counts necklaces of length `m`. Saturates at `u128::MAX`.
pub fn basis_dimension(p: usize, d: usize) -> u128 {
    let q = 4 * p as u128;
    let mut coeffs = vec![0u128; d + 1];
    coeffs[0] = 1;
    for m in 1..=d {
        let c_m = necklace_count(q, m);
        // multiply by (1 - x^m)^{-c_m} = Σ_j C(c_m + j - 1, j) x^{mj}
        let mut next = vec![0u128; d + 1];
        for (e, &a) in coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mut binom: u128 = 1;
            let mut j = 0usize;
            while e + m * j <= d {
                let add = a.saturating_mul(binom);
                next[e + m * j] = next[e + m * j].saturating_add(add);
                j += 1;
                binom = binom.saturating_mul(c_m + j as u128 - 1) / j as u128;
            }
        }
        coeffs = next;
    }
    coeffs.iter().fold(0u128, |s, &x| s.saturating_add(x))
}

fn push_multisets(
    words: &[Word],
    start: usize,
    budget: usize,
    current: &mut Vec<Word>,
    out: &mut Vec<TraceProduct>,
) {
    out.push(TraceProduct::new(current.iter().cloned()));
    for k in start..words.len() {
        let deg = words[k].degree();
        if deg > budget {
            continue;
        }
        current.push(words[k].clone());
        push_multisets(words, k, budget - deg, current, out);
        current.pop();
    }
}

/// Every trace product of total degree `≤ d` over processes `0..p`, ordered
/// by total degree and then lexicographically.
pub fn enumerate_basis(p: usize, d: usize) -> Result<Basis> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "at least one process is required".into(),
        ));
    }
    let dim = basis_dimension(p, d);
    if dim > BASIS_CAP as u128 {
        return Err(Error::Resource(format!(
            "dim E_{d} = {dim} exceeds the cap of {BASIS_CAP}"
        )));
    }
    let mut words = Vec::new();
    for len in 1..=d {
        words.extend(necklaces(p, len));
    }
    words.sort();
    let mut out = Vec::with_capacity(dim as usize);
    push_multisets(&words, 0, d, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.cmp(b))
    });
    debug_assert_eq!(out.len() as u128, dim);
    Ok(Basis::from_elements(out))
}

/// Smallest set of trace products containing the terms of `seed` and closed
/// under `Δ` and `Δ̃`, ordered as in [`enumerate_basis`].
pub fn closure_basis<T: Real>(seed: &TracePolynomial<T>, params: &ModelParams<T>) -> Result<Basis> {
    let one = C::new(T::one(), T::zero());
    let mut seen: BTreeSet<TraceProduct> = BTreeSet::new();
    let mut queue: VecDeque<TraceProduct> = VecDeque::new();
    for (k, _) in seed.terms() {
        if seen.insert(k.clone()) {
            queue.push_back(k.clone());
        }
    }
    while let Some(key) = queue.pop_front() {
        let mut image = TracePolynomial::zero();
        delta_term(&key, one, params, &mut image)?;
        delta_tilde_term(&key, one, params, &mut image)?;
        for (k, _) in image.terms() {
            if k.total_degree() > key.total_degree() {
                return Err(Error::Closure(format!("{key} maps onto {k}")));
            }
            if seen.insert(k.clone()) {
                if seen.len() > BASIS_CAP {
                    return Err(Error::Resource(format!(
                        "closure exceeds the cap of {BASIS_CAP} elements"
                    )));
                }
                queue.push_back(k.clone());
            }
        }
    }
    let mut out: Vec<TraceProduct> = seen.into_iter().collect();
    out.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.cmp(b))
    });
    Ok(Basis::from_elements(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::letter::{Letter, Variant};
    use std::collections::HashSet;

    #[test]
    fn small_dimensions() {
        assert_eq!(enumerate_basis(1, 0).unwrap().len(), 1);
        assert_eq!(enumerate_basis(1, 1).unwrap().len(), 5);
        assert_eq!(enumerate_basis(1, 2).unwrap().len(), 25);
        assert_eq!(basis_dimension(1, 2), 25);
    }

    /// Brute force: all words of length ≤ d, quotient by rotation, all
    /// multisets of total length ≤ d.
    fn brute_force(p: usize, d: usize) -> usize {
        let letters: Vec<Letter> = (0..p)
            .flat_map(|l| Variant::ALL.iter().map(move |&v| Letter::process(l, v)))
            .collect();
        let mut words: HashSet<Vec<Letter>> = HashSet::new();
        let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..d {
            let mut next = Vec::new();
            for w in &frontier {
                for l in &letters {
                    let mut v = w.clone();
                    v.push(*l);
                    // smallest rotation by direct comparison
                    let best = (0..v.len())
                        .map(|r| v[r..].iter().chain(&v[..r]).cloned().collect::<Vec<_>>())
                        .min()
                        .unwrap();
                    words.insert(best);
                    next.push(v);
                }
            }
            frontier = next;
        }
        let mut words: Vec<Vec<Letter>> = words.into_iter().collect();
        words.sort();
        fn count(words: &[Vec<Letter>], start: usize, budget: usize) -> usize {
            let mut total = 1;
            for k in start..words.len() {
                if words[k].len() <= budget {
                    total += count(words, k, budget - words[k].len());
                }
            }
            total
        }
        count(&words, 0, d)
    }

    #[test]
    fn enumeration_matches_brute_force_and_generating_function() {
        for (p, d) in [(1, 3), (1, 4), (2, 2), (2, 3)] {
            let b = enumerate_basis(p, d).unwrap();
            assert_eq!(b.len(), brute_force(p, d), "p={p} d={d}");
            assert_eq!(b.len() as u128, basis_dimension(p, d));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_basis(2, 12), Err(Error::Resource(_))));
    }
}
