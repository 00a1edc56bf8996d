// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::letter::{Letter, Variant};

/// Word in the letters, kept in canonical cyclic form when built through
/// [`Word::canonical`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Lexicographically least rotation of `s`.
pub fn minimal_rotation<L: Ord + Clone>(s: &[L]) -> Vec<L> {
    let n = s.len();
    if n <= 1 {
        return s.to_vec();
    }
    // Two-pointer minimal rotation: candidates i and j, common prefix k.
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        match a.cmp(b) {
            std::cmp::Ordering::Equal => k += 1,
            std::cmp::Ordering::Greater => {
                i += k + 1;
                if i == j {
                    i += 1;
                }
                k = 0;
            }
            std::cmp::Ordering::Less => {
                j += k + 1;
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    let start = i.min(j);
    s[start..].iter().chain(&s[..start]).cloned().collect()
}

impl Word {
    /// Word with the letters as given (no rotation).
    pub fn raw(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn canonical(letters: &[Letter]) -> Self {
        Word {
            letters: minimal_rotation(letters),
        }
    }

    pub fn canonicalize(&self) -> Self {
        Self::canonical(&self.letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn has_det(&self) -> bool {
        self.letters.iter().any(Letter::is_det)
    }

    /// Largest process index plus one.
    pub fn arity(&self) -> usize {
        self.letters
            .iter()
            .filter_map(|l| l.process_index())
            .map(|l| l + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn count(&self, letter: &Letter) -> usize {
        self.letters.iter().filter(|l| *l == letter).count()
    }

    /// Reversed word with every letter replaced by its adjoint.
    pub fn adjoint(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::adjoint).collect(),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Product of traces of canonical words; the empty product is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TraceProduct {
    factors: Vec<Word>,
}

impl TraceProduct {
    pub fn one() -> Self {
        Self::default()
    }

    /// Canonicalises each factor, drops empty words (`tr(1) = 1`) and sorts.
    pub fn new(factors: impl IntoIterator<Item = Word>) -> Self {
        let mut factors: Vec<Word> = factors
            .into_iter()
            .filter(|w| !w.is_empty())
            .map(|w| w.canonicalize())
            .collect();
        factors.sort();
        TraceProduct { factors }
    }

    pub fn single(letters: &[Letter]) -> Self {
        Self::new([Word::raw(letters.to_vec())])
    }

    pub fn factors(&self) -> &[Word] {
        &self.factors
    }

    pub fn total_degree(&self) -> usize {
        self.factors.iter().map(Word::degree).sum()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn has_det(&self) -> bool {
        self.factors.iter().any(Word::has_det)
    }

    pub fn arity(&self) -> usize {
        self.factors.iter().map(Word::arity).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &TraceProduct) -> TraceProduct {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        factors.sort();
        TraceProduct { factors }
    }
}

impl fmt::Display for TraceProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (k, w) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "tr({w})")?;
        }
        Ok(())
    }
}

/// All canonical words of exactly `len` letters over processes `0..p`.
pub fn necklaces(p: usize, len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..p)
        .flat_map(|l| Variant::ALL.iter().map(move |&v| Letter::process(l, v)))
        .collect();
    if len == 0 {
        return vec![Word::default()];
    }
    let q = alphabet.len();
    let mut out = Vec::new();
    let mut digits = vec![0usize; len];
    loop {
        let letters: Vec<Letter> = digits.iter().map(|&d| alphabet[d]).collect();
        if minimal_rotation(&letters) == letters {
            out.push(Word { letters });
        }
        // odometer increment
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < q {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Number of necklaces of length `len` over `q` symbols.
pub fn necklace_count(q: u128, len: usize) -> u128 {
    if len == 0 {
        return 1;
    }
    let mut total: u128 = 0;
    for dd in 1..=len {
        if len.is_multiple_of(dd) {
            total += euler_phi(dd as u128) * q.pow((len / dd) as u32);
        }
    }
    total / len as u128
}

fn euler_phi(mut n: u128) -> u128 {
    let mut result = n;
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            while n.is_multiple_of(k) {
                n /= k;
            }
            result -= result / k;
        }
        k += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
