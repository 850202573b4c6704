//! Chen-Fox-Lyndon factorization, the standard right factor, and the
//! normalized factor-length statistics rho and r_n.

use num::rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{is_lyndon_slice, Span, Word};

/// The unique factorization of a word as a nonincreasing product of Lyndon
/// words. Spans are in word order, left to right, so the rightmost factor is
/// the smallest.
#[derive(Debug, Clone)]
pub struct Factorization {
    word: Word,
    spans: Vec<Span>,
}

impl Factorization {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    /// Number of factors (the paper's `l`).
    pub fn count(&self) -> usize {
        self.spans.len()
    }

    pub fn factor(&self, i: usize) -> &[u32] {
        self.word.slice(self.spans[i])
    }

    pub fn factor_words(&self) -> Vec<Word> {
        self.spans.iter().map(|&s| self.word.factor(s)).collect()
    }
}

pub(crate) fn duval_spans(s: &[u32]) -> Vec<Span> {
    let n = s.len();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut j, mut k) = (i + 1, i);
        while j < n && s[k] <= s[j] {
            if s[k] < s[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        let len = j - k;
        while i <= k {
            spans.push(Span::new(i, len));
            i += len;
        }
    }
    spans
}

/// Duval's linear-time algorithm for the Chen-Fox-Lyndon factorization.
pub fn duval_factorize(w: &Word) -> Result<Factorization> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(Factorization {
        word: w.clone(),
        spans: duval_spans(w.letters()),
    })
}

/// Start index of the lexicographically smallest suffix of `s`, by direct
/// comparison of all suffixes. Quadratic; test-oracle grade.
pub(crate) fn smallest_suffix_brute(s: &[u32]) -> usize {
    let mut best = 0;
    for i in 1..s.len() {
        if s[i..] < s[best..] {
            best = i;
        }
    }
    best
}

/// Test oracle: factorize by repeatedly stripping the smallest suffix.
/// Intended for short words (n up to ~16); independent of Duval's algorithm.
pub fn brute_force_factorize(w: &Word) -> Result<Factorization> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let s = w.letters();
    let mut end = s.len();
    let mut spans = Vec::new();
    while end > 0 {
        let start = smallest_suffix_brute(&s[..end]);
        spans.push(Span::new(start, end - start));
        end = start;
    }
    spans.reverse();
    Ok(Factorization {
        word: w.clone(),
        spans,
    })
}

/// The standard factorization `w = uv` of a Lyndon word: `v` is the
/// lexicographically smallest proper suffix, and both parts are Lyndon.
#[derive(Debug, Clone)]
pub struct StandardFactorization {
    pub u: Word,
    pub v: Word,
    n: usize,
}

impl StandardFactorization {
    /// R_n: length of the right factor.
    pub fn right_len(&self) -> usize {
        self.v.len()
    }

    /// r_n = R_n / n, exact.
    pub fn r(&self) -> Ratio<u64> {
        Ratio::new(self.v.len() as u64, self.n as u64)
    }

    pub fn r_f64(&self) -> f64 {
        self.v.len() as f64 / self.n as f64
    }
}

/// Split a Lyndon word of length >= 2 at its smallest proper suffix.
///
/// Every proper suffix of `w` is a suffix of `w` with its head letter
/// removed, and the smallest suffix of any word is the last factor of its
/// Lyndon factorization, so one Duval pass over `w[1..]` locates `v`. The
/// suffix-scan definition is the contract; the test suite checks this path
/// against it exhaustively.
pub fn standard_right_factor(w: &Word) -> Result<StandardFactorization> {
    let n = w.len();
    if n < 2 {
        return Err(Error::WordTooShort { min: 2, got: n });
    }
    if !is_lyndon_slice(w.letters()) {
        return Err(Error::NotLyndon);
    }
    let tail_spans = duval_spans(&w.letters()[1..]);
    let last = tail_spans.last().expect("nonempty tail");
    let v_start = 1 + last.start;
    let fact = StandardFactorization {
        u: w.factor(Span::new(0, v_start)),
        v: w.factor(Span::new(v_start, n - v_start)),
        n,
    };
    debug_assert!(is_lyndon_slice(fact.u.letters()));
    debug_assert!(is_lyndon_slice(fact.v.letters()));
    Ok(fact)
}

/// Normalized lengths of the Lyndon factors, smallest factor first
/// (`rho_i = |w_i| / n` with `w_1` the rightmost factor), conceptually
/// extended by zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RhoSequence {
    /// Factor lengths, smallest-factor-first.
    lengths: Vec<usize>,
    n: usize,
}

impl RhoSequence {
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> Vec<Ratio<u64>> {
        self.lengths
            .iter()
            .map(|&l| Ratio::new(l as u64, self.n as u64))
            .collect()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.lengths
            .iter()
            .map(|&l| l as f64 / self.n as f64)
            .collect()
    }

    /// rho_i, with the implicit zero tail for i past the factor count.
    pub fn get(&self, i: usize) -> Ratio<u64> {
        match self.lengths.get(i) {
            Some(&l) => Ratio::new(l as u64, self.n as u64),
            None => Ratio::new(0, 1),
        }
    }

    /// Partial-sum chain s_i = 1 - (rho_1 + ... + rho_i), for i = 1..=depth.
    /// Once the factors are exhausted the chain stays at 0.
    pub fn s_chain(&self, depth: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(depth);
        let mut used = 0usize;
        for i in 0..depth {
            used += self.lengths.get(i).copied().unwrap_or(0);
            out.push((self.n - used) as f64 / self.n as f64);
        }
        out
    }
}

/// rho sequence of a factorization: factor lengths right to left, normalized.
pub fn rho_sequence(f: &Factorization) -> RhoSequence {
    let mut lengths: Vec<usize> = f.spans().iter().map(|s| s.len).collect();
    lengths.reverse();
    RhoSequence {
        lengths,
        n: f.word().len(),
    }
}

/// The same multiset of values sorted nonincreasing.
pub fn decreasing_rearrangement(rho: &RhoSequence) -> Vec<Ratio<u64>> {
    let mut vals = rho.values();
    vals.sort_unstable_by(|a, b| b.cmp(a));
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn w(text: &str) -> Word {
        Word::parse(text, None).unwrap()
    }

    fn factor_texts(f: &Factorization) -> Vec<String> {
        f.factor_words().iter().map(|x| x.to_text()).collect()
    }

    #[test]
    fn duval_examples() {
        assert_eq!(
            factor_texts(&duval_factorize(&w("banana")).unwrap()),
            vec!["b", "an", "an", "a"]
        );
        assert_eq!(
            factor_texts(&duval_factorize(&w("aabab")).unwrap()),
            vec!["aabab"]
        );
        assert_eq!(
            factor_texts(&duval_factorize(&w("aaa")).unwrap()),
            vec!["a", "a", "a"]
        );
        let empty = Word::from_ranks(crate::word::Alphabet::Finite(2), vec![]).unwrap();
        assert!(duval_factorize(&empty).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(
            factor_texts(&brute_force_factorize(&w("banana")).unwrap()),
            vec!["b", "an", "an", "a"]
        );
        assert_eq!(
            factor_texts(&brute_force_factorize(&w("ba")).unwrap()),
            vec!["b", "a"]
        );
        assert_eq!(
            factor_texts(&brute_force_factorize(&w("abab")).unwrap()),
            vec!["ab", "ab"]
        );
    }

    #[test]
    fn standard_right_factor_examples() {
        let f = standard_right_factor(&w("aabab")).unwrap();
        assert_eq!((f.u.to_text(), f.v.to_text()), ("aab".into(), "ab".into()));
        assert_eq!(f.r(), Ratio::new(2, 5));

        let f = standard_right_factor(&w("ab")).unwrap();
        assert_eq!((f.u.to_text(), f.v.to_text()), ("a".into(), "b".into()));
        assert_eq!(f.r(), Ratio::new(1, 2));

        let f = standard_right_factor(&w("aaab")).unwrap();
        assert_eq!((f.u.to_text(), f.v.to_text()), ("a".into(), "aab".into()));
        assert_eq!(f.r(), Ratio::new(3, 4));

        assert!(standard_right_factor(&w("ba")).is_err());
        assert!(standard_right_factor(&w("a")).is_err());
    }

    #[test]
    fn rho_examples() {
        let rho = rho_sequence(&duval_factorize(&w("banana")).unwrap());
        assert_eq!(rho.lengths(), &[1, 2, 2, 1]);
        assert_eq!(
            rho.values(),
            vec![
                Ratio::new(1, 6),
                Ratio::new(2, 6),
                Ratio::new(2, 6),
                Ratio::new(1, 6)
            ]
        );

        let rho3 = rho_sequence(&duval_factorize(&w("aaa")).unwrap());
        assert_eq!(rho3.values(), vec![Ratio::new(1, 3); 3]);

        let rho1 = rho_sequence(&duval_factorize(&w("aabab")).unwrap());
        assert_eq!(rho1.values(), vec![Ratio::new(1, 1)]);

        // exact sum is 1
        let total: Ratio<u64> = rho.values().into_iter().sum();
        assert_eq!(total, Ratio::new(1, 1));
    }

    #[test]
    fn rearrangement_examples() {
        let rho = rho_sequence(&duval_factorize(&w("banana")).unwrap());
        assert_eq!(
            decreasing_rearrangement(&rho),
            vec![
                Ratio::new(2, 6),
                Ratio::new(2, 6),
                Ratio::new(1, 6),
                Ratio::new(1, 6)
            ]
        );
        let one = rho_sequence(&duval_factorize(&w("aabab")).unwrap());
        assert_eq!(decreasing_rearrangement(&one), vec![Ratio::new(1, 1)]);
        let thirds = rho_sequence(&duval_factorize(&w("aaa")).unwrap());
        assert_eq!(decreasing_rearrangement(&thirds), vec![Ratio::new(1, 3); 3]);
    }

    #[test]
    fn s_chain_reaches_zero() {
        let rho = rho_sequence(&duval_factorize(&w("banana")).unwrap());
        let s = rho.s_chain(6);
        assert_eq!(s[0], 5.0 / 6.0);
        assert_eq!(s[3], 0.0);
        assert_eq!(s[5], 0.0);
    }
}
