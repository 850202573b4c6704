//! Words over an ordered alphabet: lexicographic order, rotations,
//! primitivity and the least-rotation (Lyndon) representative.
//!
//! Letters are stored as 1-based integer ranks, so the same machinery covers
//! finite alphabets and unbounded ones (geometric letter distributions). A
//! text codec maps lowercase ASCII to ranks for alphabets of size <= 26.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An ordered alphabet `a_1 < a_2 < ...`, either finite or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Alphabet {
    Finite(u32),
    Unbounded,
}

impl Alphabet {
    pub fn size(&self) -> Option<u32> {
        match self {
            Alphabet::Finite(q) => Some(*q),
            Alphabet::Unbounded => None,
        }
    }

    fn admits(&self, rank: u32) -> bool {
        match self {
            Alphabet::Finite(q) => rank >= 1 && rank <= *q,
            Alphabet::Unbounded => rank >= 1,
        }
    }
}

/// Half-open index range `[start, start + len)` into a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

impl Span {
    pub fn new(start: usize, len: usize) -> Self {
        Span { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// A finite word: a sequence of letter ranks over a fixed alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<u32>,
}

impl Word {
    /// Build a word from explicit ranks, validating them against the alphabet.
    pub fn from_ranks(alphabet: Alphabet, letters: Vec<u32>) -> Result<Self> {
        for &r in &letters {
            if !alphabet.admits(r) {
                return Err(Error::OutOfRange(format!(
                    "letter rank {r} not admitted by alphabet {alphabet:?}"
                )));
            }
        }
        Ok(Word { alphabet, letters })
    }

    /// Parse the text codec: lowercase ASCII `a..z` as ranks 1..26, or a
    /// comma-separated list of integer ranks. The alphabet is inferred as
    /// `Finite(max rank)` unless one is supplied.
    pub fn parse(text: &str, alphabet: Option<Alphabet>) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::InvalidParameter("empty word text".into()));
        }
        let letters: Vec<u32> = if text.contains(',') || text.chars().all(|c| c.is_ascii_digit()) {
            text.split(',')
                .map(|tok| {
                    tok.trim().parse::<u32>().map_err(|_| {
                        Error::InvalidParameter(format!("bad letter rank {tok:?}"))
                    })
                })
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    if c.is_ascii_lowercase() {
                        Ok(c as u32 - 'a' as u32 + 1)
                    } else {
                        Err(Error::InvalidParameter(format!(
                            "bad letter {c:?}: expected a-z or comma-separated ranks"
                        )))
                    }
                })
                .collect::<Result<_>>()?
        };
        let alphabet = alphabet
            .unwrap_or_else(|| Alphabet::Finite(letters.iter().copied().max().unwrap_or(1)));
        Word::from_ranks(alphabet, letters)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn slice(&self, span: Span) -> &[u32] {
        &self.letters[span.start..span.end()]
    }

    /// The factor of this word at `span`, as a word over the same alphabet.
    pub fn factor(&self, span: Span) -> Word {
        Word {
            alphabet: self.alphabet,
            letters: self.slice(span).to_vec(),
        }
    }

    pub(crate) fn from_ranks_unchecked(alphabet: Alphabet, letters: Vec<u32>) -> Self {
        Word { alphabet, letters }
    }

    /// Render with the text codec: letters for alphabets of size <= 26,
    /// comma-separated ranks otherwise.
    pub fn to_text(&self) -> String {
        let lettered = matches!(self.alphabet, Alphabet::Finite(q) if q <= 26);
        if lettered {
            self.letters
                .iter()
                .map(|&r| (b'a' + (r - 1) as u8) as char)
                .collect()
        } else {
            let toks: Vec<String> = self.letters.iter().map(|r| r.to_string()).collect();
            toks.join(",")
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Lexicographic comparison; a proper prefix is strictly smaller than its
/// extension. Errors if the words live over different alphabets.
pub fn lex_compare(u: &Word, v: &Word) -> Result<Ordering> {
    if u.alphabet != v.alphabet {
        return Err(Error::MismatchedAlphabets);
    }
    Ok(u.letters.as_slice().cmp(v.letters.as_slice()))
}

/// The rotation `tau^r w = w_{r+1} .. w_n w_1 .. w_r` (r taken mod n).
pub fn rotate(w: &Word, r: usize) -> Result<Word> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let n = w.len();
    let r = r % n;
    let mut letters = Vec::with_capacity(n);
    letters.extend_from_slice(&w.letters[r..]);
    letters.extend_from_slice(&w.letters[..r]);
    Ok(Word {
        alphabet: w.alphabet,
        letters,
    })
}

pub(crate) fn is_primitive_slice(s: &[u32]) -> bool {
    let n = s.len();
    debug_assert!(n >= 1);
    // w = v^{n/d} for a proper divisor d iff w has period d.
    for d in 1..=n / 2 {
        if n % d == 0 && (d..n).all(|i| s[i] == s[i - d]) {
            return false;
        }
    }
    true
}

/// True iff the necklace of `w` has exactly n distinct elements,
/// i.e. `w` is not a proper power.
pub fn is_primitive(w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(is_primitive_slice(w.letters()))
}

/// Booth's least-rotation algorithm: index of the lexicographically minimal
/// rotation, in O(n).
pub(crate) fn booth_least_rotation(s: &[u32]) -> usize {
    let n = s.len();
    let at = |i: usize| s[i % n];
    // failure function over the doubled word, -1 encoded as usize::MAX
    let mut f = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = f[j - k - 1];
        while i != usize::MAX && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i];
        }
        if i == usize::MAX && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            f[j - k] = usize::MAX;
        } else {
            f[j - k] = i.wrapping_add(1);
        }
    }
    k
}

/// The map pi: the unique Lyndon word in the necklace of a primitive word,
/// returned with the rotation shift that reaches it.
pub fn least_rotation(w: &Word) -> Result<(usize, Word)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !is_primitive_slice(w.letters()) {
        return Err(Error::NotPrimitive);
    }
    let shift = booth_least_rotation(w.letters());
    let rotated = rotate(w, shift)?;
    Ok((shift, rotated))
}

pub(crate) fn is_lyndon_slice(s: &[u32]) -> bool {
    let n = s.len();
    if n == 0 {
        return false;
    }
    // Duval's inner loop from position 0: the longest Lyndon prefix has
    // length j - k; w is Lyndon iff that prefix is w itself.
    let (mut j, mut k) = (1usize, 0usize);
    while j < n && s[k] <= s[j] {
        if s[k] < s[j] {
            k = 0;
        } else {
            k += 1;
        }
        j += 1;
    }
    j == n && k == 0
}

/// True iff `w` is primitive and minimal in its necklace; equivalently,
/// strictly smaller than every proper suffix.
pub fn is_lyndon(w: &Word) -> bool {
    is_lyndon_slice(w.letters())
}
