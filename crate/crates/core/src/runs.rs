//! Run statistics of the binarized word, long runs and long blocks, the
//! good-word conditions, block decompositions and block shuffling.
//!
//! The binarization sends the smallest letter `a_1` to digit 0 and every
//! other letter to digit 1. Long runs are maximal `a_1`-runs of length at
//! least `(1-eps) log_{1/p_1} n`; a long block starts at a long run, ends
//! just before a later `a_1`-run, and takes the smallest length larger than
//! `1 + 3 log_{1/beta} n`.

use std::collections::HashMap;

use serde::Serialize;

use crate::dist::LetterDistribution;
use crate::error::{Error, Result};
use crate::word::{is_lyndon_slice, Span, Word};

/// Snap values that are integral up to f64 rounding error, so that
/// threshold comparisons at exact boundary values are deterministic.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

/// Smallest integer length satisfying "at least x".
fn at_least(x: f64) -> usize {
    snap(x).ceil().max(0.0) as usize
}

/// Largest integer length satisfying "at most x".
fn at_most(x: f64) -> usize {
    snap(x).floor().max(0.0) as usize
}

fn log_base(inv_base_of: f64, n: usize) -> f64 {
    // log_{1/p}(n) = ln n / -ln p
    (n as f64).ln() / -(inv_base_of.ln())
}

/// Digit word of the morphism phi: 0 where the letter is `a_1`, 1 otherwise.
pub fn binarize(w: &Word) -> Vec<u8> {
    w.letters().iter().map(|&r| u8::from(r != 1)).collect()
}

/// Maximal runs of phi(w) with all the derived counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// (digit, length) of each maximal run, in word order.
    pub runs: Vec<(u8, usize)>,
    /// N_n: total number of runs.
    pub total: usize,
    /// N_n^(0): number of runs of the digit 0 (letter a_1).
    pub zero_runs: usize,
    /// N_n^(1): number of runs of the digit 1.
    pub one_runs: usize,
    /// M_n^(0): maximal length of a 0-run (0 if none).
    pub max_zero_run: usize,
    /// M_n^(1): maximal length of a 1-run (0 if none).
    pub max_one_run: usize,
}

impl RunStats {
    /// X_i: run lengths in order.
    pub fn lengths(&self) -> Vec<usize> {
        self.runs.iter().map(|&(_, l)| l).collect()
    }
}

pub fn run_stats(w: &Word) -> RunStats {
    let digits = binarize(w);
    let mut runs: Vec<(u8, usize)> = Vec::new();
    for &d in &digits {
        match runs.last_mut() {
            Some((last, len)) if *last == d => *len += 1,
            _ => runs.push((d, 1)),
        }
    }
    let mut stats = RunStats {
        total: runs.len(),
        zero_runs: runs.iter().filter(|r| r.0 == 0).count(),
        one_runs: runs.iter().filter(|r| r.0 == 1).count(),
        max_zero_run: runs.iter().filter(|r| r.0 == 0).map(|r| r.1).max().unwrap_or(0),
        max_one_run: runs.iter().filter(|r| r.0 == 1).map(|r| r.1).max().unwrap_or(0),
        runs,
    };
    debug_assert_eq!(
        stats.runs.iter().map(|r| r.1).sum::<usize>(),
        w.len()
    );
    stats.runs.shrink_to_fit();
    stats
}

/// Block-decomposition parameters: eps in (0, 1/2) and
/// alpha in (0, p_1 (1 - p_1) / 4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockParams {
    pub epsilon: f64,
    pub alpha: f64,
}

impl BlockParams {
    pub fn new(epsilon: f64, alpha: f64, dist: &LetterDistribution) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {epsilon} must lie in (0, 1/2)"
            )));
        }
        let p1 = dist.p1();
        let cap = p1 * (1.0 - p1) / 4.0;
        if !(alpha > 0.0 && alpha < cap) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must lie in (0, p1(1-p1)/4) = (0, {cap})"
            )));
        }
        Ok(BlockParams { epsilon, alpha })
    }

    /// eps = 0.4, alpha = 0.9 p_1 (1 - p_1) / 4.
    pub fn defaults(dist: &LetterDistribution) -> Self {
        let p1 = dist.p1();
        BlockParams {
            epsilon: 0.4,
            alpha: 0.9 * p1 * (1.0 - p1) / 4.0,
        }
    }

    pub fn thresholds(&self, dist: &LetterDistribution, n: usize) -> BlockThresholds {
        let p1 = dist.p1();
        let beta = dist.beta();
        BlockThresholds {
            n,
            long_run_len: at_least((1.0 - self.epsilon) * log_base(p1, n)),
            min_block_len: at_most(1.0 + 3.0 * log_base(beta, n)) + 1,
            common_factor_violation_len: at_least(3.0 * log_base(beta, n)),
            max_zero_run: at_most(2.0 * log_base(p1, n)),
            max_one_run: at_most(2.0 * log_base(1.0 - p1, n)),
            required_long_blocks: at_most(self.alpha * (n as f64).powf(self.epsilon)),
        }
    }
}

/// Integer thresholds resolved for a given distribution and word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockThresholds {
    pub n: usize,
    /// A run is long iff its length is >= this.
    pub long_run_len: usize,
    /// Smallest admissible block length ("larger than 1 + 3 log_{1/beta} n").
    pub min_block_len: usize,
    /// A common factor of two long blocks of at least this length violates
    /// the good-word conditions.
    pub common_factor_violation_len: usize,
    /// Condition v: M_n^(0) must be at most this.
    pub max_zero_run: usize,
    /// Condition vi: M_n^(1) must be at most this.
    pub max_one_run: usize,
    /// Condition i: at least this many long blocks (floor(alpha n^eps)).
    pub required_long_blocks: usize,
}

fn zero_run_spans(s: &[u32]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if s[i] == 1 {
            let start = i;
            while i < s.len() && s[i] == 1 {
                i += 1;
            }
            spans.push(Span::new(start, i - start));
        } else {
            i += 1;
        }
    }
    spans
}

/// Spans of the maximal `a_1`-runs of length at least the long-run
/// threshold; their count is H_n(w).
pub fn long_runs(w: &Word, params: &BlockParams, dist: &LetterDistribution) -> Vec<Span> {
    let t = params.thresholds(dist, w.len());
    zero_run_spans(w.letters())
        .into_iter()
        .filter(|r| r.len >= t.long_run_len)
        .collect()
}

/// For each long run, the block it begins, when one fits before the word
/// end: the factor starting at the run, ending just before a later
/// `a_1`-run, of the smallest admissible length.
fn long_blocks_per_run(
    w: &Word,
    params: &BlockParams,
    dist: &LetterDistribution,
) -> Vec<(Span, Option<Span>)> {
    let t = params.thresholds(dist, w.len());
    let zero_runs = zero_run_spans(w.letters());
    let starts: Vec<usize> = zero_runs.iter().map(|r| r.start).collect();
    zero_runs
        .iter()
        .filter(|r| r.len >= t.long_run_len)
        .map(|&run| {
            let target = run.start + t.min_block_len;
            let idx = starts.partition_point(|&s| s < target);
            let block = starts
                .get(idx)
                .map(|&end| Span::new(run.start, end - run.start));
            (run, block)
        })
        .collect()
}

/// The long blocks of `w`, in word order. A long run whose block would
/// overrun the word end contributes none (good-word condition iv then
/// fails).
pub fn long_blocks(w: &Word, params: &BlockParams, dist: &LetterDistribution) -> Vec<Span> {
    long_blocks_per_run(w, params, dist)
        .into_iter()
        .filter_map(|(_, b)| b)
        .collect()
}

/// One of the six good-word conditions, with offending spans on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub passed: bool,
    pub witnesses: Vec<Span>,
}

impl ConditionCheck {
    fn pass() -> Self {
        ConditionCheck {
            passed: true,
            witnesses: Vec::new(),
        }
    }

    fn fail(witnesses: Vec<Span>) -> Self {
        ConditionCheck {
            passed: false,
            witnesses,
        }
    }
}

/// Literal evaluation of the six good-word conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodWordReport {
    pub thresholds: BlockThresholds,
    pub long_runs: Vec<Span>,
    pub long_blocks: Vec<Span>,
    /// Conditions i..vi in order.
    pub conditions: [ConditionCheck; 6],
    pub max_zero_run: usize,
    pub max_one_run: usize,
}

impl GoodWordReport {
    pub fn is_good(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failing_conditions(&self) -> Vec<usize> {
        self.conditions
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.passed)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// H_n: the number of long runs.
    pub fn h(&self) -> usize {
        self.long_runs.len()
    }
}

pub fn is_good_word(
    w: &Word,
    params: &BlockParams,
    dist: &LetterDistribution,
) -> GoodWordReport {
    let t = params.thresholds(dist, w.len());
    let per_run = long_blocks_per_run(w, params, dist);
    let long_runs: Vec<Span> = per_run.iter().map(|&(r, _)| r).collect();
    let blocks: Vec<Span> = per_run.iter().filter_map(|&(_, b)| b).collect();
    let stats = run_stats(w);

    // i. at least floor(alpha n^eps) long blocks
    let c1 = if blocks.len() >= t.required_long_blocks {
        ConditionCheck::pass()
    } else {
        ConditionCheck::fail(blocks.clone())
    };

    // ii. long blocks do not overlap (blocks are already in word order)
    let mut overlaps = Vec::new();
    for pair in blocks.windows(2) {
        if pair[1].start < pair[0].end() {
            overlaps.push(pair[0]);
            overlaps.push(pair[1]);
        }
    }
    let c2 = if overlaps.is_empty() {
        ConditionCheck::pass()
    } else {
        ConditionCheck::fail(overlaps)
    };

    // iii. no two long blocks share a factor of length >= the violation
    // threshold; checked via all windows of exactly that length.
    let c3 = {
        let lthr = t.common_factor_violation_len.max(1);
        let mut seen: HashMap<&[u32], usize> = HashMap::new();
        let mut witnesses = Vec::new();
        'outer: for (bi, span) in blocks.iter().enumerate() {
            let letters = w.slice(*span);
            if letters.len() < lthr {
                continue;
            }
            for off in 0..=letters.len() - lthr {
                let window = &letters[off..off + lthr];
                match seen.get(window) {
                    Some(&other) if other != bi => {
                        witnesses.push(Span::new(span.start + off, lthr));
                        witnesses.push(blocks[other]);
                        break 'outer;
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(window, bi);
                    }
                }
            }
        }
        if witnesses.is_empty() {
            ConditionCheck::pass()
        } else {
            ConditionCheck::fail(witnesses)
        }
    };

    // iv. every long run begins a long block
    let orphans: Vec<Span> = per_run
        .iter()
        .filter(|(_, b)| b.is_none())
        .map(|&(r, _)| r)
        .collect();
    let c4 = if orphans.is_empty() {
        ConditionCheck::pass()
    } else {
        ConditionCheck::fail(orphans)
    };

    // v. M_n^(0) <= 2 log_{1/p1} n
    let c5 = if stats.max_zero_run <= t.max_zero_run {
        ConditionCheck::pass()
    } else {
        let span = zero_run_spans(w.letters())
            .into_iter()
            .find(|r| r.len == stats.max_zero_run);
        ConditionCheck::fail(span.into_iter().collect())
    };

    // vi. M_n^(1) <= 2 log_{1/(1-p1)} n
    let c6 = if stats.max_one_run <= t.max_one_run {
        ConditionCheck::pass()
    } else {
        ConditionCheck::fail(Vec::new())
    };

    GoodWordReport {
        thresholds: t,
        long_runs,
        long_blocks: blocks,
        conditions: [c1, c2, c3, c4, c5, c6],
        max_zero_run: stats.max_zero_run,
        max_one_run: stats.max_one_run,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockMode {
    /// `w = Y_0 Y_1 .. Y_K` for good Lyndon words; `Y_0` is the first long
    /// block and stays fixed under shuffles.
    LyndonForm,
    /// `w = abar^k Y_1 .. Y_K' a_1^L` for good words; the non-`a_1` prefix
    /// and the trailing `a_1`-run stay fixed under shuffles.
    GeneralForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    Long,
    Short,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub span: Span,
    pub kind: BlockKind,
    /// 1-based lexicographic rank among all blocks of the decomposition
    /// (ties between equal short blocks broken by word order).
    pub rank: usize,
}

/// Tiling of a good word into long and short blocks, with the block ranks
/// and the positions of the smallest blocks.
#[derive(Debug, Clone, Serialize)]
pub struct BlockDecomposition {
    mode: BlockMode,
    #[serde(skip)]
    word: Word,
    n: usize,
    /// k: length of the fixed non-`a_1` prefix (0 in LyndonForm).
    pub prefix_len: usize,
    /// L_n: length of the fixed trailing `a_1`-run (0 in LyndonForm).
    pub suffix_len: usize,
    blocks: Vec<Block>,
    /// H_n: number of long blocks.
    h: usize,
    /// Index into `blocks` of the i-th smallest block, i = 1..=H_n.
    j_indices: Vec<usize>,
}

impl BlockDecomposition {
    pub fn mode(&self) -> BlockMode {
        self.mode
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// K: the shuffleable block count (K_n in LyndonForm, where Y_0 is
    /// excluded; K'_n in GeneralForm).
    pub fn k(&self) -> usize {
        match self.mode {
            BlockMode::LyndonForm => self.blocks.len().saturating_sub(1),
            BlockMode::GeneralForm => self.blocks.len(),
        }
    }

    /// H_n: the number of long blocks.
    pub fn h(&self) -> usize {
        self.h
    }

    pub fn block_word(&self, i: usize) -> Word {
        self.word.factor(self.blocks[i].span)
    }

    /// Xi_i: block lengths in word order.
    pub fn lengths(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.span.len).collect()
    }

    /// J_{i,n} for i = 1..=H_n: index (into `blocks`, word order) of the
    /// i-th smallest block. These are always long blocks.
    pub fn j_indices(&self) -> &[usize] {
        &self.j_indices
    }

    /// d_{i,n} numerators: absolute start offset of the i-th smallest block,
    /// i = 1..=H_n.
    pub fn d_offsets(&self) -> Vec<usize> {
        self.j_indices
            .iter()
            .map(|&j| self.blocks[j].span.start)
            .collect()
    }

    /// d_{i,n} = (k + sum of block lengths before J_{i,n}) / n.
    pub fn d_values(&self) -> Vec<f64> {
        self.d_offsets()
            .iter()
            .map(|&o| o as f64 / self.n as f64)
            .collect()
    }

    /// Ranks of the long blocks in word order, renumbered 1..=H_n.
    /// Low records of this sequence count the Lyndon factors that begin
    /// with long blocks (Lambda_n).
    pub fn long_block_ranks(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.kind == BlockKind::Long)
            .map(|b| b.rank)
            .collect()
    }

    /// Multiset of block words, sorted, for shuffle-invariance checks.
    pub fn block_multiset(&self) -> Vec<Vec<u32>> {
        let mut set: Vec<Vec<u32>> = self
            .blocks
            .iter()
            .map(|b| self.word.slice(b.span).to_vec())
            .collect();
        set.sort_unstable();
        set
    }
}

/// Decompose a good word into blocks, in either form.
pub fn block_decompose(
    w: &Word,
    params: &BlockParams,
    dist: &LetterDistribution,
    mode: BlockMode,
) -> Result<BlockDecomposition> {
    let report = is_good_word(w, params, dist);
    if !report.is_good() {
        return Err(Error::NotGoodWord {
            report: Box::new(report),
        });
    }
    if mode == BlockMode::LyndonForm {
        if !is_lyndon_slice(w.letters()) {
            return Err(Error::NotLyndon);
        }
        if report.long_blocks.first().map(|b| b.start) != Some(0) {
            return Err(Error::InvalidParameter(
                "LyndonForm needs the word to begin with a long block".into(),
            ));
        }
    }

    let s = w.letters();
    let n = s.len();
    let (prefix_len, suffix_len) = match mode {
        BlockMode::LyndonForm => (0, 0),
        BlockMode::GeneralForm => {
            let prefix = s.iter().take_while(|&&c| c != 1).count();
            let suffix = if prefix == n {
                0
            } else {
                s.iter().rev().take_while(|&&c| c == 1).count()
            };
            (prefix, suffix)
        }
    };

    let middle_end = n - suffix_len;
    let mut blocks: Vec<Block> = Vec::new();
    let mut next_long = report.long_blocks.iter().peekable();
    let mut pos = prefix_len;
    while pos < middle_end {
        if next_long.peek().map(|b| b.start) == Some(pos) {
            let span = *next_long.next().unwrap();
            pos = span.end();
            blocks.push(Block {
                span,
                kind: BlockKind::Long,
                rank: 0,
            });
            continue;
        }
        // short block: a_1-run then a non-a_1 run
        if s[pos] != 1 {
            return Err(Error::InvalidParameter(format!(
                "block tiling stuck at position {pos}: expected a_1"
            )));
        }
        let mut j = pos;
        while j < middle_end && s[j] == 1 {
            j += 1;
        }
        let mut end = j;
        while end < middle_end && s[end] != 1 {
            end += 1;
        }
        if end == j {
            return Err(Error::InvalidParameter(format!(
                "block tiling stuck at position {j}: a_1-run reaches the suffix"
            )));
        }
        blocks.push(Block {
            span: Span::new(pos, end - pos),
            kind: BlockKind::Short,
            rank: 0,
        });
        pos = end;
    }

    debug_assert_eq!(
        prefix_len + blocks.iter().map(|b| b.span.len).sum::<usize>() + suffix_len,
        n
    );

    // lexicographic ranks, word order as tiebreak
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| {
        w.slice(blocks[a].span)
            .cmp(w.slice(blocks[b].span))
            .then(blocks[a].span.start.cmp(&blocks[b].span.start))
    });
    for (rank0, &bi) in order.iter().enumerate() {
        blocks[bi].rank = rank0 + 1;
    }

    let h = blocks.iter().filter(|b| b.kind == BlockKind::Long).count();
    let j_indices: Vec<usize> = order[..h].to_vec();
    debug_assert!(
        j_indices.iter().all(|&i| blocks[i].kind == BlockKind::Long),
        "the H_n smallest blocks must be the long blocks"
    );

    Ok(BlockDecomposition {
        mode,
        word: w.clone(),
        n,
        prefix_len,
        suffix_len,
        blocks,
        h,
        j_indices,
    })
}

/// Rebuild a word from a decomposition with its shuffleable blocks permuted.
/// `perm` is a permutation of `0..K` over the shuffleable blocks in word
/// order (LyndonForm keeps Y_0 fixed; GeneralForm keeps the prefix and
/// suffix fixed).
pub fn shuffle_blocks(d: &BlockDecomposition, perm: &[usize]) -> Result<Word> {
    let k = d.k();
    if perm.len() != k {
        return Err(Error::InvalidPermutation(format!(
            "permutation has length {}, expected K = {k}",
            perm.len()
        )));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "not a permutation of 0..{k}"
            )));
        }
        seen[p] = true;
    }

    let s = d.word.letters();
    let fixed_head = d.blocks.len() - k;
    let mut letters = Vec::with_capacity(d.n);
    letters.extend_from_slice(&s[..d.prefix_len]);
    for b in &d.blocks[..fixed_head] {
        letters.extend_from_slice(d.word.slice(b.span));
    }
    for &p in perm {
        letters.extend_from_slice(d.word.slice(d.blocks[fixed_head + p].span));
    }
    letters.extend_from_slice(&s[d.n - d.suffix_len..]);
    debug_assert_eq!(letters.len(), d.n);
    Ok(Word::from_ranks_unchecked(d.word.alphabet(), letters))
}

/// Number of low records in the broad sense: positions i with
/// seq_i <= min(seq_1 .. seq_{i-1}).
pub fn count_low_records<T: PartialOrd>(seq: &[T]) -> usize {
    let mut count = 0;
    let mut min: Option<&T> = None;
    for x in seq {
        if min.map_or(true, |m| x <= m) {
            count += 1;
            min = Some(x);
        }
    }
    count
}
