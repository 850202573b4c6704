//! Letter distributions: probabilities `(p_i)` on the alphabet ranks, with
//! `0 < p_1 < 1`. Finite support, or a geometric family on an unbounded
//! alphabet.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::Alphabet;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
enum Support {
    /// Explicit probabilities for ranks 1..=q.
    Finite(Vec<f64>),
    /// p_i = p (1-p)^{i-1} for i >= 1.
    Geometric(f64),
}

/// Probability distribution on the letters of an ordered alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LetterDistribution {
    support: Support,
    /// Cumulative sums for finite inverse-CDF sampling.
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl LetterDistribution {
    /// Distribution with explicit probabilities `p_1, ..., p_q`.
    pub fn finite(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no probabilities given".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || p > 1.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1 within {SUM_TOLERANCE}"
            )));
        }
        let p1 = probs[0];
        if p1 <= 0.0 || p1 >= 1.0 {
            return Err(Error::InvalidDistribution(format!(
                "p_1 = {p1} must satisfy 0 < p_1 < 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // guard against rounding in the last bin
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(LetterDistribution {
            support: Support::Finite(probs),
            cumulative,
        })
    }

    /// Uniform distribution on `q >= 2` letters.
    pub fn uniform(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDistribution(
                "uniform alphabet needs q >= 2".into(),
            ));
        }
        Self::finite(vec![1.0 / q as f64; q as usize])
    }

    /// Geometric distribution `p_i = p (1-p)^{i-1}` on an unbounded alphabet.
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "geometric parameter {p} must lie in (0, 1)"
            )));
        }
        Ok(LetterDistribution {
            support: Support::Geometric(p),
            cumulative: Vec::new(),
        })
    }

    /// Parse a distribution spec: `uniform:q`, `geometric:p` or
    /// `json:[p1,p2,...]`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(q) = spec.strip_prefix("uniform:") {
            let q: u32 = q
                .trim()
                .parse()
                .map_err(|_| Error::InvalidDistribution(format!("bad uniform size {q:?}")))?;
            Self::uniform(q)
        } else if let Some(p) = spec.strip_prefix("geometric:") {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidDistribution(format!("bad geometric param {p:?}")))?;
            Self::geometric(p)
        } else if let Some(json) = spec.strip_prefix("json:") {
            let probs: Vec<f64> = serde_json::from_str(json).map_err(|e| {
                Error::InvalidDistribution(format!("bad json probability list: {e}"))
            })?;
            Self::finite(probs)
        } else {
            Err(Error::InvalidDistribution(format!(
                "unknown distribution spec {spec:?} (expected uniform:q, geometric:p or json:[..])"
            )))
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match &self.support {
            Support::Finite(p) => Alphabet::Finite(p.len() as u32),
            Support::Geometric(_) => Alphabet::Unbounded,
        }
    }

    /// Probability of the rank-1 letter.
    pub fn p1(&self) -> f64 {
        match &self.support {
            Support::Finite(p) => p[0],
            Support::Geometric(p) => *p,
        }
    }

    /// beta = max(p_1, 1 - p_1).
    pub fn beta(&self) -> f64 {
        let p1 = self.p1();
        p1.max(1.0 - p1)
    }

    /// Probability of letter rank `i >= 1`.
    pub fn prob(&self, rank: u32) -> f64 {
        debug_assert!(rank >= 1);
        match &self.support {
            Support::Finite(p) => p.get(rank as usize - 1).copied().unwrap_or(0.0),
            Support::Geometric(p) => p * (1.0 - p).powi(rank as i32 - 1),
        }
    }

    /// Finite probability vector, if the support is finite.
    pub fn finite_probs(&self) -> Option<&[f64]> {
        match &self.support {
            Support::Finite(p) => Some(p),
            Support::Geometric(_) => None,
        }
    }

    pub fn geometric_param(&self) -> Option<f64> {
        match &self.support {
            Support::Geometric(p) => Some(*p),
            Support::Finite(_) => None,
        }
    }

    /// sum_i p_i^a, in closed form for the geometric family.
    pub(crate) fn power_sum(&self, a: f64) -> f64 {
        match &self.support {
            Support::Finite(p) => p.iter().map(|&pi| pi.powf(a)).sum(),
            Support::Geometric(p) => p.powf(a) / (1.0 - (1.0 - p).powf(a)),
        }
    }

    /// Inverse CDF: the letter rank at quantile `u` in [0, 1).
    pub(crate) fn quantile_rank(&self, u: f64) -> u32 {
        match &self.support {
            Support::Finite(_) => {
                match self
                    .cumulative
                    .binary_search_by(|c| c.partial_cmp(&u).unwrap())
                {
                    Ok(i) => i as u32 + 2, // u exactly on a boundary: next letter
                    Err(i) => i as u32 + 1,
                }
            }
            Support::Geometric(p) => {
                // smallest i with 1 - (1-p)^i > u
                let i = ((-u).ln_1p() / (1.0 - p).ln()).floor() as i64 + 1;
                i.max(1) as u32
            }
        }
    }
}
