//! Reproducible Monte Carlo experiments and the exact small-n enumeration
//! oracle.
//!
//! An experiment is a pure function of its config: trials are partitioned
//! across logical shards, each shard samples from its own derived seed, and
//! shard results merge in index order, so re-running the same config
//! reproduces the statistic block byte for byte.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::dist::LetterDistribution;
use crate::error::{Error, Result};
use crate::factorization::smallest_suffix_brute;
use crate::laws::{
    self, chi_square_two_sample, harmonic, ks_statistic_vs_law, records_pmf,
    wasserstein2_vs_law, weighted_seq_distance, ChiSquareResult, MuLaw, ReferenceLaw,
};
use crate::runs::{self, count_low_records, BlockMode, BlockParams};
use crate::sampling::{derive_shard_seed, LyndonSampler, SamplerConfig, WordSampler, RNG_NAME};
use crate::word::{is_lyndon_slice, is_primitive_slice, Word};

pub const TOOL_NAME: &str = "lyndonlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Depth at which s-chains are recorded for the weighted sequence metric.
const CHAIN_DEPTH: usize = 64;
/// Leading-zero-fragment counts are binned at 0..=LEADING_ZERO_CAP, with a
/// final overflow bin.
const LEADING_ZERO_CAP: usize = 32;
/// Stream id offset for the reference samplers, clear of shard stream ids.
const REFERENCE_STREAM: u64 = 1 << 32;
/// Stream id offset for the record-statistics word sampler.
const RECORDS_STREAM: u64 = 1 << 33;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub dist_spec: String,
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub alpha: f64,
    pub shards: u64,
}

impl ExperimentConfig {
    /// Validates the config and resolves default block parameters from the
    /// distribution when `epsilon`/`alpha` are not given.
    pub fn new(
        experiment: impl Into<String>,
        dist_spec: impl Into<String>,
        n_values: Vec<usize>,
        trials: u64,
        seed: u64,
        epsilon: Option<f64>,
        alpha: Option<f64>,
        shards: u64,
    ) -> Result<Self> {
        let dist_spec = dist_spec.into();
        let dist = LetterDistribution::parse_spec(&dist_spec)?;
        if n_values.is_empty() || n_values.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter(
                "need at least one word length n >= 1".into(),
            ));
        }
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if shards == 0 {
            return Err(Error::InvalidParameter("shards must be >= 1".into()));
        }
        let defaults = BlockParams::defaults(&dist);
        let params = BlockParams::new(
            epsilon.unwrap_or(defaults.epsilon),
            alpha.unwrap_or(defaults.alpha),
            &dist,
        )?;
        Ok(ExperimentConfig {
            experiment: experiment.into(),
            dist_spec,
            n_values,
            trials,
            seed,
            epsilon: params.epsilon,
            alpha: params.alpha,
            shards,
        })
    }

    pub fn dist(&self) -> LetterDistribution {
        LetterDistribution::parse_spec(&self.dist_spec).expect("validated at construction")
    }

    pub fn block_params(&self) -> BlockParams {
        BlockParams {
            epsilon: self.epsilon,
            alpha: self.alpha,
        }
    }

    pub fn shard_seeds(&self) -> Vec<u64> {
        (0..self.shards)
            .map(|i| derive_shard_seed(self.seed, i))
            .collect()
    }

    /// Trial counts per shard: trials split as evenly as possible.
    fn shard_trials(&self) -> Vec<u64> {
        let base = self.trials / self.shards;
        let rem = self.trials % self.shards;
        (0..self.shards)
            .map(|i| base + u64::from(i < rem))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
}

/// Fixed-width histogram over [lo, hi]; values outside are clamped into the
/// end bins.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram {
            lo,
            hi,
            bins: vec![0; bins],
        }
    }

    pub fn add(&mut self, x: f64) {
        let k = self.bins.len();
        let t = (x - self.lo) / (self.hi - self.lo);
        let idx = ((t * k as f64).floor() as i64).clamp(0, k as i64 - 1) as usize;
        self.bins[idx] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        debug_assert_eq!(self.bins.len(), other.bins.len());
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        let k = self.bins.len() as f64;
        for (i, &c) in self.bins.iter().enumerate() {
            let lo = self.lo + (self.hi - self.lo) * i as f64 / k;
            let hi = self.lo + (self.hi - self.lo) * (i as f64 + 1.0) / k;
            out.push_str(&format!("{lo},{hi},{c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Statistics {
    RightFactor(RightFactorStats),
    FactorLengths(FactorLengthsStats),
    GoodWords(GoodWordStats),
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: ExperimentConfig,
    pub shard_seeds: Vec<u64>,
    pub statistics: Statistics,
    /// Not part of the reproducibility contract.
    pub wall_clock_ms: u128,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, statistics: Statistics, started: Instant) -> Self {
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: ToolInfo {
                name: TOOL_NAME,
                version: TOOL_VERSION,
                rng: RNG_NAME,
            },
            config: config.clone(),
            shard_seeds: config.shard_seeds(),
            statistics,
            wall_clock_ms: started.elapsed().as_millis(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Canonical serialization of the statistic block; two runs with the
    /// same config must agree on this byte for byte.
    pub fn statistics_json(&self) -> String {
        serde_json::to_string(&self.statistics).expect("statistics serialize")
    }

    /// Named CSV histogram exports for plotting.
    pub fn histograms_csv(&self) -> Vec<(String, String)> {
        match &self.statistics {
            Statistics::RightFactor(s) => {
                vec![("rn_hist".into(), s.histogram.to_csv())]
            }
            Statistics::FactorLengths(s) => vec![
                ("rho1_hist".into(), s.rho1_histogram.to_csv()),
                ("largest_part_hist".into(), s.largest_part_histogram.to_csv()),
            ],
            Statistics::GoodWords(_) => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// standard right factor experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RightFactorStats {
    pub n: usize,
    pub trials: u64,
    /// Empirical frequency of the atom event r_n = 1 - 1/n.
    pub atom_frequency: f64,
    pub atom_count: u64,
    /// W_2 between the r_n sample and mu(p1).
    pub w2_vs_mu: f64,
    /// First three raw moments of r_n, against the moments of mu.
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub mu_mean: f64,
    pub mu_m2: f64,
    pub mu_m3: f64,
    /// Aggregate rejection counters from the Lyndon sampler.
    pub sampler_rejections: u64,
    pub sampler_accepted: u64,
    pub histogram: Histogram,
}

pub struct RightFactorOutcome {
    pub report: ExperimentReport,
    /// r_n per trial, in shard order.
    pub samples: Vec<f64>,
}

/// Sample Lyndon words under L_n and measure the normalized length of the
/// standard right factor against its limit law.
pub fn run_right_factor_experiment(cfg: &ExperimentConfig) -> Result<RightFactorOutcome> {
    let started = Instant::now();
    let dist = cfg.dist();
    let n = cfg.n_values[0];
    if n < 2 {
        return Err(Error::InvalidParameter(
            "right-factor experiment needs n >= 2".into(),
        ));
    }

    let mut samples: Vec<f64> = Vec::with_capacity(cfg.trials as usize);
    let mut atom_count = 0u64;
    let mut rejections = 0u64;
    let mut accepted = 0u64;
    let mut histogram = Histogram::new(0.0, 1.0, 64);

    for (shard, &shard_trials) in cfg.shard_trials().iter().enumerate() {
        let sampler_cfg = SamplerConfig {
            dist: dist.clone(),
            n,
            seed: derive_shard_seed(cfg.seed, shard as u64),
            stream_id: 0,
        };
        let mut sampler = LyndonSampler::new(&sampler_cfg)?;
        for _ in 0..shard_trials {
            let w = sampler.next_lyndon();
            let f = crate::factorization::standard_right_factor(&w)?;
            let right_len = f.right_len();
            if right_len == n - 1 {
                atom_count += 1;
            }
            let r = right_len as f64 / n as f64;
            histogram.add(r);
            samples.push(r);
        }
        rejections += sampler.stats.rejections;
        accepted += sampler.stats.accepted;
    }

    let trials = cfg.trials as f64;
    let mu = MuLaw::right_factor(dist.p1())?;
    let stats = RightFactorStats {
        n,
        trials: cfg.trials,
        atom_frequency: atom_count as f64 / trials,
        atom_count,
        w2_vs_mu: wasserstein2_vs_law(&samples, &ReferenceLaw::Mu(mu))?,
        mean: samples.iter().sum::<f64>() / trials,
        m2: samples.iter().map(|r| r * r).sum::<f64>() / trials,
        m3: samples.iter().map(|r| r * r * r).sum::<f64>() / trials,
        mu_mean: mu.moment(1),
        mu_m2: mu.moment(2),
        mu_m3: mu.moment(3),
        sampler_rejections: rejections,
        sampler_accepted: accepted,
        histogram,
    };
    Ok(RightFactorOutcome {
        report: ExperimentReport::new(cfg, Statistics::RightFactor(stats), started),
        samples,
    })
}

// ---------------------------------------------------------------------------
// factor lengths experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct FactorLengthsStats {
    pub n: usize,
    pub trials: u64,
    /// Empirical frequency of {smallest factor = "a_1"} (the finite-n
    /// surrogate for the atom of rho_1 at 0); the limit mass is p_1.
    pub p_smallest_factor_a1: f64,
    /// KS distance of rho_1, conditioned on the smallest factor having more
    /// than one letter, against Uniform(0, 1].
    pub ks_rho1_positive_vs_uniform: f64,
    pub conditional_samples: u64,
    /// Two-sample chi-square of the leading-zero-fragment counts (trailing
    /// a_1-run lengths) against the stickbreak-variant reference sampler.
    pub leading_zero_chi_square: ChiSquareResult,
    /// Weighted-metric distance between the empirical s-chains and the
    /// stickbreak-variant reference chains.
    pub s_chain_distance: f64,
    /// Mean largest part of the decreasing rearrangement, against the PD(1)
    /// stickbreaking reference.
    pub mean_largest_part: f64,
    pub pd1_reference_mean: f64,
    pub rho1_histogram: Histogram,
    pub largest_part_histogram: Histogram,
}

pub struct FactorLengthsOutcome {
    pub report: ExperimentReport,
    /// rho_1 per trial, in shard order.
    pub rho1_samples: Vec<f64>,
    /// Largest part of the decreasing rearrangement per trial.
    pub largest_parts: Vec<f64>,
}

/// Sample words under P_n, factorize, and measure the smallest-factor
/// statistics against the stickbreaking-variant limit.
pub fn run_factor_lengths_experiment(cfg: &ExperimentConfig) -> Result<FactorLengthsOutcome> {
    let started = Instant::now();
    let dist = cfg.dist();
    let n = cfg.n_values[0];
    let p1 = dist.p1();

    let mut rho1_samples = Vec::with_capacity(cfg.trials as usize);
    let mut conditional: Vec<f64> = Vec::new();
    let mut largest_parts = Vec::with_capacity(cfg.trials as usize);
    let mut chains: Vec<Vec<f64>> = Vec::with_capacity(cfg.trials as usize);
    let mut smallest_a1 = 0u64;
    let mut zero_counts = vec![0u64; LEADING_ZERO_CAP + 2];
    let mut rho1_histogram = Histogram::new(0.0, 1.0, 64);
    let mut largest_part_histogram = Histogram::new(0.0, 1.0, 64);

    for (shard, &shard_trials) in cfg.shard_trials().iter().enumerate() {
        let sampler_cfg = SamplerConfig {
            dist: dist.clone(),
            n,
            seed: derive_shard_seed(cfg.seed, shard as u64),
            stream_id: 0,
        };
        let mut sampler = WordSampler::new(&sampler_cfg)?;
        for _ in 0..shard_trials {
            let w = sampler.next_word();
            let fact = crate::factorization::duval_factorize(&w)?;
            let rho = crate::factorization::rho_sequence(&fact);
            let lengths = rho.lengths();

            let smallest_is_a1 =
                lengths[0] == 1 && *w.letters().last().expect("nonempty") == 1;
            if smallest_is_a1 {
                smallest_a1 += 1;
            }
            let rho1 = lengths[0] as f64 / n as f64;
            rho1_samples.push(rho1);
            rho1_histogram.add(rho1);
            if lengths[0] > 1 {
                conditional.push(rho1);
            }

            // leading zero fragments = trailing a_1-run length
            let zeros = w
                .letters()
                .iter()
                .rev()
                .take_while(|&&c| c == 1)
                .count()
                .min(LEADING_ZERO_CAP + 1);
            zero_counts[zeros] += 1;

            let largest = *lengths.iter().max().expect("nonempty") as f64 / n as f64;
            largest_parts.push(largest);
            largest_part_histogram.add(largest);

            chains.push(rho.s_chain(CHAIN_DEPTH));
        }
    }

    // reference draws from the stickbreak variant and the PD(1) oracle
    let mut ref_zero_counts = vec![0u64; LEADING_ZERO_CAP + 2];
    let mut ref_chains: Vec<Vec<f64>> = Vec::with_capacity(cfg.trials as usize);
    let mut pd1_sum = 0.0f64;
    for i in 0..cfg.trials {
        let seed = derive_shard_seed(cfg.seed, REFERENCE_STREAM + i);
        let sb = laws::sample_stickbreak_variant(p1, CHAIN_DEPTH, seed)?;
        let zeros = sb
            .fragments
            .iter()
            .take_while(|&&f| f == 0.0)
            .count()
            .min(LEADING_ZERO_CAP + 1);
        ref_zero_counts[zeros] += 1;
        ref_chains.push(sb.chain);
        pd1_sum += laws::sample_pd1(1, seed)?.parts[0];
    }

    let trials = cfg.trials as f64;
    let stats = FactorLengthsStats {
        n,
        trials: cfg.trials,
        p_smallest_factor_a1: smallest_a1 as f64 / trials,
        ks_rho1_positive_vs_uniform: if conditional.is_empty() {
            f64::NAN
        } else {
            ks_statistic_vs_law(&conditional, &ReferenceLaw::Uniform01)?
        },
        conditional_samples: conditional.len() as u64,
        leading_zero_chi_square: chi_square_two_sample(&zero_counts, &ref_zero_counts)?,
        s_chain_distance: weighted_seq_distance(&chains, &ref_chains)?,
        mean_largest_part: largest_parts.iter().sum::<f64>() / trials,
        pd1_reference_mean: pd1_sum / trials,
        rho1_histogram,
        largest_part_histogram,
    };
    Ok(FactorLengthsOutcome {
        report: ExperimentReport::new(cfg, Statistics::FactorLengths(stats), started),
        rho1_samples,
        largest_parts,
    })
}

// ---------------------------------------------------------------------------
// good-word experiment (n sweep)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct GoodWordRow {
    pub n: usize,
    pub trials: u64,
    pub good_fraction: f64,
    pub mean_h: f64,
    /// Fraction with H_n >= alpha n^eps.
    pub frac_h_at_least_alpha_n_eps: f64,
    /// Fraction with M_n^(0) <= 2 log_{1/p1} n.
    pub frac_m0_within_bound: f64,
    /// Fraction with M_n^(1) <= 2 log_{1/(1-p1)} n.
    pub frac_m1_within_bound: f64,
    /// Good Lyndon words on which the structural assertions were checked.
    pub consgn2_checked: u64,
    /// Violations of "smallest long block is a prefix of w".
    pub consgn2_prefix_violations: u64,
    /// Violations of "second-smallest long block prefixes the standard right
    /// factor, or r_n = 1 - 1/n".
    pub consgn2_second_violations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordStats {
    pub n: usize,
    /// Good words (under P_n) whose block decomposition was measured.
    pub words: u64,
    /// Attempts needed to find them.
    pub attempts: u64,
    pub lambda_mean: f64,
    /// Mean of the exact conditional means H_{H_n}, weighted by the observed
    /// H_n, via the record pmf for sizes within its range.
    pub expected_mean: f64,
    /// Standard error of lambda_mean - expected_mean.
    pub std_error: f64,
    pub mean_h: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoodWordStats {
    pub rows: Vec<GoodWordRow>,
    /// "nondecreasing" | "decreasing" | "insufficient" over the n sweep.
    pub good_fraction_trend: String,
    pub records: Option<RecordStats>,
}

pub struct GoodWordOutcome {
    pub report: ExperimentReport,
}

/// Sweep word lengths, sampling Lyndon words under L_n: good-word fraction,
/// run statistics, the structural assertions on good Lyndon words, and
/// record counts of block ranks on good words under P_n at the largest n.
pub fn run_good_word_experiment(cfg: &ExperimentConfig) -> Result<GoodWordOutcome> {
    let started = Instant::now();
    let dist = cfg.dist();
    let params = cfg.block_params();

    let mut rows = Vec::with_capacity(cfg.n_values.len());
    for (n_index, &n) in cfg.n_values.iter().enumerate() {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "good-word experiment needs n >= 2".into(),
            ));
        }
        let thresholds = params.thresholds(&dist, n);
        let alpha_n_eps = cfg.alpha * (n as f64).powf(cfg.epsilon);

        let mut good = 0u64;
        let mut h_sum = 0u64;
        let mut h_ok = 0u64;
        let mut m0_ok = 0u64;
        let mut m1_ok = 0u64;
        let mut checked = 0u64;
        let mut prefix_violations = 0u64;
        let mut second_violations = 0u64;

        for (shard, &shard_trials) in cfg.shard_trials().iter().enumerate() {
            let sampler_cfg = SamplerConfig {
                dist: dist.clone(),
                n,
                seed: derive_shard_seed(cfg.seed, shard as u64),
                stream_id: n_index as u64,
            };
            let mut sampler = LyndonSampler::new(&sampler_cfg)?;
            for _ in 0..shard_trials {
                let w = sampler.next_lyndon();
                let report = runs::is_good_word(&w, &params, &dist);
                let h = report.h();
                h_sum += h as u64;
                if h as f64 >= alpha_n_eps {
                    h_ok += 1;
                }
                if report.max_zero_run <= thresholds.max_zero_run {
                    m0_ok += 1;
                }
                if report.max_one_run <= thresholds.max_one_run {
                    m1_ok += 1;
                }
                if report.is_good() {
                    good += 1;
                    checked += 1;
                    let (p_viol, s_viol) = check_good_lyndon_structure(&w, &report)?;
                    prefix_violations += u64::from(p_viol);
                    second_violations += u64::from(s_viol);
                }
            }
        }

        let trials = cfg.trials as f64;
        rows.push(GoodWordRow {
            n,
            trials: cfg.trials,
            good_fraction: good as f64 / trials,
            mean_h: h_sum as f64 / trials,
            frac_h_at_least_alpha_n_eps: h_ok as f64 / trials,
            frac_m0_within_bound: m0_ok as f64 / trials,
            frac_m1_within_bound: m1_ok as f64 / trials,
            consgn2_checked: checked,
            consgn2_prefix_violations: prefix_violations,
            consgn2_second_violations: second_violations,
        });
    }

    let good_fraction_trend = if rows.len() < 3 {
        "insufficient".to_string()
    } else if rows
        .windows(2)
        .all(|w| w[1].good_fraction >= w[0].good_fraction)
    {
        "nondecreasing".to_string()
    } else {
        "decreasing".to_string()
    };

    let records = Some(run_record_statistics(cfg, &dist, &params)?);

    let stats = GoodWordStats {
        rows,
        good_fraction_trend,
        records,
    };
    Ok(GoodWordOutcome {
        report: ExperimentReport::new(cfg, Statistics::GoodWords(stats), started),
    })
}

/// Structural assertions on a good Lyndon word: the smallest long block is a
/// prefix of the word, and (when a second one exists) the second-smallest
/// long block prefixes the standard right factor unless r_n = 1 - 1/n.
/// Returns (prefix violated, second violated).
fn check_good_lyndon_structure(
    w: &Word,
    report: &runs::GoodWordReport,
) -> Result<(bool, bool)> {
    let mut sorted = report.long_blocks.clone();
    sorted.sort_by(|a, b| w.slice(*a).cmp(w.slice(*b)));

    let mut prefix_violated = false;
    let mut second_violated = false;
    if let Some(&smallest) = sorted.first() {
        prefix_violated = w.slice(smallest) != &w.letters()[..smallest.len];
    }
    if sorted.len() >= 2 && w.len() >= 2 {
        let second = sorted[1];
        let f = crate::factorization::standard_right_factor(w)?;
        let atom = f.right_len() == w.len() - 1;
        let prefixes = f.v.len() >= second.len
            && &f.v.letters()[..second.len] == w.slice(second);
        second_violated = !(atom || prefixes);
    }
    Ok((prefix_violated, second_violated))
}

/// Record counts of the long-block rank sequence over good words under P_n.
fn run_record_statistics(
    cfg: &ExperimentConfig,
    dist: &LetterDistribution,
    params: &BlockParams,
) -> Result<RecordStats> {
    let n = *cfg.n_values.iter().max().expect("nonempty");
    let target = cfg.trials;
    let sampler_cfg = SamplerConfig {
        dist: dist.clone(),
        n,
        seed: cfg.seed,
        stream_id: RECORDS_STREAM,
    };
    let mut sampler = WordSampler::new(&sampler_cfg)?;

    let mut lambdas: Vec<u64> = Vec::with_capacity(target as usize);
    let mut conditional_means: Vec<f64> = Vec::with_capacity(target as usize);
    let mut h_sum = 0u64;
    let mut attempts = 0u64;
    let max_attempts = target.saturating_mul(50).max(1000);
    while (lambdas.len() as u64) < target && attempts < max_attempts {
        attempts += 1;
        let w = sampler.next_word();
        let Ok(dec) = runs::block_decompose(&w, params, dist, BlockMode::GeneralForm) else {
            continue;
        };
        let h = dec.h();
        if h == 0 {
            continue;
        }
        let ranks = dec.long_block_ranks();
        lambdas.push(count_low_records(&ranks) as u64);
        // conditional mean of the record count given H_n = h is H_h; read it
        // through the exact pmf while h is within its supported range
        let cond_mean = if h <= 64 {
            records_pmf(h)?
                .iter()
                .enumerate()
                .map(|(j, p)| (j + 1) as f64 * p)
                .sum()
        } else {
            harmonic(h)
        };
        conditional_means.push(cond_mean);
        h_sum += h as u64;
    }

    let words = lambdas.len() as f64;
    if words == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "no good words with long blocks found at n = {n} within {max_attempts} attempts"
        )));
    }
    let lambda_mean = lambdas.iter().sum::<u64>() as f64 / words;
    let expected_mean = conditional_means.iter().sum::<f64>() / words;
    let residuals: Vec<f64> = lambdas
        .iter()
        .zip(&conditional_means)
        .map(|(&l, &m)| l as f64 - m)
        .collect();
    let res_mean = residuals.iter().sum::<f64>() / words;
    let res_var = residuals
        .iter()
        .map(|r| (r - res_mean) * (r - res_mean))
        .sum::<f64>()
        / words;
    Ok(RecordStats {
        n,
        words: lambdas.len() as u64,
        attempts,
        lambda_mean,
        expected_mean,
        std_error: (res_var / words).sqrt(),
        mean_h: h_sum as f64 / words,
    })
}

// ---------------------------------------------------------------------------
// exact small-n oracle
// ---------------------------------------------------------------------------

/// Enumeration budget: q^n may not exceed this many words.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallNStatistic {
    RightFactor,
    Rho,
    PrimitiveProb,
    GoodFraction,
}

impl SmallNStatistic {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "right-factor" => Ok(SmallNStatistic::RightFactor),
            "rho" => Ok(SmallNStatistic::Rho),
            "primitive-prob" => Ok(SmallNStatistic::PrimitiveProb),
            "good-fraction" => Ok(SmallNStatistic::GoodFraction),
            other => Err(Error::InvalidParameter(format!(
                "unknown statistic {other:?} (expected right-factor, rho, primitive-prob or good-fraction)"
            ))),
        }
    }
}

/// Exact value of a statistic's law: either a scalar probability or a pmf
/// over statistic values, as reduced rational strings.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum LawValue {
    Scalar { value: String },
    Pmf { entries: Vec<(String, String)> },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactLaw {
    pub n: usize,
    pub statistic: String,
    /// Law under P_n (all words).
    pub under_pn: LawValue,
    /// Law under L_n (Lyndon words, renormalized).
    pub under_ln: LawValue,
}

/// Parse a decimal or fraction literal as an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidParameter(format!("bad rational literal {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let digits = frac.len() as u32;
        let int: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(digits);
        return Ok(BigRational::new(int * &scale + frac, scale));
    }
    let int: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from(int))
}

/// Exact rational probabilities for a finite distribution spec
/// (`uniform:q` or `json:[..]`, with decimal literals read exactly).
pub fn parse_spec_rational(spec: &str) -> Result<Vec<BigRational>> {
    let spec = spec.trim();
    if let Some(q) = spec.strip_prefix("uniform:") {
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| Error::InvalidDistribution(format!("bad uniform size {q:?}")))?;
        if q < 2 {
            return Err(Error::InvalidDistribution("uniform needs q >= 2".into()));
        }
        return Ok(vec![
            BigRational::new(BigInt::one(), BigInt::from(q));
            q as usize
        ]);
    }
    if let Some(json) = spec.strip_prefix("json:") {
        let raw: Vec<serde_json::Value> = serde_json::from_str(json).map_err(|e| {
            Error::InvalidDistribution(format!("bad json probability list: {e}"))
        })?;
        let probs: Vec<BigRational> = raw
            .iter()
            .map(|v| match v {
                serde_json::Value::Number(x) => parse_rational(&x.to_string()),
                serde_json::Value::String(s) => parse_rational(s),
                other => Err(Error::InvalidDistribution(format!(
                    "bad probability entry {other}"
                ))),
            })
            .collect::<Result<_>>()?;
        let total: BigRational = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(
                "probabilities must sum to exactly 1".into(),
            ));
        }
        return Ok(probs);
    }
    Err(Error::InvalidDistribution(format!(
        "exact enumeration needs a finite distribution (uniform:q or json:[..]), got {spec:?}"
    )))
}

struct Tally {
    /// statistic key -> letter-count vector -> number of words
    by_key: BTreeMap<String, HashMap<Vec<u16>, u64>>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            by_key: BTreeMap::new(),
        }
    }

    fn add(&mut self, key: String, counts: &[u16]) {
        *self
            .by_key
            .entry(key)
            .or_default()
            .entry(counts.to_vec())
            .or_insert(0) += 1;
    }

    /// Total probability mass per key.
    fn masses(&self, probs: &[BigRational]) -> Vec<(String, BigRational)> {
        self.by_key
            .iter()
            .map(|(key, classes)| {
                let mut mass = BigRational::zero();
                for (counts, &words) in classes {
                    let mut p = BigRational::one();
                    for (i, &c) in counts.iter().enumerate() {
                        if c > 0 {
                            p *= probs[i].pow(c as i32);
                        }
                    }
                    mass += p * BigRational::from(BigInt::from(words));
                }
                (key.clone(), mass)
            })
            .collect()
    }
}

fn pmf_value(mut masses: Vec<(String, BigRational)>, normalizer: &BigRational) -> LawValue {
    masses.retain(|(_, m)| !m.is_zero());
    LawValue::Pmf {
        entries: masses
            .into_iter()
            .map(|(k, m)| (k, (m / normalizer).to_string()))
            .collect(),
    }
}

/// Enumerate all q^n words and compute a statistic's exact law under P_n
/// and under L_n. Statistic values are computed with the brute-force
/// (suffix-scan) machinery, independent of the optimized paths.
pub fn exact_small_n(
    probs: &[BigRational],
    n: usize,
    statistic: SmallNStatistic,
    params: Option<&BlockParams>,
) -> Result<ExactLaw> {
    let q = probs.len();
    if q < 2 {
        return Err(Error::InvalidDistribution("need q >= 2 letters".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    if statistic == SmallNStatistic::RightFactor && n < 2 {
        return Err(Error::InvalidParameter(
            "right-factor statistic needs n >= 2".into(),
        ));
    }
    let words = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            words,
            budget: ENUMERATION_BUDGET,
        });
    }
    let total: BigRational = probs.iter().cloned().sum();
    if !total.is_one() {
        return Err(Error::InvalidDistribution(
            "probabilities must sum to exactly 1".into(),
        ));
    }

    // float view for good-word thresholds
    let float_dist = if statistic == SmallNStatistic::GoodFraction {
        let float_probs: Vec<f64> = probs
            .iter()
            .map(|p| p.to_f64().expect("probability fits in f64"))
            .collect();
        Some(LetterDistribution::finite(float_probs)?)
    } else {
        None
    };
    let params = match (statistic, params) {
        (SmallNStatistic::GoodFraction, None) => {
            return Err(Error::InvalidParameter(
                "good-fraction statistic needs block parameters".into(),
            ))
        }
        (_, p) => p,
    };

    let mut pn = Tally::new();
    let mut ln = Tally::new();
    let mut lyndon_mass_tally = Tally::new();

    let mut letters = vec![1u32; n];
    let mut counts = vec![0u16; q];
    counts[0] = n as u16;
    loop {
        let key = match statistic {
            SmallNStatistic::PrimitiveProb => {
                if is_primitive_slice(&letters) {
                    Some("primitive".to_string())
                } else {
                    None
                }
            }
            SmallNStatistic::RightFactor => {
                // smallest proper suffix: scan suffixes starting at 1..n
                let start = 1 + smallest_suffix_brute(&letters[1..]);
                Some(Ratio::new((n - start) as u64, n as u64).to_string())
            }
            SmallNStatistic::Rho => {
                let mut lens: Vec<usize> = brute_factor_lengths(&letters);
                lens.reverse(); // smallest factor first
                Some(
                    lens.iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                )
            }
            SmallNStatistic::GoodFraction => {
                let dist = float_dist.as_ref().expect("set above");
                let w = Word::from_ranks_unchecked(dist.alphabet(), letters.clone());
                let report = runs::is_good_word(&w, params.expect("validated"), dist);
                if report.is_good() {
                    Some("good".to_string())
                } else {
                    None
                }
            }
        };
        let lyndon = is_lyndon_slice(&letters);
        if lyndon {
            lyndon_mass_tally.add("lyndon".into(), &counts);
        }
        if let Some(key) = key {
            pn.add(key.clone(), &counts);
            if lyndon {
                ln.add(key, &counts);
            }
        }

        // odometer
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            let r = letters[pos] as usize;
            counts[r - 1] -= 1;
            if r < q {
                letters[pos] = r as u32 + 1;
                counts[r] += 1;
                break;
            }
            letters[pos] = 1;
            counts[0] += 1;
        }
        if pos == 0 && letters[0] == 1 && counts[0] == n as u16 {
            break;
        }
    }

    let one = BigRational::one();
    let lyndon_mass = lyndon_mass_tally
        .masses(probs)
        .into_iter()
        .map(|(_, m)| m)
        .fold(BigRational::zero(), |a, b| a + b);

    let scalar = |tally: &Tally, normalizer: &BigRational| -> LawValue {
        let mass = tally
            .masses(probs)
            .into_iter()
            .map(|(_, m)| m)
            .fold(BigRational::zero(), |a, b| a + b);
        LawValue::Scalar {
            value: (mass / normalizer).to_string(),
        }
    };

    let (under_pn, under_ln) = match statistic {
        SmallNStatistic::PrimitiveProb | SmallNStatistic::GoodFraction => {
            (scalar(&pn, &one), scalar(&ln, &lyndon_mass))
        }
        SmallNStatistic::RightFactor | SmallNStatistic::Rho => (
            pmf_value(pn.masses(probs), &one),
            pmf_value(ln.masses(probs), &lyndon_mass),
        ),
    };

    Ok(ExactLaw {
        n,
        statistic: format!("{statistic:?}"),
        under_pn,
        under_ln,
    })
}

/// Factor lengths (left to right) by repeatedly stripping the smallest
/// suffix; independent of Duval's algorithm.
fn brute_factor_lengths(s: &[u32]) -> Vec<usize> {
    let mut lens = Vec::new();
    let mut end = s.len();
    while end > 0 {
        let start = smallest_suffix_brute(&s[..end]);
        lens.push(end - start);
        end = start;
    }
    lens.reverse();
    lens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_probs() -> Vec<BigRational> {
        vec![
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
        ]
    }

    #[test]
    fn exact_primitive_prob_examples() {
        let law = exact_small_n(&half_probs(), 4, SmallNStatistic::PrimitiveProb, None).unwrap();
        match &law.under_pn {
            LawValue::Scalar { value } => assert_eq!(value, "3/4"),
            _ => panic!("expected scalar"),
        }
        match &law.under_ln {
            LawValue::Scalar { value } => assert_eq!(value, "1"),
            _ => panic!("expected scalar"),
        }
    }

    #[test]
    fn exact_right_factor_n3() {
        let law = exact_small_n(&half_probs(), 3, SmallNStatistic::RightFactor, None).unwrap();
        match &law.under_ln {
            LawValue::Pmf { entries } => {
                assert_eq!(
                    entries,
                    &vec![
                        ("1/3".to_string(), "1/2".to_string()),
                        ("2/3".to_string(), "1/2".to_string())
                    ]
                );
            }
            _ => panic!("expected pmf"),
        }
    }

    #[test]
    fn exact_rho_n1() {
        let law = exact_small_n(&half_probs(), 1, SmallNStatistic::Rho, None).unwrap();
        match &law.under_pn {
            LawValue::Pmf { entries } => {
                assert_eq!(entries, &vec![("1".to_string(), "1".to_string())]);
            }
            _ => panic!("expected pmf"),
        }
    }

    #[test]
    fn budget_guard() {
        let err = exact_small_n(&half_probs(), 24, SmallNStatistic::PrimitiveProb, None);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.5").unwrap().to_string(), "1/2");
        assert_eq!(parse_rational("0.3").unwrap().to_string(), "3/10");
        assert_eq!(parse_rational("3/10").unwrap().to_string(), "3/10");
        assert_eq!(parse_rational("1").unwrap().to_string(), "1");
        assert!(parse_rational("x").is_err());
        let probs = parse_spec_rational("json:[0.5,0.3,0.2]").unwrap();
        assert_eq!(probs[1].to_string(), "3/10");
        assert!(parse_spec_rational("json:[0.5,0.4]").is_err());
        assert!(parse_spec_rational("geometric:0.5").is_err());
    }

    #[test]
    fn experiment_config_validation() {
        assert!(ExperimentConfig::new(
            "right-factor",
            "uniform:2",
            vec![100],
            10,
            1,
            None,
            None,
            1
        )
        .is_ok());
        assert!(
            ExperimentConfig::new("x", "uniform:2", vec![], 10, 1, None, None, 1).is_err()
        );
        assert!(
            ExperimentConfig::new("x", "uniform:2", vec![10], 0, 1, None, None, 1).is_err()
        );
        assert!(
            ExperimentConfig::new("x", "uniform:2", vec![10], 10, 1, Some(0.7), None, 1)
                .is_err()
        );
        assert!(ExperimentConfig::new("x", "zipf:2", vec![10], 10, 1, None, None, 1).is_err());
    }

    #[test]
    fn right_factor_single_trial_is_degenerate_but_sound() {
        let cfg = ExperimentConfig::new(
            "right-factor",
            "uniform:2",
            vec![16],
            1,
            7,
            None,
            None,
            1,
        )
        .unwrap();
        let out = run_right_factor_experiment(&cfg).unwrap();
        assert_eq!(out.samples.len(), 1);
        let json = out.report.to_json();
        assert!(json.contains("atom_frequency"));
    }

    #[test]
    fn factor_lengths_n1_degenerate() {
        let cfg = ExperimentConfig::new(
            "factor-lengths",
            "uniform:2",
            vec![1],
            8,
            3,
            None,
            None,
            1,
        )
        .unwrap();
        let out = run_factor_lengths_experiment(&cfg).unwrap();
        assert_eq!(out.rho1_samples, vec![1.0; 8]);
        assert_eq!(out.largest_parts, vec![1.0; 8]);
    }

    #[test]
    fn trivial_sweep_marks_trend_insufficient() {
        let cfg = ExperimentConfig::new(
            "good-words",
            "uniform:2",
            vec![64],
            20,
            5,
            None,
            None,
            1,
        )
        .unwrap();
        let out = run_good_word_experiment(&cfg).unwrap();
        match &out.report.statistics {
            Statistics::GoodWords(s) => {
                assert_eq!(s.good_fraction_trend, "insufficient");
                assert_eq!(s.rows.len(), 1);
            }
            _ => panic!("wrong statistics kind"),
        }
    }
}
