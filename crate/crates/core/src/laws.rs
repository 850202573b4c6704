//! Exact formulas and reference distributions: Moebius-inversion
//! probabilities, the limit law mu of the standard right factor, the
//! stickbreaking variant, Poisson-Dirichlet(1), the record-count law, and
//! one-dimensional Wasserstein / KS / chi-square distances.

use num::bigint::{BigInt, BigUint};
use num::rational::{BigRational, Ratio};
use num::traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dist::LetterDistribution;
use crate::error::{Error, Result};
use crate::sampling::splitmix64;

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn mobius(mut n: u64) -> i32 {
    let mut primes = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// ||p||_a = (sum_i p_i^a)^{1/a}. Needs a >= 1 (convergent tail).
pub fn norm_alpha(dist: &LetterDistribution, a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(Error::OutOfRange(format!(
            "norm order a = {a} must be >= 1"
        )));
    }
    Ok(dist.power_sum(a).powf(1.0 / a))
}

/// P_n(primitive) = sum_{d | n} mu(d) ||p||_d^n, in floating point.
pub fn primitive_probability(dist: &LetterDistribution, n: usize) -> f64 {
    let n = n as u64;
    divisors(n)
        .into_iter()
        .map(|d| {
            let s = dist.power_sum(d as f64); // = ||p||_d^d
            mobius(d) as f64 * s.powf(n as f64 / d as f64)
        })
        .sum()
}

/// Exact rational form of `primitive_probability` for finite supports with
/// rational probabilities.
pub fn primitive_probability_rational(probs: &[BigRational], n: usize) -> Result<BigRational> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("no probabilities given".into()));
    }
    let total: BigRational = probs.iter().cloned().sum();
    if !total.is_one() {
        return Err(Error::InvalidDistribution(
            "probabilities must sum to exactly 1".into(),
        ));
    }
    let n = n as u64;
    let mut acc = BigRational::zero();
    for d in divisors(n) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        // sum_i p_i^d, then raised to n/d
        let power_sum: BigRational = probs.iter().map(|p| p.pow(d as i32)).sum();
        let term = power_sum.pow((n / d) as i32);
        if mu > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Number of Lyndon words of length n over q letters:
/// (1/n) sum_{d | n} mu(d) q^{n/d}.
pub fn lyndon_count(q: u64, n: u64) -> Result<BigUint> {
    if q < 2 {
        return Err(Error::OutOfRange(format!("alphabet size q = {q} must be >= 2")));
    }
    if n < 1 {
        return Err(Error::OutOfRange("length n must be >= 1".into()));
    }
    let mut acc = BigInt::zero();
    for d in divisors(n) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let term = BigInt::from(q).pow((n / d) as u32);
        if mu > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let (quot, rem) = num::Integer::div_rem(&acc, &BigInt::from(n));
    debug_assert!(rem.is_zero());
    quot.to_biguint()
        .ok_or_else(|| Error::OutOfRange("negative Lyndon count".into()))
}

/// Which endpoint carries the atom of the mu law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MuForm {
    /// mu(dx) = p1 delta_1(dx) + (1-p1) 1_[0,1)(x) dx  (standard right factor).
    AtomAtOne,
    /// mu(dx) = p1 delta_0(dx) + (1-p1) 1_(0,1](x) dx  (smallest factor length).
    AtomAtZero,
}

/// The limit law mu: an atom of mass p1 plus (1-p1) times Lebesgue on the
/// unit interval. p1 = 1 is allowed here (pure atom), unlike for letter
/// distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuLaw {
    pub p1: f64,
    pub form: MuForm,
}

impl MuLaw {
    pub fn new(p1: f64, form: MuForm) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::OutOfRange(format!("p1 = {p1} must lie in [0, 1]")));
        }
        Ok(MuLaw { p1, form })
    }

    pub fn right_factor(p1: f64) -> Result<Self> {
        Self::new(p1, MuForm::AtomAtOne)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(format!("x = {x} must lie in [0, 1]")));
        }
        Ok(match self.form {
            MuForm::AtomAtOne => {
                if x < 1.0 {
                    (1.0 - self.p1) * x
                } else {
                    1.0
                }
            }
            MuForm::AtomAtZero => self.p1 + (1.0 - self.p1) * x,
        })
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0 < u && u < 1.0) {
            return Err(Error::OutOfRange(format!("u = {u} must lie in (0, 1)")));
        }
        Ok(match self.form {
            MuForm::AtomAtOne => {
                if u < 1.0 - self.p1 {
                    u / (1.0 - self.p1)
                } else {
                    1.0
                }
            }
            MuForm::AtomAtZero => {
                if u <= self.p1 {
                    0.0
                } else {
                    (u - self.p1) / (1.0 - self.p1)
                }
            }
        })
    }

    /// k-th moment. For the atom-at-one form: p1 + (1-p1)/(k+1).
    pub fn moment(&self, k: u32) -> f64 {
        match self.form {
            MuForm::AtomAtOne => self.p1 + (1.0 - self.p1) / (k as f64 + 1.0),
            MuForm::AtomAtZero => (1.0 - self.p1) / (k as f64 + 1.0),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }
}

/// F(x) of the right-factor limit law.
pub fn mu_cdf(p1: f64, x: f64) -> Result<f64> {
    MuLaw::right_factor(p1)?.cdf(x)
}

/// Quantile of the right-factor limit law.
pub fn mu_quantile(p1: f64, u: f64) -> Result<f64> {
    MuLaw::right_factor(p1)?.quantile(u)
}

/// A realization of the stickbreaking variant.
#[derive(Debug, Clone, Serialize)]
pub struct StickbreakSample {
    /// Fragments rho_i = s_{i-1} - s_i (zero while the chain sits at 1).
    pub fragments: Vec<f64>,
    /// Chain states s_1, ..., s_k.
    pub chain: Vec<f64>,
}

fn uniform_open_closed(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// First k fragments and chain states of the stickbreaking variant: from
/// s = 1 the chain stays w.p. p1 (a zero fragment) else breaks uniformly;
/// from s < 1 the next state is uniform on (0, s].
pub fn sample_stickbreak_variant(p1: f64, k: usize, seed: u64) -> Result<StickbreakSample> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::OutOfRange(format!("p1 = {p1} must lie in [0, 1]")));
    }
    if k == 0 {
        return Err(Error::OutOfRange("need k >= 1 fragments".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut s = 1.0_f64;
    let mut at_one = true;
    let mut fragments = Vec::with_capacity(k);
    let mut chain = Vec::with_capacity(k);
    for _ in 0..k {
        let next = if at_one {
            if rng.random::<f64>() < p1 {
                1.0
            } else {
                at_one = false;
                uniform_open_closed(&mut rng)
            }
        } else {
            s * uniform_open_closed(&mut rng)
        };
        fragments.push(s - next);
        chain.push(next);
        s = next;
    }
    Ok(StickbreakSample { fragments, chain })
}

/// Truncation depth for Poisson-Dirichlet sampling; the leftover stick mass
/// after this many breaks is far below any tolerance used here.
pub const PD1_DEPTH: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct Pd1Sample {
    /// First k terms of the decreasing rearrangement (zero-padded if the
    /// truncated stick produced fewer).
    pub parts: Vec<f64>,
    /// Stick mass not broken off within the truncation depth.
    pub remainder: f64,
}

/// Approximate PD(1) top-k: pure stickbreaking (the p1 = 0 kernel) to depth
/// `PD1_DEPTH`, sorted nonincreasing. Breaking stops early once the leftover
/// mass falls below 1e-12; either way the remainder is reported.
pub fn sample_pd1(k: usize, seed: u64) -> Result<Pd1Sample> {
    if k == 0 {
        return Err(Error::OutOfRange("need k >= 1 parts".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut s = 1.0_f64;
    let mut fragments = Vec::with_capacity(64);
    for _ in 0..PD1_DEPTH {
        if s < 1e-12 {
            break;
        }
        let next = s * uniform_open_closed(&mut rng);
        fragments.push(s - next);
        s = next;
    }
    fragments.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    fragments.resize(fragments.len().max(k), 0.0);
    fragments.truncate(k);
    Ok(Pd1Sample {
        parts: fragments,
        remainder: s,
    })
}

/// H_k, the k-th harmonic number.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// pmf of the number of records of a uniform permutation of size k:
/// P(j records) = [k, j] / k! with unsigned Stirling numbers of the first
/// kind, computed exactly in big integers. Mean is H_k.
pub fn records_pmf(k: usize) -> Result<Vec<f64>> {
    if !(1..=64).contains(&k) {
        return Err(Error::OutOfRange(format!(
            "records_pmf supports 1 <= k <= 64, got {k}"
        )));
    }
    // row k of the unsigned Stirling-first-kind triangle:
    // c(n+1, j) = c(n, j-1) + n c(n, j)
    let mut prev = vec![BigUint::zero(), BigUint::one()]; // c(1, 0..=1)
    for n in 1..k {
        let mut next = vec![BigUint::zero(); n + 2];
        for j in 1..=n + 1 {
            next[j] = &prev[j - 1] + BigUint::from(n) * prev.get(j).unwrap_or(&BigUint::zero());
        }
        prev = next;
    }
    let factorial: BigUint = (1..=k as u64).map(BigUint::from).product();
    let pmf: Vec<f64> = prev[1..]
        .iter()
        .map(|c| {
            Ratio::new(BigInt::from(c.clone()), BigInt::from(factorial.clone()))
                .to_f64()
                .expect("stirling ratio fits in f64")
        })
        .collect();
    debug_assert_eq!(pmf.len(), k);
    Ok(pmf)
}

/// W_2 between two equal-size empirical samples: the sorted pairing is the
/// optimal one-dimensional coupling.
pub fn wasserstein2_samples(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::OutOfRange("need at least one sample".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let mean_sq: f64 = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64;
    Ok(mean_sq.sqrt())
}

/// Closed-form reference laws for sample-versus-law distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ReferenceLaw {
    Uniform01,
    Mu(MuLaw),
}

impl ReferenceLaw {
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            ReferenceLaw::Uniform01 => u,
            ReferenceLaw::Mu(law) => law.quantile(u).expect("u in (0,1)"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ReferenceLaw::Uniform01 => x.clamp(0.0, 1.0),
            ReferenceLaw::Mu(law) => law.cdf(x.clamp(0.0, 1.0)).expect("x in [0,1]"),
        }
    }
}

/// W_2 between an empirical sample and a law, by quantile coupling at the
/// midpoints (i - 1/2) / N. The estimator carries an O(1/N) bias.
pub fn wasserstein2_vs_law(xs: &[f64], law: &ReferenceLaw) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::OutOfRange("need at least one sample".into()));
    }
    let mut a = xs.to_vec();
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let n = a.len() as f64;
    let mean_sq: f64 = a
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let q = law.quantile((i as f64 + 0.5) / n);
            (x - q) * (x - q)
        })
        .sum::<f64>()
        / n;
    Ok(mean_sq.sqrt())
}

/// One-sample Kolmogorov-Smirnov statistic against a reference law.
pub fn ks_statistic_vs_law(xs: &[f64], law: &ReferenceLaw) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::OutOfRange("need at least one sample".into()));
    }
    let mut a = xs.to_vec();
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let n = a.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in a.iter().enumerate() {
        let f = law.cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    Ok(d)
}

/// Asymptotic p-value of a one-sample KS statistic at sample size n.
pub fn ks_p_value(statistic: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    kolmogorov_sf((sn + 0.12 + 0.11 / sn) * statistic)
}

fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsTwoSample {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS test with the asymptotic p-value.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KsTwoSample> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::OutOfRange("need nonempty samples".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < n && j < m {
        let x = a[i];
        let y = b[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsTwoSample {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn chi_square_p(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive df");
    1.0 - dist.cdf(statistic)
}

/// Goodness-of-fit chi-square of observed counts against expected
/// probabilities (no pooling; expected counts must be positive).
pub fn chi_square_gof(observed: &[u64], expected_probs: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected_probs.len() {
        return Err(Error::SizeMismatch {
            left: observed.len(),
            right: expected_probs.len(),
        });
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::OutOfRange("no observations".into()));
    }
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        if p <= 0.0 {
            return Err(Error::OutOfRange("expected probability must be positive".into()));
        }
        let e = p * total as f64;
        stat += (o as f64 - e) * (o as f64 - e) / e;
    }
    let df = observed.len() - 1;
    Ok(ChiSquareResult {
        statistic: stat,
        df,
        p_value: chi_square_p(stat, df),
    })
}

/// Two-sample chi-square homogeneity test on aligned count vectors. Bins are
/// pooled left to right until each pooled bin holds at least 5 combined
/// counts; a sparse tail is merged into the last bin.
pub fn chi_square_two_sample(xs: &[u64], ys: &[u64]) -> Result<ChiSquareResult> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n1: u64 = xs.iter().sum();
    let n2: u64 = ys.iter().sum();
    if n1 == 0 || n2 == 0 {
        return Err(Error::OutOfRange("both samples must be nonempty".into()));
    }
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut acc_a, mut acc_b) = (0.0_f64, 0.0_f64);
    for (&a, &b) in xs.iter().zip(ys) {
        acc_a += a as f64;
        acc_b += b as f64;
        if acc_a + acc_b >= 5.0 {
            pooled.push((acc_a, acc_b));
            acc_a = 0.0;
            acc_b = 0.0;
        }
    }
    if acc_a + acc_b > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc_a;
            last.1 += acc_b;
        } else {
            pooled.push((acc_a, acc_b));
        }
    }
    if pooled.len() < 2 {
        return Err(Error::OutOfRange(
            "need at least two pooled bins for a chi-square test".into(),
        ));
    }
    let k1 = (n2 as f64 / n1 as f64).sqrt();
    let k2 = (n1 as f64 / n2 as f64).sqrt();
    let stat: f64 = pooled
        .iter()
        .map(|&(a, b)| {
            let diff = k1 * a - k2 * b;
            diff * diff / (a + b)
        })
        .sum();
    let df = pooled.len() - 1;
    Ok(ChiSquareResult {
        statistic: stat,
        df,
        p_value: chi_square_p(stat, df),
    })
}

/// Depth used when comparing sequence samples under the weighted metric
/// d(u, v) = sum_k 2^{-k} |u_k - v_k| (truncation error <= 2^-64).
pub const SEQ_METRIC_DEPTH: usize = 64;

/// Distance between two equal-size samples of real sequences under the
/// weighted metric: coordinatewise sorted (quantile) coupling, combined as
/// sum_k 2^{-k} W_1(marginal_k). Sequences shorter than the depth are read
/// as zero-padded.
pub fn weighted_seq_distance(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::OutOfRange("need at least one sequence".into()));
    }
    let n = xs.len() as f64;
    let mut total = 0.0;
    for k in 0..SEQ_METRIC_DEPTH {
        let mut a: Vec<f64> = xs.iter().map(|s| s.get(k).copied().unwrap_or(0.0)).collect();
        let mut b: Vec<f64> = ys.iter().map(|s| s.get(k).copied().unwrap_or(0.0)).collect();
        a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        let w1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n;
        total += w1 * 0.5_f64.powi(k as i32 + 1);
    }
    Ok(total)
}

/// Outcome of a shuffled-interval simulation against the k-dimensional
/// uniform law.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LarcinCheck {
    /// sqrt(mean of sum_{j<=k} (U_j - a_j)^2) over the trials: the
    /// U-coupling estimate of W_2(a~_k, U_k).
    pub empirical_w2: f64,
    /// sqrt((k/3) sum_{i=1..l} x_i^2).
    pub bound: f64,
    /// Monte Carlo standard error of the W_2 estimate.
    pub std_error: f64,
    pub trials: u64,
}

/// Simulate the positions of the first k marked subintervals after a uniform
/// shuffle of interior widths (widths = x_0, x_1, .., x_l, x_{l+1}), and
/// estimate W_2 against the uniform law via the coupling
/// a_j = x_0 + sum_{U_i < U_j} x_i.
pub fn larcin_bound_check(
    widths: &[f64],
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<LarcinCheck> {
    if widths.len() < 3 {
        return Err(Error::InvalidParameter(
            "need widths x_0, x_1, .., x_l, x_{l+1} with l >= 1".into(),
        ));
    }
    if widths.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidParameter("widths must be nonnegative".into()));
    }
    let total: f64 = widths.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "widths must sum to 1, got {total}"
        )));
    }
    let l = widths.len() - 2;
    if !(1 <= k && k <= l) {
        return Err(Error::OutOfRange(format!("need 1 <= k <= l = {l}, got k = {k}")));
    }
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }

    let x0 = widths[0];
    let interior = &widths[1..=l];
    let bound = ((k as f64 / 3.0) * interior.iter().map(|x| x * x).sum::<f64>()).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut us = vec![0.0_f64; l];
    let mut sum_t = 0.0_f64;
    let mut sum_t2 = 0.0_f64;
    for _ in 0..trials {
        for u in us.iter_mut() {
            *u = rng.random::<f64>();
        }
        let mut t = 0.0;
        for j in 0..k {
            let uj = us[j];
            let mut aj = x0;
            for (i, &ui) in us.iter().enumerate() {
                if i != j && ui < uj {
                    aj += interior[i];
                }
            }
            t += (uj - aj) * (uj - aj);
        }
        sum_t += t;
        sum_t2 += t * t;
    }
    let mean_t = sum_t / trials as f64;
    let var_t = (sum_t2 / trials as f64 - mean_t * mean_t).max(0.0);
    let se_mean = (var_t / trials as f64).sqrt();
    let empirical_w2 = mean_t.sqrt();
    let std_error = if empirical_w2 > 0.0 {
        se_mean / (2.0 * empirical_w2)
    } else {
        0.0
    };
    Ok(LarcinCheck {
        empirical_w2,
        bound,
        std_error,
        trials,
    })
}

/// Law spec grammar used on the CLI: `uniform01`, `mu:p1=<v>` or `pd1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawSpec {
    Uniform01,
    Mu(f64),
    Pd1,
}

pub fn parse_law_spec(spec: &str) -> Result<LawSpec> {
    let spec = spec.trim();
    match spec {
        "uniform01" => Ok(LawSpec::Uniform01),
        "pd1" => Ok(LawSpec::Pd1),
        _ => {
            if let Some(rest) = spec.strip_prefix("mu:p1=") {
                let p1: f64 = rest.parse().map_err(|_| {
                    Error::InvalidParameter(format!("bad mu law p1 value {rest:?}"))
                })?;
                MuLaw::right_factor(p1)?;
                Ok(LawSpec::Mu(p1))
            } else {
                Err(Error::InvalidParameter(format!(
                    "unknown law spec {spec:?} (expected uniform01, mu:p1=<v> or pd1)"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u2() -> LetterDistribution {
        LetterDistribution::uniform(2).unwrap()
    }

    fn big_ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn norm_alpha_examples() {
        assert!((norm_alpha(&u2(), 2.0).unwrap() - 0.7071067811865476).abs() < 1e-12);
        assert!((norm_alpha(&u2(), 1.0).unwrap() - 1.0).abs() < 1e-12);
        let d = LetterDistribution::finite(vec![0.5, 0.3, 0.2]).unwrap();
        assert!((norm_alpha(&d, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((norm_alpha(&d, 2.0).unwrap() - 0.38f64.sqrt()).abs() < 1e-12);
        let g = LetterDistribution::geometric(0.5).unwrap();
        assert!((norm_alpha(&g, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(norm_alpha(&g, 0.5).is_err());
    }

    #[test]
    fn norm_alpha_strictly_decreasing() {
        let d = LetterDistribution::finite(vec![0.5, 0.3, 0.2]).unwrap();
        let mut prev = f64::INFINITY;
        for a in [1.0, 1.5, 2.0, 3.0, 8.0] {
            let v = norm_alpha(&d, a).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn primitive_probability_examples() {
        let half = vec![big_ratio(1, 2), big_ratio(1, 2)];
        assert_eq!(
            primitive_probability_rational(&half, 4).unwrap(),
            big_ratio(3, 4)
        );
        assert_eq!(
            primitive_probability_rational(&half, 2).unwrap(),
            big_ratio(1, 2)
        );
        assert_eq!(
            primitive_probability_rational(&half, 1).unwrap(),
            big_ratio(1, 1)
        );
        // prime n: 1 - ||p||_{d1}^n with d1 the smallest nontrivial divisor
        assert_eq!(
            primitive_probability_rational(&half, 7).unwrap(),
            big_ratio(63, 64)
        );
        assert!((primitive_probability(&u2(), 4) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn lyndon_count_examples() {
        assert_eq!(lyndon_count(2, 4).unwrap(), BigUint::from(3u32));
        assert_eq!(lyndon_count(2, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(lyndon_count(2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(lyndon_count(2, 10).unwrap(), BigUint::from(99u32));
        assert!(lyndon_count(1, 3).is_err());
    }

    #[test]
    fn mu_law_examples() {
        assert!((mu_quantile(0.5, 0.25).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(mu_quantile(0.5, 0.75).unwrap(), 1.0);
        assert!((mu_cdf(1.0 / 3.0, 0.6).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(mu_quantile(1.0, 0.99).unwrap(), 1.0);
        assert!(mu_cdf(0.5, 1.5).is_err());
        assert!(mu_quantile(0.5, 0.0).is_err());

        let law = MuLaw::right_factor(0.5).unwrap();
        assert!((law.mean() - 0.75).abs() < 1e-12);
        assert!((law.moment(2) - (0.5 + 0.5 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn stickbreak_variant_kernel() {
        // p1 = 0: no zero fragments, chain strictly decreasing
        let s = sample_stickbreak_variant(0.0, 32, 7).unwrap();
        assert!(s.fragments.iter().all(|&f| f > 0.0));
        for pair in s.chain.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        // fragments sum to 1 - s_k, which is at most 1
        let total: f64 = s.fragments.iter().sum();
        assert!((total - (1.0 - s.chain.last().unwrap())).abs() < 1e-12);
        assert!(total <= 1.0);

        // chain states stay in (0, 1]
        let s = sample_stickbreak_variant(0.3, 64, 9).unwrap();
        assert!(s.chain.iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn pd1_sample_shape() {
        let s = sample_pd1(50, 3).unwrap();
        assert_eq!(s.parts.len(), 50);
        for pair in s.parts.windows(2) {
            assert!(pair[0] >= pair[1]);
        }
        let total: f64 = s.parts.iter().sum();
        assert!(total <= 1.0 + 1e-12);
        assert!(s.remainder < 1e-9);
    }

    #[test]
    fn records_pmf_examples() {
        assert_eq!(records_pmf(1).unwrap(), vec![1.0]);
        let p3 = records_pmf(3).unwrap();
        assert!((p3[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((p3[1] - 0.5).abs() < 1e-12);
        assert!((p3[2] - 1.0 / 6.0).abs() < 1e-12);
        // mean at k = 4 is H_4 = 25/12
        let p4 = records_pmf(4).unwrap();
        let mean: f64 = p4.iter().enumerate().map(|(j, p)| (j + 1) as f64 * p).sum();
        assert!((mean - 25.0 / 12.0).abs() < 1e-12);
        assert!((mean - harmonic(4)).abs() < 1e-12);
        assert!(records_pmf(0).is_err());
        assert!(records_pmf(65).is_err());
    }

    #[test]
    fn wasserstein_examples() {
        let xs = [0.1, 0.5, 0.9];
        assert_eq!(wasserstein2_samples(&xs, &xs).unwrap(), 0.0);
        assert_eq!(wasserstein2_samples(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(wasserstein2_samples(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(wasserstein2_samples(&[0.0], &[1.0, 2.0]).is_err());

        // exact uniform grid at midpoints: estimator hits zero
        let n = 100;
        let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let w = wasserstein2_vs_law(&grid, &ReferenceLaw::Uniform01).unwrap();
        assert!(w <= 1.0 / (2.0 * n as f64));

        // all mass at the atom of a pure-atom law
        let ones = vec![1.0; 32];
        let law = ReferenceLaw::Mu(MuLaw::right_factor(1.0).unwrap());
        assert_eq!(wasserstein2_vs_law(&ones, &law).unwrap(), 0.0);
    }

    #[test]
    fn ks_statistics_behave() {
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic_vs_law(&grid, &ReferenceLaw::Uniform01).unwrap();
        assert!(d <= 0.001 + 1e-9);

        let shifted: Vec<f64> = grid.iter().map(|x| x * 0.5).collect();
        let d = ks_statistic_vs_law(&shifted, &ReferenceLaw::Uniform01).unwrap();
        assert!(d > 0.4);

        let two = ks_two_sample(&grid, &shifted).unwrap();
        assert!(two.p_value < 1e-6);
        let same = ks_two_sample(&grid, &grid).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert!(same.p_value > 0.999);
    }

    #[test]
    fn chi_square_smoke() {
        let r = chi_square_gof(&[250, 250, 250, 250], &[0.25; 4]).unwrap();
        assert_eq!(r.df, 3);
        assert!(r.p_value > 0.999);

        let r = chi_square_two_sample(&[500, 500], &[500, 500]).unwrap();
        assert!(r.p_value > 0.999);
        let r = chi_square_two_sample(&[900, 100], &[100, 900]).unwrap();
        assert!(r.p_value < 1e-9);
    }

    #[test]
    fn larcin_closed_form_case() {
        // l = 1, widths (0, 1, 0): a_1 = 0 always, so W_2(a_1, U_1) = 1/sqrt(3)
        let check = larcin_bound_check(&[0.0, 1.0, 0.0], 1, 10_000, 42).unwrap();
        let third = 1.0 / 3.0_f64.sqrt();
        assert!((check.bound - third).abs() < 1e-12);
        assert!((check.empirical_w2 - third).abs() < 0.01);
    }

    #[test]
    fn larcin_equal_widths_shrink() {
        // equal interior widths 1/m: bound sqrt(k/(3m)) -> 0
        let m = 400;
        let mut widths = vec![1.0 / m as f64; m];
        widths.insert(0, 0.0);
        widths.push(0.0);
        let check = larcin_bound_check(&widths, 1, 4_000, 7).unwrap();
        assert!(check.bound < 0.03);
        assert!(check.empirical_w2 <= check.bound + 3.0 * check.std_error);
    }

    #[test]
    fn law_spec_grammar() {
        assert_eq!(parse_law_spec("uniform01").unwrap(), LawSpec::Uniform01);
        assert_eq!(parse_law_spec("mu:p1=0.5").unwrap(), LawSpec::Mu(0.5));
        assert_eq!(parse_law_spec("pd1").unwrap(), LawSpec::Pd1);
        assert!(parse_law_spec("normal").is_err());
        assert!(parse_law_spec("mu:p1=2").is_err());
    }

    #[test]
    fn weighted_seq_distance_basics() {
        let xs = vec![vec![1.0, 0.5], vec![0.8, 0.4]];
        assert_eq!(weighted_seq_distance(&xs, &xs).unwrap(), 0.0);
        let ys = vec![vec![0.0, 0.5], vec![0.0, 0.4]];
        let d = weighted_seq_distance(&xs, &ys).unwrap();
        // only the first coordinate differs: (|1-0| + |0.8-0|)/2 * 1/2
        assert!((d - 0.45).abs() < 1e-12);
    }
}
