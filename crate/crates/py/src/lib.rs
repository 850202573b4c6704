//! Python bindings: words in, plain Python values out. Words travel as text
//! (the same codec as the CLI: a-z letters, or comma-separated ranks).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lyndonlab_core::error::Error as CoreError;
use lyndonlab_core::experiments::{
    run_factor_lengths_experiment, run_good_word_experiment, run_right_factor_experiment,
    ExperimentConfig,
};
use lyndonlab_core::laws;
use lyndonlab_core::runs::{self, BlockMode, BlockParams};
use lyndonlab_core::sampling::{LyndonSampler, SamplerConfig, WordSampler};
use lyndonlab_core::{factorization, word, LetterDistribution, Word};

fn err(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_word(text: &str) -> PyResult<Word> {
    Word::parse(text, None).map_err(err)
}

fn parse_dist(spec: &str) -> PyResult<LetterDistribution> {
    LetterDistribution::parse_spec(spec).map_err(err)
}

/// Lexicographic comparison of two words: -1, 0 or 1.
#[pyfunction]
fn lex_compare(u: &str, v: &str) -> PyResult<i8> {
    let (u, v) = (parse_word(u)?, parse_word(v)?);
    // parsed words may infer different alphabet sizes; compare over a shared one
    let q = u
        .alphabet()
        .size()
        .unwrap_or(26)
        .max(v.alphabet().size().unwrap_or(26));
    let u = Word::from_ranks(word::Alphabet::Finite(q), u.letters().to_vec()).map_err(err)?;
    let v = Word::from_ranks(word::Alphabet::Finite(q), v.letters().to_vec()).map_err(err)?;
    Ok(match word::lex_compare(&u, &v).map_err(err)? {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    })
}

#[pyfunction]
fn rotate(w: &str, r: usize) -> PyResult<String> {
    Ok(word::rotate(&parse_word(w)?, r).map_err(err)?.to_text())
}

#[pyfunction]
fn is_primitive(w: &str) -> PyResult<bool> {
    word::is_primitive(&parse_word(w)?).map_err(err)
}

#[pyfunction]
fn is_lyndon(w: &str) -> PyResult<bool> {
    Ok(word::is_lyndon(&parse_word(w)?))
}

/// (shift, least rotation) of a primitive word.
#[pyfunction]
fn least_rotation(w: &str) -> PyResult<(usize, String)> {
    let (shift, rot) = word::least_rotation(&parse_word(w)?).map_err(err)?;
    Ok((shift, rot.to_text()))
}

/// Chen-Fox-Lyndon factors, left to right.
#[pyfunction]
fn factorize(w: &str) -> PyResult<Vec<String>> {
    let fact = factorization::duval_factorize(&parse_word(w)?).map_err(err)?;
    Ok(fact.factor_words().iter().map(|f| f.to_text()).collect())
}

/// Normalized factor lengths rho, smallest factor first.
#[pyfunction]
fn rho(w: &str) -> PyResult<Vec<f64>> {
    let fact = factorization::duval_factorize(&parse_word(w)?).map_err(err)?;
    Ok(factorization::rho_sequence(&fact).values_f64())
}

/// Standard factorization (u, v, r_n) of a Lyndon word.
#[pyfunction]
fn standard_right_factor(w: &str) -> PyResult<(String, String, f64)> {
    let f = factorization::standard_right_factor(&parse_word(w)?).map_err(err)?;
    Ok((f.u.to_text(), f.v.to_text(), f.r_f64()))
}

/// Sample `trials` words of length n under P_n.
#[pyfunction]
#[pyo3(signature = (dist, n, trials, seed, stream_id = 0))]
fn sample_words(dist: &str, n: usize, trials: u64, seed: u64, stream_id: u64) -> PyResult<Vec<String>> {
    let cfg = SamplerConfig::new(parse_dist(dist)?, n, seed)
        .map_err(err)?
        .with_stream(stream_id);
    let mut sampler = WordSampler::new(&cfg).map_err(err)?;
    Ok((0..trials).map(|_| sampler.next_word().to_text()).collect())
}

/// Sample `trials` Lyndon words of length n under L_n.
#[pyfunction]
#[pyo3(signature = (dist, n, trials, seed, stream_id = 0))]
fn sample_lyndon_words(
    dist: &str,
    n: usize,
    trials: u64,
    seed: u64,
    stream_id: u64,
) -> PyResult<Vec<String>> {
    let cfg = SamplerConfig::new(parse_dist(dist)?, n, seed)
        .map_err(err)?
        .with_stream(stream_id);
    let mut sampler = LyndonSampler::new(&cfg).map_err(err)?;
    Ok((0..trials).map(|_| sampler.next_lyndon().to_text()).collect())
}

/// P_n(primitive) for a distribution spec.
#[pyfunction]
fn primitive_probability(dist: &str, n: usize) -> PyResult<f64> {
    Ok(laws::primitive_probability(&parse_dist(dist)?, n))
}

/// Number of Lyndon words of length n over q letters.
#[pyfunction]
fn lyndon_count(q: u64, n: u64) -> PyResult<u128> {
    let count = laws::lyndon_count(q, n).map_err(err)?;
    u128::try_from(count)
        .map_err(|_| PyValueError::new_err("count exceeds u128; use smaller q or n"))
}

#[pyfunction]
fn mu_cdf(p1: f64, x: f64) -> PyResult<f64> {
    laws::mu_cdf(p1, x).map_err(err)
}

#[pyfunction]
fn mu_quantile(p1: f64, u: f64) -> PyResult<f64> {
    laws::mu_quantile(p1, u).map_err(err)
}

/// (fragments, chain) of the stickbreaking variant.
#[pyfunction]
fn stickbreak_variant(p1: f64, k: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = laws::sample_stickbreak_variant(p1, k, seed).map_err(err)?;
    Ok((s.fragments, s.chain))
}

/// Top-k parts of a PD(1) draw.
#[pyfunction]
fn pd1_sample(k: usize, seed: u64) -> PyResult<Vec<f64>> {
    Ok(laws::sample_pd1(k, seed).map_err(err)?.parts)
}

/// pmf of the record count of a uniform permutation of size k.
#[pyfunction]
fn records_pmf(k: usize) -> PyResult<Vec<f64>> {
    laws::records_pmf(k).map_err(err)
}

#[pyfunction]
fn wasserstein2(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    laws::wasserstein2_samples(&xs, &ys).map_err(err)
}

#[pyfunction]
fn count_low_records(seq: Vec<f64>) -> usize {
    runs::count_low_records(&seq)
}

/// Good-word check: (is_good, failing condition numbers, H_n).
#[pyfunction]
#[pyo3(signature = (w, dist, epsilon = None, alpha = None))]
fn good_word(
    w: &str,
    dist: &str,
    epsilon: Option<f64>,
    alpha: Option<f64>,
) -> PyResult<(bool, Vec<usize>, usize)> {
    let dist = parse_dist(dist)?;
    let word = Word::parse(w, Some(dist.alphabet())).map_err(err)?;
    let defaults = BlockParams::defaults(&dist);
    let params = BlockParams::new(
        epsilon.unwrap_or(defaults.epsilon),
        alpha.unwrap_or(defaults.alpha),
        &dist,
    )
    .map_err(err)?;
    let report = runs::is_good_word(&word, &params, &dist);
    Ok((report.is_good(), report.failing_conditions(), report.h()))
}

/// Block decomposition of a good word: list of (start, len, kind, rank).
#[pyfunction]
#[pyo3(signature = (w, dist, epsilon = None, alpha = None, lyndon_form = false))]
fn block_decompose(
    w: &str,
    dist: &str,
    epsilon: Option<f64>,
    alpha: Option<f64>,
    lyndon_form: bool,
) -> PyResult<Vec<(usize, usize, String, usize)>> {
    let dist = parse_dist(dist)?;
    let word = Word::parse(w, Some(dist.alphabet())).map_err(err)?;
    let defaults = BlockParams::defaults(&dist);
    let params = BlockParams::new(
        epsilon.unwrap_or(defaults.epsilon),
        alpha.unwrap_or(defaults.alpha),
        &dist,
    )
    .map_err(err)?;
    let mode = if lyndon_form {
        BlockMode::LyndonForm
    } else {
        BlockMode::GeneralForm
    };
    let dec = runs::block_decompose(&word, &params, &dist, mode).map_err(err)?;
    Ok(dec
        .blocks()
        .iter()
        .map(|b| {
            (
                b.span.start,
                b.span.len,
                format!("{:?}", b.kind),
                b.rank,
            )
        })
        .collect())
}

/// Run an experiment and return its JSON report as a string.
#[pyfunction]
#[pyo3(signature = (name, dist, n_values, trials, seed, epsilon = None, alpha = None, shards = 1))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    name: &str,
    dist: &str,
    n_values: Vec<usize>,
    trials: u64,
    seed: u64,
    epsilon: Option<f64>,
    alpha: Option<f64>,
    shards: u64,
) -> PyResult<String> {
    let cfg = ExperimentConfig::new(name, dist, n_values, trials, seed, epsilon, alpha, shards)
        .map_err(err)?;
    let report = match name {
        "right-factor" => run_right_factor_experiment(&cfg).map_err(err)?.report,
        "factor-lengths" => run_factor_lengths_experiment(&cfg).map_err(err)?.report,
        "good-words" => run_good_word_experiment(&cfg).map_err(err)?.report,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown experiment {other:?}"
            )))
        }
    };
    Ok(report.to_json())
}

#[pymodule]
fn lyndonlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(lex_compare, m)?)?;
    m.add_function(wrap_pyfunction!(rotate, m)?)?;
    m.add_function(wrap_pyfunction!(is_primitive, m)?)?;
    m.add_function(wrap_pyfunction!(is_lyndon, m)?)?;
    m.add_function(wrap_pyfunction!(least_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(standard_right_factor, m)?)?;
    m.add_function(wrap_pyfunction!(sample_words, m)?)?;
    m.add_function(wrap_pyfunction!(sample_lyndon_words, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_probability, m)?)?;
    m.add_function(wrap_pyfunction!(lyndon_count, m)?)?;
    m.add_function(wrap_pyfunction!(mu_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(mu_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(stickbreak_variant, m)?)?;
    m.add_function(wrap_pyfunction!(pd1_sample, m)?)?;
    m.add_function(wrap_pyfunction!(records_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(wasserstein2, m)?)?;
    m.add_function(wrap_pyfunction!(count_low_records, m)?)?;
    m.add_function(wrap_pyfunction!(good_word, m)?)?;
    m.add_function(wrap_pyfunction!(block_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
