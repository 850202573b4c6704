//! `lyndonlab`: factorize words, inspect run/block structure, sample random
//! (Lyndon) words, query exact small-n laws, compute Wasserstein distances
//! and run the limit-law experiments.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when an exact
//! enumeration exceeds its budget.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lyndonlab_core::error::Error as CoreError;
use lyndonlab_core::experiments::{
    exact_small_n, parse_spec_rational, run_factor_lengths_experiment,
    run_good_word_experiment, run_right_factor_experiment, ExperimentConfig, ExperimentReport,
    SmallNStatistic,
};
use lyndonlab_core::laws::{
    parse_law_spec, sample_pd1, wasserstein2_samples, wasserstein2_vs_law, LawSpec, MuLaw,
    ReferenceLaw,
};
use lyndonlab_core::runs::{self, BlockMode, BlockParams};
use lyndonlab_core::sampling::{derive_shard_seed, LyndonSampler, SamplerConfig, WordSampler};
use lyndonlab_core::{LetterDistribution, Word};

#[derive(Parser)]
#[command(name = "lyndonlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chen-Fox-Lyndon factorization of a word, with rho and the standard
    /// right factor when defined.
    Factorize {
        /// Word text: a-z letters, or comma-separated integer ranks.
        word: String,
    },
    /// Run statistics, long runs, long blocks and the good-word conditions.
    Blocks {
        word: String,
        #[arg(long, default_value = "uniform:2")]
        dist: String,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Sample words under P_n (or Lyndon words under L_n with --lyndon).
    Sample {
        #[arg(long, default_value = "uniform:2")]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream_id: u64,
        /// Sample from L_n instead of P_n.
        #[arg(long)]
        lyndon: bool,
    },
    /// Exact law of a statistic by exhaustive enumeration (budget q^n <= 1e7).
    Exact {
        #[arg(long)]
        statistic: String,
        #[arg(long, default_value = "uniform:2")]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// W_2 distance between a sample file and another sample or a law.
    Wasserstein {
        /// Sample file, one float per line.
        #[arg(long)]
        xs: PathBuf,
        /// Second sample file.
        #[arg(long)]
        ys: Option<PathBuf>,
        /// Reference law: uniform01, mu:p1=<v> or pd1.
        #[arg(long)]
        law: Option<String>,
        /// Seed for the pd1 reference sample.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a Monte Carlo experiment and emit its JSON report.
    Experiment {
        /// right-factor | factor-lengths | good-words
        name: String,
        #[command(flatten)]
        opts: ExperimentOpts,
    },
}

#[derive(Args)]
struct ExperimentOpts {
    #[arg(long, default_value = "uniform:2")]
    dist: String,
    /// Word length, or a comma-separated sweep for good-words.
    #[arg(long)]
    n: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1)]
    shards: u64,
    /// Report path; stdout when omitted. Histogram CSVs land next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &CoreError) -> u8 {
    match err {
        CoreError::BudgetExceeded { .. } => 3,
        _ => 2,
    }
}

fn io_err(e: std::io::Error) -> CoreError {
    CoreError::InvalidParameter(format!("io: {e}"))
}

fn run(cli: Cli) -> Result<(), CoreError> {
    match cli.command {
        Command::Factorize { word } => {
            let w = Word::parse(&word, None)?;
            println!("{}", serde_json::to_string_pretty(&factorize_json(&w)?).unwrap());
        }
        Command::Blocks {
            word,
            dist,
            epsilon,
            alpha,
        } => {
            let dist = LetterDistribution::parse_spec(&dist)?;
            let w = Word::parse(&word, Some(dist.alphabet()))?;
            let params = block_params(&dist, epsilon, alpha)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&blocks_json(&w, &params, &dist)).unwrap()
            );
        }
        Command::Sample {
            dist,
            n,
            trials,
            seed,
            stream_id,
            lyndon,
        } => {
            let dist = LetterDistribution::parse_spec(&dist)?;
            let cfg = SamplerConfig::new(dist, n, seed)?.with_stream(stream_id);
            let mut words = Vec::with_capacity(trials as usize);
            let stats = if lyndon {
                let mut sampler = LyndonSampler::new(&cfg)?;
                for _ in 0..trials {
                    words.push(sampler.next_lyndon().to_text());
                }
                Some(sampler.stats)
            } else {
                let mut sampler = WordSampler::new(&cfg)?;
                for _ in 0..trials {
                    words.push(sampler.next_word().to_text());
                }
                None
            };
            let mut out = json!({
                "n": n,
                "seed": seed,
                "stream_id": stream_id,
                "lyndon": lyndon,
                "words": words,
            });
            if let Some(s) = stats {
                out["rejections"] = json!(s.rejections);
                out["accepted"] = json!(s.accepted);
            }
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Command::Exact {
            statistic,
            dist,
            n,
            epsilon,
            alpha,
        } => {
            let stat = SmallNStatistic::parse(&statistic)?;
            let probs = parse_spec_rational(&dist)?;
            let params = if stat == SmallNStatistic::GoodFraction {
                let float_dist = LetterDistribution::parse_spec(&dist)?;
                Some(block_params(&float_dist, epsilon, alpha)?)
            } else {
                None
            };
            let law = exact_small_n(&probs, n, stat, params.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&law).unwrap());
        }
        Command::Wasserstein { xs, ys, law, seed } => {
            let xs = read_samples(&xs)?;
            let value = match (ys, law) {
                (Some(path), None) => {
                    let ys = read_samples(&path)?;
                    json!({"w2": wasserstein2_samples(&xs, &ys)?, "against": "samples"})
                }
                (None, Some(spec)) => match parse_law_spec(&spec)? {
                    LawSpec::Uniform01 => json!({
                        "w2": wasserstein2_vs_law(&xs, &ReferenceLaw::Uniform01)?,
                        "against": spec,
                    }),
                    LawSpec::Mu(p1) => json!({
                        "w2": wasserstein2_vs_law(
                            &xs,
                            &ReferenceLaw::Mu(MuLaw::right_factor(p1)?),
                        )?,
                        "against": spec,
                    }),
                    LawSpec::Pd1 => {
                        // no closed-form quantile: couple against a seeded
                        // reference sample of largest parts
                        let reference: Vec<f64> = (0..xs.len() as u64)
                            .map(|i| {
                                sample_pd1(1, derive_shard_seed(seed, i)).map(|s| s.parts[0])
                            })
                            .collect::<Result<_, _>>()?;
                        json!({
                            "w2": wasserstein2_samples(&xs, &reference)?,
                            "against": spec,
                            "reference_samples": xs.len(),
                            "seed": seed,
                        })
                    }
                },
                _ => {
                    return Err(CoreError::InvalidParameter(
                        "give exactly one of --ys or --law".into(),
                    ))
                }
            };
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        Command::Experiment { name, opts } => {
            let n_values: Vec<usize> = opts
                .n
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|_| {
                        CoreError::InvalidParameter(format!("bad n value {tok:?}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            let cfg = ExperimentConfig::new(
                name.clone(),
                opts.dist,
                n_values,
                opts.trials,
                opts.seed,
                opts.epsilon,
                opts.alpha,
                opts.shards,
            )?;
            let report = match name.as_str() {
                "right-factor" => run_right_factor_experiment(&cfg)?.report,
                "factor-lengths" => run_factor_lengths_experiment(&cfg)?.report,
                "good-words" => run_good_word_experiment(&cfg)?.report,
                other => {
                    return Err(CoreError::InvalidParameter(format!(
                        "unknown experiment {other:?} (expected right-factor, factor-lengths or good-words)"
                    )))
                }
            };
            emit_report(&report, opts.out.as_deref())?;
        }
    }
    Ok(())
}

fn block_params(
    dist: &LetterDistribution,
    epsilon: Option<f64>,
    alpha: Option<f64>,
) -> Result<BlockParams, CoreError> {
    let defaults = BlockParams::defaults(dist);
    BlockParams::new(
        epsilon.unwrap_or(defaults.epsilon),
        alpha.unwrap_or(defaults.alpha),
        dist,
    )
}

fn factorize_json(w: &Word) -> Result<Value, CoreError> {
    let fact = lyndonlab_core::factorization::duval_factorize(w)?;
    let rho = lyndonlab_core::factorization::rho_sequence(&fact);
    let n = w.len();
    let factors: Vec<String> = fact.factor_words().iter().map(|f| f.to_text()).collect();
    let rho_strings: Vec<String> = rho
        .lengths()
        .iter()
        .map(|len| format!("{len}/{n}"))
        .collect();
    let right_factor = if n >= 2 && lyndonlab_core::word::is_lyndon(w) {
        let f = lyndonlab_core::factorization::standard_right_factor(w)?;
        json!({
            "u": f.u.to_text(),
            "v": f.v.to_text(),
            "r": format!("{}/{}", f.right_len(), n),
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "word": w.to_text(),
        "n": n,
        "factors": factors,
        "rho": rho_strings,
        "right_factor": right_factor,
    }))
}

fn blocks_json(w: &Word, params: &BlockParams, dist: &LetterDistribution) -> Value {
    let stats = runs::run_stats(w);
    let report = runs::is_good_word(w, params, dist);
    let decomposition = if report.is_good() {
        match runs::block_decompose(w, params, dist, BlockMode::GeneralForm) {
            Ok(dec) => {
                let blocks: Vec<Value> = dec
                    .blocks()
                    .iter()
                    .map(|b| {
                        json!({
                            "start": b.span.start,
                            "len": b.span.len,
                            "kind": b.kind,
                            "rank": b.rank,
                            "text": dec.word().factor(b.span).to_text(),
                        })
                    })
                    .collect();
                json!({
                    "prefix_len": dec.prefix_len,
                    "suffix_len": dec.suffix_len,
                    "h": dec.h(),
                    "k": dec.k(),
                    "blocks": blocks,
                    "j_indices": dec.j_indices(),
                    "d_values": dec.d_values(),
                })
            }
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    json!({
        "word": w.to_text(),
        "run_stats": stats,
        "good_word": report,
        "is_good": report.is_good(),
        "decomposition": decomposition,
    })
}

fn read_samples(path: &Path) -> Result<Vec<f64>, CoreError> {
    let text = fs::read_to_string(path).map_err(io_err)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(line.parse::<f64>().map_err(|_| {
            CoreError::InvalidParameter(format!(
                "{}:{}: bad float {line:?}",
                path.display(),
                lineno + 1
            ))
        })?);
    }
    if out.is_empty() {
        return Err(CoreError::InvalidParameter(format!(
            "{}: no samples",
            path.display()
        )));
    }
    Ok(out)
}

fn emit_report(report: &ExperimentReport, out: Option<&Path>) -> Result<(), CoreError> {
    let json = report.to_json();
    match out {
        None => println!("{json}"),
        Some(path) => {
            fs::write(path, &json).map_err(io_err)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "report".into());
            let dir = path.parent().unwrap_or(Path::new("."));
            for (name, csv) in report.histograms_csv() {
                let csv_path = dir.join(format!("{stem}.{name}.csv"));
                fs::write(&csv_path, csv).map_err(io_err)?;
            }
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}
