//! Lyndon factorization of random words.
//!
//! Words over an ordered alphabet, their Chen-Fox-Lyndon factorization and
//! standard right factor, run/block decompositions, seeded samplers for
//! random words and random Lyndon words, exact small-n oracles, reference
//! limit laws (stickbreaking variant, Poisson-Dirichlet(1), record counts)
//! and the Monte Carlo experiment harness that compares the two.

pub mod error;
pub mod word;
pub mod dist;
pub mod factorization;
pub mod runs;
pub mod sampling;
pub mod laws;
pub mod experiments;

pub use error::{Error, Result};
pub use word::{Alphabet, Span, Word};
pub use dist::LetterDistribution;
pub use factorization::{Factorization, RhoSequence, StandardFactorization};
pub use runs::{BlockDecomposition, BlockKind, BlockMode, BlockParams, GoodWordReport, RunStats};
pub use sampling::{LyndonSampleStats, SamplerConfig};
