//! Bayesian Skip-Gram word embeddings.
//!
//! Instead of a point vector, every word gets a Gaussian posterior: a mean
//! and a diagonal covariance for its target role (u) and its context role
//! (v). Training runs Variational Bayes coordinate ascent on the skip-gram
//! negative-sampling objective: each iteration samples positive pairs from
//! sliding windows (after frequent-word subsampling) plus unigram^(3/4)
//! noise negatives, tightens a quadratic bound on log σ(uᵀv) per pair, and
//! updates whole factor banks in closed form through their natural
//! parameters, blending against the previous iteration with a Robbins-Monro
//! step size. The posterior variances then power density-aware similarity:
//! dot-product confidence, approximate link probability, and symmetric KL.
//!
//! # Start with the examples
//!
//! The `examples/` directory is the front door; each one is runnable with
//! `cargo run --example <name>`:
//!
//! - `train_and_query`: train on a toy corpus, print nearest neighbors.
//! - `density_similarity`: the three density measures side by side, and
//!   what the confidence column means.
//! - `elbo_trace`: watch the bound increase monotonically under a frozen
//!   batch (pure coordinate ascent).
//! - `checkpoint_roundtrip`: save, reload, resume training bit-exactly.
//! - `export_embeddings`: word2vec-style text export and re-import.
//! - `evaluate`: word-similarity (Spearman) and analogy benchmarks on
//!   bundled toy datasets.
//! - `seed_sweep`: the mean-and-deviation protocol over several seeds.
//!
//! A minimal end-to-end run:
//!
//! ```
//! use bsg::{train, HyperParams, TrainOptions};
//! use bsg::similarity::{nearest_neighbors, Measure, Representation};
//!
//! let text = "cold ice snow winter\nhot sun summer beach\nice cold winter\nsun hot beach\n";
//! let sentences = bsg::corpus::read_sentences(text.as_bytes(), true).unwrap();
//! let hyper = HyperParams {
//!     dim: 8,
//!     max_iterations: 12,
//!     warmup_iterations: 3,
//!     subsample_threshold: 1.0, // tiny corpus: keep every token
//!     vocab_size: 100,
//!     ..HyperParams::default()
//! };
//! let options = TrainOptions { seed: 7, lowercased: true, ..TrainOptions::default() };
//! let model = train(&sentences, hyper, options).unwrap();
//! let hits = nearest_neighbors(&model, "ice", 3, Measure::Cosine, Representation::U).unwrap();
//! assert_eq!(hits.len(), 3);
//! ```
//!
//! The `bsg` binary wraps the same library surface as subcommands: `train`,
//! `similar`, `analogy`, `eval-sim`, `eval-analogy`, `export`, `info`.
//!
//! # Determinism
//!
//! A run is a pure function of (seed, hyperparameters, corpus bytes): batch
//! sampling derives one counter-based RNG stream per sentence and per
//! target word, so results are identical for any `--workers` value, and
//! checkpoints resume bit-exactly.

pub mod checkpoint;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod export;
pub mod rng;
pub mod similarity;
pub mod trainer;
pub mod vb;

pub use error::{Error, Result};
pub use trainer::{train, Model, TrainOptions, Trainer};
pub use vb::{GaussianFactor, HyperParams};
