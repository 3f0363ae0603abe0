//! The training loop: factor initialization, per-iteration batch sampling,
//! alternating parallel block updates with stochastic blending, and the
//! stopping rule.
//!
//! Iterations are indexed k = 1−κ .. K−κ. For k ≤ 0 (warm-up) updates fully
//! replace the previous natural parameters; afterwards they are blended with
//! weight β = k^(−γ). Within an iteration the whole u bank updates against a
//! frozen v bank, then the v bank updates against the fresh u bank; both
//! blend against snapshots taken at the start of the iteration.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use log::info;
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::corpus::{self, NoiseSampler, TrainingBatch, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::{self, PHASE_INIT};
use crate::vb::{self, GaussianFactor, HyperParams};

/// A trained (or in-progress) model: the vocabulary plus target-side and
/// context-side factor banks.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub vocab: Vocabulary,
    pub u_bank: Vec<GaussianFactor>,
    pub v_bank: Vec<GaussianFactor>,
    pub hyper: HyperParams,
    pub iterations_run: usize,
    pub converged: bool,
    pub rng_seed: u64,
}

impl Model {
    pub fn dim(&self) -> usize {
        self.hyper.dim
    }
}

/// Run settings that are not model hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub seed: u64,
    /// Worker threads; 0 uses the process-global pool.
    pub workers: usize,
    /// Marks the corpus as lowercase-folded so later queries fold the same way.
    pub lowercased: bool,
    /// Reuse the first iteration's batch for the whole run: pure coordinate
    /// ascent on a fixed objective. Lifts the K > κ requirement.
    pub freeze_batch: bool,
    /// Record the elbo before the first half-iteration and after every
    /// half-iteration. Diagnostic; meaningful with freeze_batch.
    pub track_elbo: bool,
    /// Write a checkpoint to the path every n completed iterations.
    pub checkpoint: Option<(PathBuf, usize)>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            seed: 42,
            workers: 0,
            lowercased: false,
            freeze_batch: false,
            track_elbo: false,
            checkpoint: None,
        }
    }
}

enum Side {
    U,
    V,
}

/// Incremental training driver; owns the model and the encoded corpus.
pub struct Trainer {
    model: Model,
    sentences: Vec<Vec<u32>>,
    noise: NoiseSampler,
    options: TrainOptions,
    pool: Option<rayon::ThreadPool>,
    frozen: Option<Arc<TrainingBatch>>,
    elbo_trace: Vec<f64>,
    skipped_negatives: u64,
}

impl Trainer {
    /// Build vocabulary, noise distribution, and freshly initialized banks.
    pub fn new(
        sentences: &[Vec<String>],
        hyper: HyperParams,
        options: TrainOptions,
    ) -> Result<Trainer> {
        hyper.validate()?;
        let vocab = Vocabulary::build(sentences, hyper.vocab_size, options.lowercased)?;
        let encoded = vocab.encode(sentences);
        let noise = NoiseSampler::new(&vocab);
        let mut init_rng = rng::stream(options.seed, 0, PHASE_INIT, 0);
        let u_bank = init_factors(vocab.len(), hyper.dim, &mut init_rng);
        let v_bank = init_factors(vocab.len(), hyper.dim, &mut init_rng);
        let pool = build_pool(options.workers)?;
        Ok(Trainer {
            model: Model {
                vocab,
                u_bank,
                v_bank,
                hyper,
                iterations_run: 0,
                converged: false,
                rng_seed: options.seed,
            },
            sentences: encoded,
            noise,
            options,
            pool,
            frozen: None,
            elbo_trace: Vec::new(),
            skipped_negatives: 0,
        })
    }

    /// Continue training a checkpointed model on a corpus. The stored seed
    /// and case-folding setting override whatever the options say, so the
    /// continuation is bit-identical to a run that never stopped.
    pub fn resume(model: Model, sentences: &[Vec<String>], mut options: TrainOptions) -> Result<Trainer> {
        model.hyper.validate()?;
        options.seed = model.rng_seed;
        options.lowercased = model.vocab.lowercased;
        let sentences = model.vocab.encode(sentences);
        let noise = NoiseSampler::new(&model.vocab);
        let pool = build_pool(options.workers)?;
        Ok(Trainer {
            model,
            sentences,
            noise,
            options,
            pool,
            frozen: None,
            elbo_trace: Vec::new(),
            skipped_negatives: 0,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn into_model(self) -> Model {
        self.model
    }

    /// Elbo values recorded when the track_elbo option is set: the initial
    /// state followed by one value per half-iteration.
    pub fn elbo_trace(&self) -> &[f64] {
        &self.elbo_trace
    }

    /// Negative draws abandoned after the rejection cap, over the whole run.
    pub fn skipped_negatives(&self) -> u64 {
        self.skipped_negatives
    }

    /// Run iterations until the stopping rule fires or k reaches K−κ.
    pub fn run(&mut self) -> Result<()> {
        let hyper = self.model.hyper.clone();
        let kappa = hyper.warmup_iterations as i64;
        let last_k = hyper.max_iterations as i64 - kappa;
        if !self.options.freeze_batch && last_k < 1 {
            return Err(Error::NoEffectiveIterations {
                max_iterations: hyper.max_iterations,
                warmup_iterations: hyper.warmup_iterations,
            });
        }
        let mut k = 1 - kappa + self.model.iterations_run as i64;
        while k <= last_k {
            let started = Instant::now();
            let batch = self.next_batch();
            self.snapshot();
            let beta = vb::beta_schedule(k, hyper.decay);
            if self.options.track_elbo && self.elbo_trace.is_empty() {
                self.push_elbo(&batch);
            }
            self.half_pass(Side::U, &batch, beta)?;
            if self.options.track_elbo {
                self.push_elbo(&batch);
            }
            self.half_pass(Side::V, &batch, beta)?;
            if self.options.track_elbo {
                self.push_elbo(&batch);
            }
            self.skipped_negatives += batch.skipped_negatives;
            self.model.iterations_run += 1;
            let delta_u = nat_mean_delta(&self.model.u_bank);
            let delta_v = nat_mean_delta(&self.model.v_bank);
            info!(
                "k={k} beta={beta:.4} positives={} negatives={} skipped={} delta_r_u={delta_u:.6e} delta_r_v={delta_v:.6e} elapsed={:.3}s",
                batch.n_positive,
                batch.n_negative,
                batch.skipped_negatives,
                started.elapsed().as_secs_f64(),
            );
            if let Some((path, every)) = &self.options.checkpoint {
                if *every > 0 && self.model.iterations_run.is_multiple_of(*every) {
                    crate::checkpoint::save(&self.model, path)?;
                }
            }
            if convergence_check(&self.model.u_bank, &self.model.v_bank, hyper.stop_threshold) {
                self.model.converged = true;
                break;
            }
            k += 1;
        }
        Ok(())
    }

    fn next_batch(&mut self) -> Arc<TrainingBatch> {
        if self.options.freeze_batch {
            if self.frozen.is_none() {
                self.frozen = Some(Arc::new(self.build_batch(1)));
            }
            return Arc::clone(self.frozen.as_ref().expect("frozen batch just built"));
        }
        Arc::new(self.build_batch(self.model.iterations_run as u64 + 1))
    }

    fn build_batch(&self, iteration: u64) -> TrainingBatch {
        let hyper = &self.model.hyper;
        let task = || {
            corpus::sample_batch(
                &self.sentences,
                &self.model.vocab,
                &self.noise,
                hyper.subsample_threshold,
                hyper.max_window,
                hyper.negatives,
                self.model.rng_seed,
                iteration,
            )
        };
        match &self.pool {
            Some(pool) => pool.install(task),
            None => task(),
        }
    }

    fn snapshot(&mut self) {
        let Model { u_bank, v_bank, .. } = &mut self.model;
        let mut task = || {
            u_bank.par_iter_mut().for_each(GaussianFactor::snapshot_prev);
            v_bank.par_iter_mut().for_each(GaussianFactor::snapshot_prev);
        };
        match &self.pool {
            Some(pool) => pool.install(task),
            None => task(),
        }
    }

    /// Update one whole bank in parallel; every factor is written by exactly
    /// one task and the opposite bank stays immutable for the duration.
    fn half_pass(&mut self, side: Side, batch: &TrainingBatch, beta: f64) -> Result<()> {
        let tau = self.model.hyper.tau;
        let pool = &self.pool;
        let Model {
            vocab,
            u_bank,
            v_bank,
            ..
        } = &mut self.model;
        let (bank, adjacency, opposite, label) = match side {
            Side::U => (u_bank, &batch.u_adj, &*v_bank, "target"),
            Side::V => (v_bank, &batch.v_adj, &*u_bank, "context"),
        };
        let mut task = || {
            bank.par_iter_mut().enumerate().try_for_each(|(i, factor)| {
                let (fresh_p, fresh_r) =
                    vb::accumulate_natural_params(factor, &adjacency[i], opposite, tau);
                let (p, r) = vb::blend_stochastic(
                    &fresh_p,
                    &fresh_r,
                    &factor.prev_precision,
                    &factor.prev_nat_mean,
                    beta,
                );
                let (mean, var_diag) = vb::recover_moments(&p, &r).map_err(|_| {
                    Error::NotPositiveDefinite(format!(
                        "{label} factor of {:?}",
                        vocab.word(i as u32)
                    ))
                })?;
                factor.precision = p;
                factor.nat_mean = r;
                factor.mean = mean;
                factor.var_diag = var_diag;
                Ok(())
            })
        };
        match pool {
            Some(pool) => pool.install(task),
            None => task(),
        }
    }

    fn push_elbo(&mut self, batch: &TrainingBatch) {
        self.elbo_trace.push(vb::elbo(
            &self.model.u_bank,
            &self.model.v_bank,
            batch,
            self.model.hyper.tau,
        ));
    }
}

/// Build the vocabulary and both factor banks, then run the iteration loop
/// to completion.
pub fn train(sentences: &[Vec<String>], hyper: HyperParams, options: TrainOptions) -> Result<Model> {
    let mut trainer = Trainer::new(sentences, hyper, options)?;
    trainer.run()?;
    Ok(trainer.into_model())
}

/// One bank of factors with standard-normal means, unit variances, P = I,
/// and r = μ; previous-iteration snapshots start equal to the current values.
pub fn init_factors(l: usize, m: usize, rng: &mut impl Rng) -> Vec<GaussianFactor> {
    (0..l)
        .map(|_| GaussianFactor::init(DVector::from_fn(m, |_, _| rng.sample(StandardNormal))))
        .collect()
}

/// Σ_i ‖r_i − r_i^prev‖₂ over one bank.
pub fn nat_mean_delta(bank: &[GaussianFactor]) -> f64 {
    bank.iter()
        .map(|f| (&f.nat_mean - &f.prev_nat_mean).norm())
        .sum()
}

/// The stopping rule: both banks' summed natural-mean movement below ε.
pub fn convergence_check(
    u_bank: &[GaussianFactor],
    v_bank: &[GaussianFactor],
    epsilon: f64,
) -> bool {
    nat_mean_delta(u_bank) < epsilon && nat_mean_delta(v_bank) < epsilon
}

fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers == 0 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::ThreadPool(e.to_string()))
}
