//! Command-line front end. Every subcommand is a thin wrapper over the
//! library; see the crate docs and examples/ for the programmatic surface.
//!
//! Exit codes: 0 success, 2 usage or invalid configuration, 3 data problems
//! (unreadable/malformed inputs, out-of-vocabulary words), 4 corrupt model
//! files, 1 internal errors.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use bsg::eval::{self, AnalogyDataset, SimilarityDataset};
use bsg::export::{self, ExportFormat};
use bsg::similarity::{self, Measure, Neighbor, Representation};
use bsg::{checkpoint, corpus, Error, HyperParams, Result, TrainOptions, Trainer};

#[derive(Parser)]
#[command(
    name = "bsg",
    version,
    about = "Bayesian Skip-Gram word embeddings: Gaussian posteriors per word, \
             trained by Variational Bayes on the negative-sampling objective"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write a checkpoint plus a text export.
    Train(TrainArgs),
    /// Print the nearest neighbors of a word.
    Similar(SimilarArgs),
    /// Complete "a is to b as c is to ?" by the vector-offset rule.
    Analogy(AnalogyArgs),
    /// Word-similarity benchmark: Spearman x100 against human scores.
    EvalSim(EvalArgs),
    /// Word-analogy benchmark: accuracy per group and in total.
    EvalAnalogy(EvalArgs),
    /// Convert a checkpoint to a plain-text embedding table.
    Export(ExportArgs),
    /// Print a checkpoint's header fields.
    Info(InfoArgs),
}

/// Every training hyperparameter, in one place so --help shows the full
/// configuration with its default.
#[derive(Args)]
struct HyperArgs {
    /// Embedding dimension m.
    #[arg(long, visible_alias = "m", default_value_t = 40)]
    dim: usize,

    /// Prior precision tau; the prior over every embedding is N(0, I/tau).
    #[arg(long, default_value_t = 1.0)]
    tau: f64,

    /// Maximum iterations K, warm-up included.
    #[arg(long, visible_alias = "K", default_value_t = 40)]
    max_iterations: usize,

    /// Largest context window c_max; each position draws its own size from
    /// 1..=c_max.
    #[arg(long, visible_alias = "c-max", default_value_t = 4)]
    max_window: usize,

    /// Vocabulary size cap l (most frequent words kept).
    #[arg(long, visible_alias = "l", default_value_t = 30000)]
    vocab_size: usize,

    /// Subsampling threshold rho: a word of frequency f survives with
    /// probability min(1, sqrt(rho/f)).
    #[arg(long, visible_alias = "rho", default_value_t = 1e-5)]
    subsample_threshold: f64,

    /// Negative samples N drawn per positive pair instance.
    #[arg(long, visible_alias = "N", default_value_t = 1)]
    negatives: usize,

    /// Warm-up iterations kappa: full-replacement updates (step size 1).
    #[arg(long, visible_alias = "kappa", default_value_t = 10)]
    warmup_iterations: usize,

    /// Stopping threshold epsilon on the summed natural-mean movement of
    /// both banks.
    #[arg(long, visible_alias = "epsilon", default_value_t = 1e-4)]
    stop_threshold: f64,

    /// Step-size decay exponent gamma in (0.5, 1]: after warm-up, iteration
    /// k blends with weight k^(-gamma).
    #[arg(long, visible_alias = "gamma", default_value_t = 0.7)]
    decay: f64,
}

impl HyperArgs {
    fn to_hyper(&self) -> HyperParams {
        HyperParams {
            dim: self.dim,
            tau: self.tau,
            max_iterations: self.max_iterations,
            max_window: self.max_window,
            vocab_size: self.vocab_size,
            subsample_threshold: self.subsample_threshold,
            negatives: self.negatives,
            warmup_iterations: self.warmup_iterations,
            stop_threshold: self.stop_threshold,
            decay: self.decay,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Corpus file: one sentence per line, whitespace-separated tokens.
    corpus: PathBuf,

    /// Output checkpoint path.
    #[arg(long)]
    model: PathBuf,

    /// Text export path; defaults to the model path with extension "vec".
    #[arg(long)]
    export: Option<PathBuf>,

    #[command(flatten)]
    hyper: HyperArgs,

    /// RNG seed; a run is a pure function of (seed, flags, corpus bytes).
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Worker threads for the parallel block updates; 0 uses all cores.
    /// The result does not depend on this value.
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Lowercase the corpus before building the vocabulary; queries against
    /// the model then fold the same way.
    #[arg(long)]
    lowercase: bool,

    /// Reuse the first iteration's batch for the whole run (pure coordinate
    /// ascent on a fixed objective). Lifts the K > kappa requirement.
    #[arg(long)]
    freeze_batch: bool,

    /// Record the evidence lower bound after every half-iteration and log
    /// the trace at the end.
    #[arg(long)]
    track_elbo: bool,

    /// Also write the checkpoint every N completed iterations.
    #[arg(long, value_name = "N")]
    checkpoint_every: Option<usize>,
}

#[derive(Args)]
struct SimilarArgs {
    /// Query word.
    word: String,

    /// Checkpoint to query.
    #[arg(long)]
    model: PathBuf,

    /// Number of neighbors to print.
    #[arg(long, default_value_t = 10)]
    k: usize,

    /// cosine, link_prob, or sym_kl. Cosine adds a confidence column: the
    /// negated variance of the dot product under the two posteriors.
    #[arg(long, default_value = "cosine")]
    measure: Measure,

    /// Which factors to read: u (target side, the default representation),
    /// v (context side), or sum.
    #[arg(long, default_value = "u")]
    representation: Representation,
}

#[derive(Args)]
struct AnalogyArgs {
    /// The three cue words: word_a is to word_b as word_c is to ?
    word_a: String,
    word_b: String,
    word_c: String,

    /// Checkpoint to query.
    #[arg(long)]
    model: PathBuf,

    /// Number of completions to print.
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset file; see the README for the accepted layouts.
    dataset: PathBuf,

    /// Checkpoint to evaluate.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    /// Checkpoint to read.
    model: PathBuf,

    /// "text" (word2vec layout: header line, then token + u-mean per line)
    /// or "means+vars" (token + u-means + posterior variances).
    #[arg(long, default_value = "text")]
    format: ExportFormat,

    /// Output path; defaults to the model path with extension "vec" (text)
    /// or "tsv" (means+vars).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    /// Checkpoint to describe.
    model: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Train(args) => cmd_train(args),
        Command::Similar(args) => cmd_similar(args),
        Command::Analogy(args) => cmd_analogy(args),
        Command::EvalSim(args) => cmd_eval_sim(args),
        Command::EvalAnalogy(args) => cmd_eval_analogy(args),
        Command::Export(args) => cmd_export(args),
        Command::Info(args) => cmd_info(args),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidHyperparameter { .. }
        | Error::InvalidArgument(_)
        | Error::NoEffectiveIterations { .. } => 2,
        Error::Io(_)
        | Error::DatasetFormat { .. }
        | Error::EmptyVocabulary
        | Error::UnknownWord(_)
        | Error::NoUsableData(_)
        | Error::DegenerateRanks(_)
        | Error::ZeroVector => 3,
        Error::Checkpoint(_) | Error::NonPositiveVariance => 4,
        Error::NotPositiveDefinite(_) | Error::LengthMismatch { .. } | Error::ThreadPool(_) => 1,
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let file = File::open(&args.corpus)?;
    let sentences = corpus::read_sentences(BufReader::new(file), args.lowercase)?;
    let options = TrainOptions {
        seed: args.seed,
        workers: args.workers,
        lowercased: args.lowercase,
        freeze_batch: args.freeze_batch,
        track_elbo: args.track_elbo,
        checkpoint: args.checkpoint_every.map(|n| (args.model.clone(), n)),
    };
    let mut trainer = Trainer::new(&sentences, args.hyper.to_hyper(), options)?;
    trainer.run()?;
    if args.track_elbo {
        for (i, value) in trainer.elbo_trace().iter().enumerate() {
            info!("elbo[{i}] = {value:.6}");
        }
    }
    if trainer.skipped_negatives() > 0 {
        info!(
            "{} negative draws hit the rejection cap and were skipped",
            trainer.skipped_negatives()
        );
    }
    let model = trainer.into_model();
    checkpoint::save(&model, &args.model)?;
    let export_path = args
        .export
        .unwrap_or_else(|| args.model.with_extension("vec"));
    export::save(&model, ExportFormat::Text, &export_path)?;
    let outcome = if model.converged {
        format!("converged after {} iterations", model.iterations_run)
    } else {
        format!("reached max iterations ({})", model.iterations_run)
    };
    info!(
        "{outcome}; wrote {} and {}",
        args.model.display(),
        export_path.display()
    );
    Ok(())
}

fn print_neighbors(hits: &[Neighbor], out: &mut impl Write) -> Result<()> {
    for (rank, n) in hits.iter().enumerate() {
        match n.confidence {
            Some(c) => writeln!(out, "{}\t{}\t{:.6}\t{:.6e}", rank + 1, n.word, n.score, c)?,
            None => writeln!(out, "{}\t{}\t{:.6}", rank + 1, n.word, n.score)?,
        }
    }
    Ok(())
}

fn cmd_similar(args: SimilarArgs) -> Result<()> {
    let model = checkpoint::load(&args.model)?;
    let hits = similarity::nearest_neighbors(
        &model,
        &args.word,
        args.k,
        args.measure,
        args.representation,
    )?;
    print_neighbors(&hits, &mut io::stdout().lock())
}

fn cmd_analogy(args: AnalogyArgs) -> Result<()> {
    let model = checkpoint::load(&args.model)?;
    let hits = eval::analogy_candidates(&model, &args.word_a, &args.word_b, &args.word_c, args.k)?;
    print_neighbors(&hits, &mut io::stdout().lock())
}

fn cmd_eval_sim(args: EvalArgs) -> Result<()> {
    let model = checkpoint::load(&args.model)?;
    let dataset = SimilarityDataset::read(&args.dataset)?;
    let score = eval::eval_word_similarity(&model, &dataset)?;
    let mut out = io::stdout().lock();
    writeln!(out, "spearman_x100\tn_used\tn_oov")?;
    writeln!(
        out,
        "{:.4}\t{}\t{}",
        score.spearman_x100, score.n_used, score.n_oov
    )?;
    Ok(())
}

fn cmd_eval_analogy(args: EvalArgs) -> Result<()> {
    let model = checkpoint::load(&args.model)?;
    let dataset = AnalogyDataset::read(&args.dataset)?;
    let report = eval::eval_analogy(&model, &dataset)?;
    if report.total.n_unanswerable > 0 {
        warn!(
            "{} questions had no rankable candidate and count as incorrect",
            report.total.n_unanswerable
        );
    }
    eval::write_analogy_report(&report, &mut io::stdout().lock())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let model = checkpoint::load(&args.model)?;
    let output = args.output.unwrap_or_else(|| match args.format {
        ExportFormat::Text => args.model.with_extension("vec"),
        ExportFormat::MeansVars => args.model.with_extension("tsv"),
    });
    export::save(&model, args.format, &output)?;
    info!("wrote {} words to {}", model.vocab.len(), output.display());
    Ok(())
}

fn cmd_info(args: InfoArgs) -> Result<()> {
    let info = checkpoint::info(&args.model)?;
    let mut out = io::stdout().lock();
    writeln!(out, "vocab\t{}", info.vocab_len)?;
    writeln!(out, "iterations_run\t{}", info.iterations_run)?;
    writeln!(out, "converged\t{}", info.converged)?;
    writeln!(out, "seed\t{}", info.seed)?;
    let h = &info.hyper;
    writeln!(out, "dim\t{}", h.dim)?;
    writeln!(out, "tau\t{}", h.tau)?;
    writeln!(out, "max_iterations\t{}", h.max_iterations)?;
    writeln!(out, "max_window\t{}", h.max_window)?;
    writeln!(out, "vocab_size\t{}", h.vocab_size)?;
    writeln!(out, "subsample_threshold\t{}", h.subsample_threshold)?;
    writeln!(out, "negatives\t{}", h.negatives)?;
    writeln!(out, "warmup_iterations\t{}", h.warmup_iterations)?;
    writeln!(out, "stop_threshold\t{}", h.stop_threshold)?;
    writeln!(out, "decay\t{}", h.decay)?;
    Ok(())
}
