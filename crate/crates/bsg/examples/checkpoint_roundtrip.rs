//! Save a half-finished run, reload it, and finish it bit-exactly.
//!
//! The checkpoint stores both factor banks with their previous-iteration
//! snapshots plus the seed, so a resumed run replays the exact batch stream
//! an uninterrupted run would have seen. This example proves it by
//! comparing the two models for full equality.
//!
//!     cargo run --example checkpoint_roundtrip

use bsg::{checkpoint, HyperParams, TrainOptions, Trainer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<Vec<String>> {
    let words = [
        "amber", "coral", "ivory", "jade", "onyx", "pearl", "ruby", "topaz",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    (0..400)
        .map(|_| {
            (0..7)
                .map(|_| words[rng.random_range(0..words.len())].to_string())
                .collect()
        })
        .collect()
}

fn hyper(max_iterations: usize) -> HyperParams {
    HyperParams {
        dim: 6,
        max_iterations,
        warmup_iterations: 4,
        vocab_size: 50,
        subsample_threshold: 1.0,
        stop_threshold: 0.0, // never stop early, so both runs do all the work
        ..HyperParams::default()
    }
}

fn main() -> bsg::Result<()> {
    let sentences = corpus();
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("half.bsgc");

    // First leg: 6 of 12 iterations, then save.
    let mut first = Trainer::new(&sentences, hyper(6), TrainOptions::default())?;
    first.run()?;
    checkpoint::save(first.model(), &path)?;
    println!(
        "saved after {} iterations to {}",
        first.model().iterations_run,
        path.display()
    );

    // Second leg: reload, raise the iteration budget, continue.
    let mut reloaded = checkpoint::load(&path)?;
    reloaded.hyper.max_iterations = 12;
    let mut second = Trainer::resume(reloaded, &sentences, TrainOptions::default())?;
    second.run()?;
    println!("resumed and finished at {} iterations", second.model().iterations_run);

    // Reference: one uninterrupted 12-iteration run.
    let mut direct = Trainer::new(&sentences, hyper(12), TrainOptions::default())?;
    direct.run()?;

    assert_eq!(
        second.model(),
        direct.model(),
        "resumed model must equal the uninterrupted run bit for bit"
    );
    println!("resumed model == uninterrupted model (every float identical)");

    let info = checkpoint::info(&path)?;
    println!(
        "checkpoint header: {} words, dim {}, {} iterations, converged: {}, seed {}",
        info.vocab_len, info.dim, info.iterations_run, info.converged, info.seed
    );
    Ok(())
}
