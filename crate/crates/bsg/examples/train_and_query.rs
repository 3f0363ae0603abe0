//! Train on a small synthetic corpus and query nearest neighbors.
//!
//! The corpus interleaves two topics; after training, each word's closest
//! neighbors should come from its own topic. Run with:
//!
//!     cargo run --example train_and_query

use bsg::similarity::{nearest_neighbors, Measure, Representation};
use bsg::{train, HyperParams, TrainOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WEATHER: [&str; 8] = [
    "rain", "snow", "wind", "storm", "cloud", "frost", "hail", "thunder",
];
const FINANCE: [&str; 8] = [
    "bank", "loan", "cash", "debt", "bond", "fund", "rate", "ledger",
];

fn synthetic_corpus(seed: u64, n_sentences: usize) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sentences)
        .map(|_| {
            let topic: &[&str] = if rng.random_range(0..2) == 0 {
                &WEATHER
            } else {
                &FINANCE
            };
            (0..8)
                .map(|_| topic[rng.random_range(0..topic.len())].to_string())
                .collect()
        })
        .collect()
}

fn main() -> bsg::Result<()> {
    let sentences = synthetic_corpus(11, 1000);
    let hyper = HyperParams {
        dim: 10,
        max_iterations: 30,
        warmup_iterations: 10,
        vocab_size: 100,
        // Sixteen words sharing 8000 tokens are all "frequent"; keep every
        // token instead of subsampling the corpus away.
        subsample_threshold: 1.0,
        ..HyperParams::default()
    };
    let model = train(&sentences, hyper, TrainOptions::default())?;
    println!(
        "trained {} words, {} iterations, converged: {}",
        model.vocab.len(),
        model.iterations_run,
        model.converged
    );

    for query in ["rain", "bank"] {
        println!("\nnearest to {query:?} (cosine over u-means, confidence = -var[u'v]):");
        let hits = nearest_neighbors(&model, query, 5, Measure::Cosine, Representation::U)?;
        for (rank, n) in hits.iter().enumerate() {
            println!(
                "  {}. {:<8} score {:+.4}  confidence {:+.3e}",
                rank + 1,
                n.word,
                n.score,
                n.confidence.expect("cosine carries a confidence")
            );
        }
    }
    Ok(())
}
