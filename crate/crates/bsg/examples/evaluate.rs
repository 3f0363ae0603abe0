//! Run both benchmark harnesses on a model with known structure.
//!
//! The corpus has two topics, so a hand-written relatedness file (intra
//! pairs scored high, cross pairs low) should correlate strongly with the
//! learned cosines, and analogy questions whose answer lives in the right
//! topic should mostly resolve. Also demonstrates the dataset file formats.
//!
//!     cargo run --example evaluate

use std::io::Write;

use bsg::eval::{self, AnalogyDataset, SimilarityDataset};
use bsg::{train, HyperParams, TrainOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEA: [&str; 6] = ["wave", "tide", "reef", "kelp", "foam", "brine"];
const DESERT: [&str; 6] = ["dune", "sand", "cactus", "mesa", "oasis", "mirage"];

fn corpus(seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1500)
        .map(|_| {
            let topic: &[&str] = if rng.random_range(0..2) == 0 { &SEA } else { &DESERT };
            (0..8)
                .map(|_| topic[rng.random_range(0..topic.len())].to_string())
                .collect()
        })
        .collect()
}

fn main() -> bsg::Result<()> {
    let model = train(
        &corpus(23),
        HyperParams {
            dim: 10,
            max_iterations: 30,
            warmup_iterations: 10,
            vocab_size: 50,
            subsample_threshold: 1.0,
            ..HyperParams::default()
        },
        TrainOptions::default(),
    )?;

    let dir = tempfile::tempdir()?;

    // Relatedness pairs, mixing the accepted separators. The "coast" token
    // is out of vocabulary on purpose to show the discard accounting.
    let sim_path = dir.path().join("relatedness.tsv");
    let mut f = std::fs::File::create(&sim_path)?;
    writeln!(f, "# toy relatedness, 0-10 scale")?;
    writeln!(f, "wave\ttide\t9.2")?;
    writeln!(f, "reef,kelp,8.4")?;
    writeln!(f, "dune sand 8.9")?;
    writeln!(f, "cactus mesa 7.8")?;
    writeln!(f, "wave dune 1.3")?;
    writeln!(f, "kelp sand 0.9")?;
    writeln!(f, "tide mirage 1.8")?;
    writeln!(f, "wave coast 6.0")?;
    drop(f);
    let dataset = SimilarityDataset::read(&sim_path)?;
    let score = eval::eval_word_similarity(&model, &dataset)?;
    println!(
        "word similarity: spearman x100 = {:.1} over {} pairs ({} discarded as OOV)",
        score.spearman_x100, score.n_used, score.n_oov
    );

    // Analogy questions: the expected answer is simply another word of the
    // same topic as the third cue.
    let ana_path = dir.path().join("questions.txt");
    let mut f = std::fs::File::create(&ana_path)?;
    writeln!(f, ": sea-to-sea")?;
    writeln!(f, "wave tide reef kelp")?;
    writeln!(f, "foam brine kelp reef")?;
    writeln!(f, ": cross-topic")?;
    writeln!(f, "wave tide dune sand")?;
    writeln!(f, "reef kelp cactus mesa")?;
    writeln!(f, "foam wave oasis mirage")?;
    drop(f);
    let questions = AnalogyDataset::read(&ana_path)?;
    let report = eval::eval_analogy(&model, &questions)?;
    println!("\nanalogy report:");
    let mut out = Vec::new();
    eval::write_analogy_report(&report, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
