//! Export embeddings as plain text and read them back.
//!
//! The "text" format is the word2vec layout (header "l m", then one token
//! and its u-mean per line) so external tooling can consume the means; the
//! "means+vars" format appends the posterior variances, which the text
//! layout has no room for.
//!
//!     cargo run --example export_embeddings

use bsg::export::{self, ExportFormat, TextEmbeddings};
use bsg::similarity::cosine;
use bsg::{train, HyperParams, TrainOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<Vec<String>> {
    let words = ["north", "south", "east", "west", "up", "down"];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    (0..300)
        .map(|_| {
            (0..6)
                .map(|_| words[rng.random_range(0..words.len())].to_string())
                .collect()
        })
        .collect()
}

fn main() -> bsg::Result<()> {
    let model = train(
        &corpus(),
        HyperParams {
            dim: 4,
            max_iterations: 15,
            warmup_iterations: 5,
            vocab_size: 10,
            subsample_threshold: 1.0,
            ..HyperParams::default()
        },
        TrainOptions::default(),
    )?;

    let dir = tempfile::tempdir()?;
    let text_path = dir.path().join("toy.vec");
    let mv_path = dir.path().join("toy.tsv");
    export::save(&model, ExportFormat::Text, &text_path)?;
    export::save(&model, ExportFormat::MeansVars, &mv_path)?;

    let text = std::fs::read_to_string(&text_path)?;
    println!("text export ({} lines):", text.lines().count());
    for line in text.lines().take(3) {
        println!("  {line}");
    }
    println!("  ...");
    let mv = std::fs::read_to_string(&mv_path)?;
    println!(
        "means+vars export: {} lines, {} columns per row",
        mv.lines().count(),
        mv.lines().nth(1).map_or(0, |l| l.split_whitespace().count()),
    );

    // Re-import and verify a cosine survives the 6-significant-digit print.
    let emb = TextEmbeddings::read(&text_path)?;
    let (a, b) = (model.vocab.word(0), model.vocab.word(1));
    let reimported = cosine(emb.vector(a).unwrap(), emb.vector(b).unwrap())?;
    let original = cosine(&model.u_bank[0].mean, &model.u_bank[1].mean)?;
    println!(
        "cosine({a}, {b}): original {original:.8}, after round trip {reimported:.8}, \
         |diff| = {:.2e}",
        (original - reimported).abs()
    );
    Ok(())
}
