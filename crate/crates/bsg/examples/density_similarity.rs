//! The three density-aware measures side by side.
//!
//! The corpus makes "sun" very frequent and "eclipse" rare, so their
//! posteriors end up with very different variances even though both live in
//! the same topic. Point estimates (cosine) hide that difference; the
//! density measures expose it.
//!
//!     cargo run --example density_similarity

use bsg::similarity::{cosine, dot_moments, kl_gaussian, link_probability, sym_kl_similarity};
use bsg::{train, HyperParams, TrainOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(seed: u64) -> Vec<Vec<String>> {
    // "sun", "moon", "star" dominate; "eclipse" and "comet" are rare guests
    // of the same sentences. A disjoint mineral topic provides contrast.
    let sky_common = ["sun", "moon", "star", "light"];
    let sky_rare = ["eclipse", "comet"];
    let rocks = ["quartz", "basalt", "granite", "slate"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1500)
        .map(|_| {
            if rng.random_range(0..2) == 0 {
                let mut s: Vec<String> = (0..7)
                    .map(|_| sky_common[rng.random_range(0..sky_common.len())].to_string())
                    .collect();
                if rng.random_range(0..10) == 0 {
                    s.push(sky_rare[rng.random_range(0..sky_rare.len())].to_string());
                }
                s
            } else {
                (0..8)
                    .map(|_| rocks[rng.random_range(0..rocks.len())].to_string())
                    .collect()
            }
        })
        .collect()
}

fn main() -> bsg::Result<()> {
    let model = train(
        &corpus(5),
        HyperParams {
            dim: 10,
            max_iterations: 30,
            warmup_iterations: 10,
            vocab_size: 100,
            subsample_threshold: 1.0,
            ..HyperParams::default()
        },
        TrainOptions::default(),
    )?;

    let factor = |w: &str| {
        let id = model.vocab.lookup(w).unwrap_or_else(|| panic!("{w} not in vocabulary"));
        &model.u_bank[id as usize]
    };
    let mean_var = |w: &str| factor(w).var_diag.mean();

    println!("posterior sharpness (mean diagonal variance):");
    for w in ["sun", "moon", "eclipse", "comet", "quartz"] {
        println!("  {:<8} count {:>5}  mean var {:.4}", w, model.vocab.count(model.vocab.lookup(w).unwrap()), mean_var(w));
    }

    println!("\npairwise measures:");
    println!(
        "  {:<18} {:>8} {:>10} {:>10} {:>10} {:>10}",
        "pair", "cosine", "E[u'v]", "sd[u'v]", "p(link)", "sym-KL"
    );
    for (a, b) in [
        ("sun", "moon"),
        ("sun", "eclipse"),
        ("eclipse", "comet"),
        ("sun", "quartz"),
    ] {
        let (fa, fb) = (factor(a), factor(b));
        let m = dot_moments(fa, fb);
        println!(
            "  {:<18} {:>8.4} {:>10.4} {:>10.4} {:>10.4} {:>10.3}",
            format!("{a}/{b}"),
            cosine(&fa.mean, &fb.mean)?,
            m.mean,
            m.variance.sqrt(),
            link_probability(fa, fb),
            sym_kl_similarity(fa, fb)?,
        );
    }

    let (sun, eclipse) = (factor("sun"), factor("eclipse"));
    println!(
        "\nKL is asymmetric: KL(sun||eclipse) = {:.3}, KL(eclipse||sun) = {:.3}",
        kl_gaussian(sun, eclipse)?,
        kl_gaussian(eclipse, sun)?
    );
    println!("rare words keep wider posteriors, so their dot products carry more spread");
    Ok(())
}
