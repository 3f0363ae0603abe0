//! Corpus ingestion and batch construction: vocabulary building, the
//! unigram^(3/4) noise distribution behind an alias sampler, frequent-word
//! subsampling, window pair generation, and rejection-sampled negatives.
//!
//! Batches are counted adjacency: per word, a list of (other id, sign,
//! multiplicity), mirrored between the target and context sides. All
//! randomness flows through explicit streams, and `sample_batch` derives one
//! stream per sentence and per target, so its output does not depend on how
//! work is split across threads.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, PHASE_NEGATIVE, PHASE_SENTENCE};

/// Consecutive rejected negative draws after which the draw is abandoned and
/// counted as skipped (tiny vocabularies can make nearly all pairs positive).
pub const REJECTION_CAP: usize = 100;

/// The retained words of a corpus: dense ids in descending frequency order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    counts: Vec<u64>,
    total: u64,
    /// Whether the corpus tokens were lowercase-folded; queries against the
    /// vocabulary fold the same way.
    pub lowercased: bool,
}

impl Vocabulary {
    /// The `max_size` most frequent tokens, ties at the cutoff resolved
    /// toward the lexicographically smaller token. `lowercased` records the
    /// case folding already applied to `sentences` by the reader.
    pub fn build(sentences: &[Vec<String>], max_size: usize, lowercased: bool) -> Result<Self> {
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for sentence in sentences {
            for token in sentence {
                *freq.entry(token.as_str()).or_insert(0) += 1;
            }
        }
        if freq.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut ranked: Vec<(&str, u64)> = freq.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(max_size);

        let words: Vec<String> = ranked.iter().map(|(w, _)| (*w).to_string()).collect();
        let counts: Vec<u64> = ranked.iter().map(|&(_, c)| c).collect();
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let total = counts.iter().sum();
        Ok(Vocabulary {
            words,
            index,
            counts,
            total,
            lowercased,
        })
    }

    /// Reassemble a vocabulary from stored words and counts (checkpoint
    /// loading). Order must be the original id order.
    pub(crate) fn from_parts(words: Vec<String>, counts: Vec<u64>, lowercased: bool) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if words.len() != counts.len() {
            return Err(Error::LengthMismatch {
                left: words.len(),
                right: counts.len(),
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            if index.insert(word.clone(), i as u32).is_some() {
                return Err(Error::Checkpoint(format!("duplicate vocabulary token {word:?}")));
            }
        }
        let total = counts.iter().sum();
        Ok(Vocabulary {
            words,
            index,
            counts,
            total,
            lowercased,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Id of a token, folding case the way the corpus was folded.
    pub fn lookup(&self, token: &str) -> Option<u32> {
        if self.lowercased {
            self.index.get(token.to_lowercase().as_str()).copied()
        } else {
            self.index.get(token).copied()
        }
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequency f(w) over the retained corpus.
    pub fn frequency(&self, id: u32) -> f64 {
        self.counts[id as usize] as f64 / self.total as f64
    }

    /// Map sentences to id sequences, dropping out-of-vocabulary tokens.
    /// Sentence boundaries are preserved, including sentences left empty.
    pub fn encode(&self, sentences: &[Vec<String>]) -> Vec<Vec<u32>> {
        sentences
            .iter()
            .map(|sentence| {
                sentence
                    .iter()
                    .filter_map(|token| self.index.get(token.as_str()).copied())
                    .collect()
            })
            .collect()
    }

    /// "word<TAB>count" lines in descending count order.
    pub fn write_tsv(&self, out: &mut impl Write) -> Result<()> {
        for (word, count) in self.words.iter().zip(&self.counts) {
            writeln!(out, "{word}\t{count}")?;
        }
        Ok(())
    }
}

/// Read whitespace-tokenized sentences, one per line, optionally folding to
/// lowercase.
pub fn read_sentences(reader: impl BufRead, lowercase: bool) -> Result<Vec<Vec<String>>> {
    let mut sentences = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let tokens = line
            .split_whitespace()
            .map(|t| {
                if lowercase {
                    t.to_lowercase()
                } else {
                    t.to_string()
                }
            })
            .collect();
        sentences.push(tokens);
    }
    Ok(sentences)
}

/// Alias-method sampler over the unigram distribution raised to the 3/4
/// power. Sampling is O(1) per draw and reads only shared immutable tables.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSampler {
    probs: Vec<f64>,
    accept: Vec<f64>,
    alias: Vec<u32>,
}

impl NoiseSampler {
    pub fn new(vocab: &Vocabulary) -> Self {
        Self::from_counts(vocab.counts())
    }

    pub fn from_counts(counts: &[u64]) -> Self {
        assert!(!counts.is_empty());
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();

        // Vose's construction: split entries into under- and over-full bins,
        // pairing each under-full bin with an over-full donor.
        let n = probs.len();
        let mut scaled: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
        let mut accept = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            accept[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        // Leftovers in either list are exactly-full bins up to rounding.
        NoiseSampler {
            probs,
            accept,
            alias,
        }
    }

    /// Normalized sampling probabilities, proportional to count^(3/4).
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        let bin = rng.random_range(0..self.accept.len());
        if rng.random::<f64>() < self.accept[bin] {
            bin as u32
        } else {
            self.alias[bin]
        }
    }
}

/// One adjacency record: a neighbor id, the pair's sign (+1 positive, −1
/// negative), and how many times the pair occurred in the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjEntry {
    pub other: u32,
    pub sign: i8,
    pub count: u32,
}

/// One iteration's training data as mirrored counted adjacency. Every
/// (i, j, sign, count) in `u_adj` appears as (j, i, sign, count) in `v_adj`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingBatch {
    pub u_adj: Vec<Vec<AdjEntry>>,
    pub v_adj: Vec<Vec<AdjEntry>>,
    pub n_positive: u64,
    pub n_negative: u64,
    pub skipped_negatives: u64,
}

/// Counted positive co-occurrences grouped by target id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivePairs {
    pub by_target: Vec<BTreeMap<u32, u32>>,
    pub n_instances: u64,
}

/// Keep each occurrence of word w with probability min(1, √(ρ/f(w))); the
/// formula's negative discard probabilities for rare words clamp to zero,
/// and such words consume no randomness.
pub fn subsample(sentence: &[u32], rho: f64, vocab: &Vocabulary, rng: &mut impl Rng) -> Vec<u32> {
    sentence
        .iter()
        .copied()
        .filter(|&id| {
            let keep = (rho / vocab.frequency(id)).sqrt();
            keep >= 1.0 || rng.random::<f64>() < keep
        })
        .collect()
}

/// Every position draws its own window size uniformly from 1..=c_max, then
/// emits (word, neighbor) for all in-window positions, clipped at sentence
/// edges. The draw happens per position even when the window clips away.
fn window_pairs_into(
    sentence: &[u32],
    c_max: usize,
    rng: &mut impl Rng,
    pairs: &mut BTreeMap<(u32, u32), u32>,
) {
    for (p, &target) in sentence.iter().enumerate() {
        let window = rng.random_range(1..=c_max);
        let lo = p.saturating_sub(window);
        let hi = (p + window).min(sentence.len() - 1);
        for (q, &neighbor) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
            if q != p {
                *pairs.entry((target, neighbor)).or_insert(0) += 1;
            }
        }
    }
}

fn group_pairs(pairs: BTreeMap<(u32, u32), u32>, l: usize) -> PositivePairs {
    let mut by_target = vec![BTreeMap::new(); l];
    let mut n_instances = 0u64;
    for ((i, j), count) in pairs {
        by_target[i as usize].insert(j, count);
        n_instances += u64::from(count);
    }
    PositivePairs {
        by_target,
        n_instances,
    }
}

/// Positive pair multiset over whole sentences, counted per (target, context).
pub fn generate_positive_pairs(
    sentences: &[Vec<u32>],
    c_max: usize,
    l: usize,
    rng: &mut impl Rng,
) -> PositivePairs {
    let mut pairs = BTreeMap::new();
    for sentence in sentences {
        window_pairs_into(sentence, c_max, rng, &mut pairs);
    }
    group_pairs(pairs, l)
}

/// Draw `n_per_instance` negatives for every positive instance of one target,
/// rejecting ids in the target's positive set. Gives (negative counts,
/// skipped draws). Contexts are visited in ascending id order.
fn negatives_for_target(
    positive_ctx: &BTreeMap<u32, u32>,
    n_per_instance: usize,
    noise: &NoiseSampler,
    rng: &mut impl Rng,
) -> (BTreeMap<u32, u32>, u64) {
    let mut negatives = BTreeMap::new();
    let mut skipped = 0u64;
    for &count in positive_ctx.values() {
        for _ in 0..u64::from(count) * n_per_instance as u64 {
            let mut accepted = false;
            for _ in 0..REJECTION_CAP {
                let z = noise.sample(rng);
                if !positive_ctx.contains_key(&z) {
                    *negatives.entry(z).or_insert(0) += 1;
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                skipped += 1;
            }
        }
    }
    (negatives, skipped)
}

fn assemble_batch(
    positives: &PositivePairs,
    negatives: Vec<BTreeMap<u32, u32>>,
    skipped_negatives: u64,
) -> TrainingBatch {
    let l = positives.by_target.len();
    let mut u_adj: Vec<Vec<AdjEntry>> = vec![Vec::new(); l];
    let mut v_adj: Vec<Vec<AdjEntry>> = vec![Vec::new(); l];
    let mut n_positive = 0u64;
    let mut n_negative = 0u64;
    for (i, ctx) in positives.by_target.iter().enumerate() {
        for (&j, &count) in ctx {
            u_adj[i].push(AdjEntry { other: j, sign: 1, count });
            v_adj[j as usize].push(AdjEntry { other: i as u32, sign: 1, count });
            n_positive += u64::from(count);
        }
    }
    for (i, negs) in negatives.iter().enumerate() {
        for (&z, &count) in negs {
            u_adj[i].push(AdjEntry { other: z, sign: -1, count });
            v_adj[z as usize].push(AdjEntry { other: i as u32, sign: -1, count });
            n_negative += u64::from(count);
        }
    }
    TrainingBatch {
        u_adj,
        v_adj,
        n_positive,
        n_negative,
        skipped_negatives,
    }
}

/// Augment positive pairs with `n_per_instance` rejection-sampled negatives
/// per positive instance and assemble the mirrored batch.
pub fn sample_negatives(
    positives: &PositivePairs,
    n_per_instance: usize,
    noise: &NoiseSampler,
    rng: &mut impl Rng,
) -> TrainingBatch {
    let mut negatives = Vec::with_capacity(positives.by_target.len());
    let mut skipped = 0u64;
    for ctx in &positives.by_target {
        let (negs, s) = negatives_for_target(ctx, n_per_instance, noise, rng);
        negatives.push(negs);
        skipped += s;
    }
    assemble_batch(positives, negatives, skipped)
}

/// Build one iteration's batch: subsample, window pairs, negatives. Per-unit
/// streams keyed by (seed, iteration) make the result identical for any
/// worker count; count merges are commutative so the parallel reduction
/// order cannot show through.
#[allow(clippy::too_many_arguments)]
pub fn sample_batch(
    sentences: &[Vec<u32>],
    vocab: &Vocabulary,
    noise: &NoiseSampler,
    rho: f64,
    c_max: usize,
    n_per_instance: usize,
    seed: u64,
    iteration: u64,
) -> TrainingBatch {
    let l = vocab.len();
    let pair_map = sentences
        .par_iter()
        .enumerate()
        .map(|(index, sentence)| {
            let mut rng = rng::stream(seed, iteration, PHASE_SENTENCE, index as u64);
            let kept = subsample(sentence, rho, vocab, &mut rng);
            let mut pairs = BTreeMap::new();
            window_pairs_into(&kept, c_max, &mut rng, &mut pairs);
            pairs
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, count) in b {
                *a.entry(key).or_insert(0) += count;
            }
            a
        });
    let positives = group_pairs(pair_map, l);

    let per_target: Vec<(BTreeMap<u32, u32>, u64)> = (0..l)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, iteration, PHASE_NEGATIVE, i as u64);
            negatives_for_target(&positives.by_target[i], n_per_instance, noise, &mut rng)
        })
        .collect();
    let skipped = per_target.iter().map(|(_, s)| s).sum();
    let negatives = per_target.into_iter().map(|(negs, _)| negs).collect();
    assemble_batch(&positives, negatives, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sentences(text: &str) -> Vec<Vec<String>> {
        read_sentences(text.as_bytes(), false).unwrap()
    }

    #[test]
    fn vocabulary_keeps_the_most_frequent_tokens() {
        let corpus = sentences("a b a c a b");
        let vocab = Vocabulary::build(&corpus, 2, false).unwrap();
        assert_eq!(vocab.words(), ["a", "b"]);
        assert_eq!(vocab.counts(), [3, 2]);
        assert_eq!(vocab.total(), 5);
        assert_eq!(vocab.lookup("c"), None);

        let vocab = Vocabulary::build(&corpus, 10, false).unwrap();
        assert_eq!(vocab.words(), ["a", "b", "c"]);
        assert_eq!(vocab.counts(), [3, 2, 1]);
    }

    #[test]
    fn vocabulary_tie_break_is_lexicographic() {
        let corpus = sentences("z b aa b aa z z");
        let vocab = Vocabulary::build(&corpus, 2, false).unwrap();
        assert_eq!(vocab.words(), ["z", "aa"]);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            Vocabulary::build(&[], 5, false),
            Err(Error::EmptyVocabulary)
        ));
        assert!(matches!(
            Vocabulary::build(&sentences("\n\n"), 5, false),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn encode_drops_out_of_vocabulary_tokens() {
        let corpus = sentences("a b a c a b");
        let vocab = Vocabulary::build(&corpus, 2, false).unwrap();
        assert_eq!(vocab.encode(&corpus), vec![vec![0, 1, 0, 0, 1]]);
    }

    #[test]
    fn lookup_folds_case_only_when_the_corpus_did() {
        let corpus = read_sentences("Paris paris".as_bytes(), true).unwrap();
        let vocab = Vocabulary::build(&corpus, 10, true).unwrap();
        assert_eq!(vocab.lookup("PARIS"), Some(0));

        let corpus = read_sentences("Paris paris".as_bytes(), false).unwrap();
        let vocab = Vocabulary::build(&corpus, 10, false).unwrap();
        assert_eq!(vocab.lookup("PARIS"), None);
        assert!(vocab.lookup("Paris").is_some());
    }

    #[test]
    fn vocabulary_tsv_is_descending_by_count() {
        let corpus = sentences("a b a c a b");
        let vocab = Vocabulary::build(&corpus, 10, false).unwrap();
        let mut out = Vec::new();
        vocab.write_tsv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a\t3\nb\t2\nc\t1\n");
    }

    #[test]
    fn noise_probs_match_hand_values() {
        let sampler = NoiseSampler::from_counts(&[8, 1]);
        assert_relative_eq!(sampler.probs()[0], 0.8262934, epsilon = 1e-6);
        assert_relative_eq!(sampler.probs()[1], 0.1737066, epsilon = 1e-6);

        let sampler = NoiseSampler::from_counts(&[5, 5]);
        assert_eq!(sampler.probs(), [0.5, 0.5]);

        let sampler = NoiseSampler::from_counts(&[17]);
        assert_eq!(sampler.probs(), [1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sampler.sample(&mut rng), 0);
    }

    #[test]
    fn noise_probs_sum_to_one() {
        let sampler = NoiseSampler::from_counts(&[1, 2, 3, 50, 1000, 7, 7]);
        let sum: f64 = sampler.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_sampling_matches_probs_empirically() {
        let sampler = NoiseSampler::from_counts(&[8, 1, 30, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000usize;
        let mut hits = [0u64; 4];
        for _ in 0..n {
            hits[sampler.sample(&mut rng) as usize] += 1;
        }
        for (i, &p) in sampler.probs().iter().enumerate() {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let observed = hits[i] as f64 / n as f64;
            assert!(
                (observed - p).abs() < 4.0 * se,
                "word {i}: observed {observed}, expected {p} ± {}",
                4.0 * se
            );
        }
    }

    #[test]
    fn subsampling_keep_rate_and_clamp() {
        // One word, f = 1. rho = 0.25 gives keep probability 0.5.
        let corpus = sentences("a");
        let vocab = Vocabulary::build(&corpus, 1, false).unwrap();
        let sentence = vec![0u32; 100_000];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kept = subsample(&sentence, 0.25, &vocab, &mut rng).len() as f64;
        let se = (0.25f64 * 100_000.0).sqrt();
        assert!((kept - 50_000.0).abs() < 4.0 * se, "kept {kept}");

        // f = rho and f < rho: never discarded, and no randomness consumed.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(subsample(&sentence, 1.0, &vocab, &mut rng), sentence);
        assert_eq!(subsample(&sentence, 10.0, &vocab, &mut rng), sentence);
        let mut fresh = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(rng.random::<u64>(), fresh.random::<u64>());
    }

    #[test]
    fn window_pairs_hand_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pairs = generate_positive_pairs(&[vec![0, 1, 2]], 1, 3, &mut rng);
        assert_eq!(pairs.n_instances, 4);
        assert_eq!(pairs.by_target[0], BTreeMap::from([(1, 1)]));
        assert_eq!(pairs.by_target[1], BTreeMap::from([(0, 1), (2, 1)]));
        assert_eq!(pairs.by_target[2], BTreeMap::from([(1, 1)]));

        let pairs = generate_positive_pairs(&[vec![0]], 4, 1, &mut rng);
        assert_eq!(pairs.n_instances, 0);

        // Two words: clipping makes the result independent of the drawn c.
        let pairs = generate_positive_pairs(&[vec![0, 1]], 4, 2, &mut rng);
        assert_eq!(pairs.by_target[0], BTreeMap::from([(1, 1)]));
        assert_eq!(pairs.by_target[1], BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn repeated_cooccurrence_accumulates_multiplicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pairs = generate_positive_pairs(&[vec![0, 1], vec![0, 1], vec![0, 1]], 1, 2, &mut rng);
        assert_eq!(pairs.by_target[0], BTreeMap::from([(1, 3)]));
        assert_eq!(pairs.n_instances, 6);
    }

    fn mirrored(batch: &TrainingBatch) -> bool {
        let mut expected: Vec<Vec<AdjEntry>> = vec![Vec::new(); batch.v_adj.len()];
        for (i, adj) in batch.u_adj.iter().enumerate() {
            for entry in adj {
                expected[entry.other as usize].push(AdjEntry {
                    other: i as u32,
                    sign: entry.sign,
                    count: entry.count,
                });
            }
        }
        let normalize = |lists: &[Vec<AdjEntry>]| -> Vec<Vec<(u32, i8, u32)>> {
            lists
                .iter()
                .map(|adj| {
                    let mut flat: Vec<(u32, i8, u32)> =
                        adj.iter().map(|e| (e.other, e.sign, e.count)).collect();
                    flat.sort_unstable();
                    flat
                })
                .collect()
        };
        normalize(&expected) == normalize(&batch.v_adj)
    }

    #[test]
    fn negatives_respect_counts_and_rejection() {
        // Multiplicity 3, N = 2: exactly six draws attempted for the target.
        let positives = PositivePairs {
            by_target: vec![BTreeMap::from([(1, 3)]), BTreeMap::new(), BTreeMap::new()],
            n_instances: 3,
        };
        let noise = NoiseSampler::from_counts(&[4, 4, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let batch = sample_negatives(&positives, 2, &noise, &mut rng);
        assert_eq!(batch.n_positive, 3);
        assert_eq!(batch.n_negative + batch.skipped_negatives, 6);
        assert!(mirrored(&batch));
        // Context 1 is positive for target 0, so never drawn as its negative.
        assert!(batch.u_adj[0]
            .iter()
            .all(|e| e.sign == 1 || (e.other != 1 && e.count > 0)));

        // N = 0: positives only.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let batch = sample_negatives(&positives, 0, &noise, &mut rng);
        assert_eq!(batch.n_negative, 0);
        assert_eq!(batch.skipped_negatives, 0);
        assert!(batch.u_adj.iter().flatten().all(|e| e.sign == 1));
    }

    #[test]
    fn fully_positive_context_skips_every_draw() {
        // Target 0 has every word (including itself) in its positive set.
        let positives = PositivePairs {
            by_target: vec![BTreeMap::from([(0, 1), (1, 2)]), BTreeMap::new()],
            n_instances: 3,
        };
        let noise = NoiseSampler::from_counts(&[1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let batch = sample_negatives(&positives, 1, &noise, &mut rng);
        assert_eq!(batch.n_negative, 0);
        assert_eq!(batch.skipped_negatives, 3);
    }

    #[test]
    fn sample_batch_is_reproducible_and_mirrored() {
        let corpus = sentences("a b c d a b\nb d d a\nc c a\n\na d");
        let vocab = Vocabulary::build(&corpus, 4, false).unwrap();
        let ids = vocab.encode(&corpus);
        let noise = NoiseSampler::new(&vocab);
        let first = sample_batch(&ids, &vocab, &noise, 1.0, 3, 2, 99, 5);
        let second = sample_batch(&ids, &vocab, &noise, 1.0, 3, 2, 99, 5);
        assert_eq!(first, second);
        assert!(mirrored(&first));
        assert!(first.n_positive > 0);
        assert_eq!(first.n_negative + first.skipped_negatives, 2 * first.n_positive);

        let other_iteration = sample_batch(&ids, &vocab, &noise, 1.0, 3, 2, 99, 6);
        assert_ne!(first, other_iteration);
    }

    #[test]
    fn no_negative_is_also_positive() {
        let corpus = sentences("a b c d a b\nb d d a\nc c a b d\na d");
        let vocab = Vocabulary::build(&corpus, 4, false).unwrap();
        let ids = vocab.encode(&corpus);
        let noise = NoiseSampler::new(&vocab);
        let batch = sample_batch(&ids, &vocab, &noise, 1.0, 3, 3, 11, 1);
        for adj in &batch.u_adj {
            for entry in adj.iter().filter(|e| e.sign == -1) {
                assert!(adj
                    .iter()
                    .all(|other| other.sign == -1 || other.other != entry.other));
            }
        }
    }

    proptest! {
        #[test]
        fn batches_are_mirrored(
            raw in proptest::collection::vec(
                proptest::collection::vec(0u32..6, 0..12),
                1..8,
            ),
            seed in 0u64..1000,
        ) {
            let l = 6;
            let counts = vec![10u64; l];
            let noise = NoiseSampler::from_counts(&counts);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let positives = generate_positive_pairs(&raw, 3, l, &mut rng);
            let batch = sample_negatives(&positives, 2, &noise, &mut rng);
            prop_assert!(mirrored(&batch));
            prop_assert_eq!(batch.n_positive, positives.n_instances);
        }
    }
}
