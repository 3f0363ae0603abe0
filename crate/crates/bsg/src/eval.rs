//! Word-similarity and word-analogy evaluation.
//!
//! Similarity: Spearman rank correlation (average ranks for ties) between
//! human relatedness scores and the cosine of u-means, reported x100.
//! Analogy: for "a is to b as c is to ?", predict the vocabulary word whose
//! u-mean has the highest cosine with μ_b − μ_a + μ_c, excluding the three
//! cue words; accuracy per named group and in total. Questions containing an
//! out-of-vocabulary token are discarded and counted.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::similarity::{self, Neighbor};
use crate::trainer::Model;

/// Scored word pairs, e.g. WordSim353.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDataset {
    pub pairs: Vec<(String, String, f64)>,
}

impl SimilarityDataset {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file), &path.display().to_string())
    }

    /// Lines "word1 word2 score", separated by tabs, commas, or spaces.
    /// '#'-prefixed and blank lines are skipped.
    pub fn read_from(reader: impl BufRead, origin: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let normalized = line.replace([',', '\t'], " ");
            let fields: Vec<&str> = normalized.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::DatasetFormat {
                    path: origin.to_string(),
                    line: i + 1,
                    message: format!("expected \"word1 word2 score\", got {} fields", fields.len()),
                });
            }
            let score: f64 = fields[2].parse().map_err(|_| Error::DatasetFormat {
                path: origin.to_string(),
                line: i + 1,
                message: format!("score {:?} is not a number", fields[2]),
            })?;
            pairs.push((fields[0].to_string(), fields[1].to_string(), score));
        }
        Ok(SimilarityDataset { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Analogy questions in named groups, questions-words layout.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogyDataset {
    pub groups: Vec<AnalogyGroup>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalogyGroup {
    pub name: String,
    pub questions: Vec<[String; 4]>,
}

impl AnalogyDataset {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file), &path.display().to_string())
    }

    /// ": <group-name>" lines start a group; question lines hold exactly four
    /// distinct whitespace-separated tokens. Files without any header form a
    /// single implicit group named "all".
    pub fn read_from(reader: impl BufRead, origin: &str) -> Result<Self> {
        let mut groups: Vec<AnalogyGroup> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(':') {
                let name = rest.trim();
                if name.is_empty() {
                    return Err(Error::DatasetFormat {
                        path: origin.to_string(),
                        line: i + 1,
                        message: "empty group name after ':'".to_string(),
                    });
                }
                groups.push(AnalogyGroup {
                    name: name.to_string(),
                    questions: Vec::new(),
                });
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 4 {
                return Err(Error::DatasetFormat {
                    path: origin.to_string(),
                    line: i + 1,
                    message: format!("expected 4 tokens, got {}", tokens.len()),
                });
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    if tokens[a] == tokens[b] {
                        return Err(Error::DatasetFormat {
                            path: origin.to_string(),
                            line: i + 1,
                            message: format!("question tokens must be distinct, {:?} repeats", tokens[a]),
                        });
                    }
                }
            }
            if groups.is_empty() {
                groups.push(AnalogyGroup {
                    name: "all".to_string(),
                    questions: Vec::new(),
                });
            }
            let q = [
                tokens[0].to_string(),
                tokens[1].to_string(),
                tokens[2].to_string(),
                tokens[3].to_string(),
            ];
            groups.last_mut().unwrap().questions.push(q);
        }
        Ok(AnalogyDataset { groups })
    }

    pub fn n_questions(&self) -> usize {
        self.groups.iter().map(|g| g.questions.len()).sum()
    }
}

/// Ranks with ties averaged: values equal after total ordering share the mean
/// of the positions they span (1-based).
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for k in 0..x.len() {
        let (dx, dy) = (x[k] - mx, y[k] - my);
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::DegenerateRanks("constant input has zero rank variance"));
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::DegenerateRanks("fewer than two observations"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    /// Spearman correlation multiplied by 100, the conventional reporting
    /// scale for word-similarity benchmarks.
    pub spearman_x100: f64,
    pub n_used: usize,
    pub n_oov: usize,
}

/// Cosine of u-means against human scores over the in-vocabulary pairs.
pub fn eval_word_similarity(model: &Model, dataset: &SimilarityDataset) -> Result<SimilarityScore> {
    let mut human = Vec::new();
    let mut predicted = Vec::new();
    let mut n_oov = 0;
    for (wa, wb, score) in &dataset.pairs {
        let (Some(a), Some(b)) = (model.vocab.lookup(wa), model.vocab.lookup(wb)) else {
            n_oov += 1;
            continue;
        };
        let ua = &model.u_bank[a as usize].mean;
        let ub = &model.u_bank[b as usize].mean;
        predicted.push(similarity::cosine(ua, ub)?);
        human.push(*score);
    }
    if human.is_empty() {
        return Err(Error::NoUsableData(
            "every similarity pair contains an out-of-vocabulary word".to_string(),
        ));
    }
    Ok(SimilarityScore {
        spearman_x100: 100.0 * spearman(&predicted, &human)?,
        n_used: human.len(),
        n_oov,
    })
}

/// Accuracy bookkeeping for one analogy group (or the total).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupResult {
    pub name: String,
    pub n_questions: usize,
    pub n_used: usize,
    pub n_correct: usize,
    /// Questions evaluated but with no rankable candidate (the candidate set
    /// or the offset vector was empty); they count against accuracy.
    pub n_unanswerable: usize,
}

impl GroupResult {
    pub fn accuracy(&self) -> Option<f64> {
        (self.n_used > 0).then(|| self.n_correct as f64 / self.n_used as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyReport {
    pub groups: Vec<GroupResult>,
    pub total: GroupResult,
}

enum QuestionOutcome {
    Oov,
    Correct,
    Wrong,
    Unanswerable,
}

/// Normalized u-means; `None` marks an all-zero mean, which can never be
/// ranked by cosine.
fn unit_means(model: &Model) -> Vec<Option<DVector<f64>>> {
    model
        .u_bank
        .iter()
        .map(|f| {
            let n = f.mean.norm();
            (n > 0.0).then(|| &f.mean / n)
        })
        .collect()
}

fn answer_question(
    model: &Model,
    units: &[Option<DVector<f64>>],
    q: &[String; 4],
) -> QuestionOutcome {
    let ids: Option<Vec<u32>> = q.iter().map(|w| model.vocab.lookup(w)).collect();
    let Some(ids) = ids else {
        return QuestionOutcome::Oov;
    };
    let (a, b, c, d) = (ids[0], ids[1], ids[2], ids[3]);
    let target = &model.u_bank[b as usize].mean - &model.u_bank[a as usize].mean
        + &model.u_bank[c as usize].mean;
    if target.norm() == 0.0 {
        return QuestionOutcome::Unanswerable;
    }
    let mut best: Option<(u32, f64)> = None;
    for id in 0..model.vocab.len() as u32 {
        if id == a || id == b || id == c {
            continue;
        }
        let Some(unit) = &units[id as usize] else {
            continue;
        };
        let score = unit.dot(&target);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((id, score));
        }
    }
    match best {
        Some((winner, _)) if winner == d => QuestionOutcome::Correct,
        Some(_) => QuestionOutcome::Wrong,
        None => QuestionOutcome::Unanswerable,
    }
}

/// Evaluate every group; OOV questions are discarded but kept in
/// `n_questions`. Unanswerable questions stay inside `n_used` and count as
/// incorrect.
pub fn eval_analogy(model: &Model, dataset: &AnalogyDataset) -> Result<AnalogyReport> {
    let units = unit_means(model);
    let mut groups = Vec::with_capacity(dataset.groups.len());
    let mut total = GroupResult {
        name: "TOTAL".to_string(),
        n_questions: 0,
        n_used: 0,
        n_correct: 0,
        n_unanswerable: 0,
    };
    for group in &dataset.groups {
        let outcomes: Vec<QuestionOutcome> = group
            .questions
            .par_iter()
            .map(|q| answer_question(model, &units, q))
            .collect();
        let mut result = GroupResult {
            name: group.name.clone(),
            n_questions: group.questions.len(),
            n_used: 0,
            n_correct: 0,
            n_unanswerable: 0,
        };
        for outcome in outcomes {
            match outcome {
                QuestionOutcome::Oov => {}
                QuestionOutcome::Correct => {
                    result.n_used += 1;
                    result.n_correct += 1;
                }
                QuestionOutcome::Wrong => {
                    result.n_used += 1;
                }
                QuestionOutcome::Unanswerable => {
                    result.n_used += 1;
                    result.n_unanswerable += 1;
                }
            }
        }
        total.n_questions += result.n_questions;
        total.n_used += result.n_used;
        total.n_correct += result.n_correct;
        total.n_unanswerable += result.n_unanswerable;
        groups.push(result);
    }
    if total.n_used == 0 {
        return Err(Error::NoUsableData(
            "every analogy question contains an out-of-vocabulary word".to_string(),
        ));
    }
    Ok(AnalogyReport { groups, total })
}

/// Single interactive analogy query: ranked completions of "a : b :: c : ?",
/// excluding the cue words, scored by cosine of u-means.
pub fn analogy_candidates(
    model: &Model,
    wa: &str,
    wb: &str,
    wc: &str,
    k: usize,
) -> Result<Vec<Neighbor>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let id_of = |w: &str| {
        model
            .vocab
            .lookup(w)
            .ok_or_else(|| Error::UnknownWord(w.to_string()))
    };
    let (a, b, c) = (id_of(wa)?, id_of(wb)?, id_of(wc)?);
    let target = &model.u_bank[b as usize].mean - &model.u_bank[a as usize].mean
        + &model.u_bank[c as usize].mean;
    let norm = target.norm();
    if norm == 0.0 {
        return Err(Error::NoUsableData(
            "offset vector is zero; cosine ranking undefined".to_string(),
        ));
    }
    let mut scored: Vec<(u32, f64)> = Vec::new();
    for id in 0..model.vocab.len() as u32 {
        if id == a || id == b || id == c {
            continue;
        }
        let mean = &model.u_bank[id as usize].mean;
        let n = mean.norm();
        if n == 0.0 {
            continue;
        }
        scored.push((id, mean.dot(&target) / (n * norm)));
    }
    if scored.is_empty() {
        return Err(Error::NoUsableData(
            "no candidate words remain after excluding the cue words".to_string(),
        ));
    }
    scored.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    scored.truncate(k);
    Ok(scored
        .into_iter()
        .map(|(id, score)| Neighbor {
            word: model.vocab.word(id).to_string(),
            score,
            confidence: None,
        })
        .collect())
}

/// TSV report: one row per group plus the TOTAL row. Accuracy is printed as
/// a percentage with two decimals, "-" when a group had no usable question.
pub fn write_analogy_report(report: &AnalogyReport, out: &mut impl Write) -> Result<()> {
    writeln!(out, "group\tn_questions\tn_used\taccuracy")?;
    for g in report.groups.iter().chain(std::iter::once(&report.total)) {
        let accuracy = match g.accuracy() {
            Some(a) => format!("{:.2}", 100.0 * a),
            None => "-".to_string(),
        };
        writeln!(out, "{}\t{}\t{}\t{}", g.name, g.n_questions, g.n_used, accuracy)?;
    }
    Ok(())
}
