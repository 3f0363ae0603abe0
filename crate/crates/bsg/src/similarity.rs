//! Similarity between trained word factors.
//!
//! Cosine over posterior means is the classic point-estimate measure. The
//! density-aware measures use the full diagonal posteriors: the moments of
//! the random dot product uᵀv (whose negated variance acts as a confidence),
//! a probit-style approximation of the expected link probability E[σ(uᵀv)],
//! and the negated symmetric KL divergence.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::trainer::Model;
use crate::vb::{self, GaussianFactor};

/// Mean and variance of y = uᵀv for independent diagonal Gaussian factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotMoments {
    pub mean: f64,
    /// Exact variance; its negation is the confidence attached to cosine
    /// rankings.
    pub variance: f64,
}

/// Cosine of two mean vectors.
pub fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(a.dot(b) / (na * nb))
}

pub fn dot_moments(fi: &GaussianFactor, fj: &GaussianFactor) -> DotMoments {
    dot_moments_parts(
        fi.mean.as_slice(),
        fi.var_diag.as_slice(),
        fj.mean.as_slice(),
        fj.var_diag.as_slice(),
    )
}

fn dot_moments_parts(mean_i: &[f64], var_i: &[f64], mean_j: &[f64], var_j: &[f64]) -> DotMoments {
    let mean = mean_i
        .iter()
        .zip(mean_j)
        .map(|(a, b)| a * b)
        .sum::<f64>();
    DotMoments {
        mean,
        variance: vb::dot_variance_parts(mean_i, var_i, mean_j, var_j),
    }
}

/// Approximate E[σ(uᵀv)] by treating uᵀv as Gaussian and applying the probit
/// matching σ(μ_y / √(1 + σ²_y π/8)).
pub fn link_probability(fi: &GaussianFactor, fj: &GaussianFactor) -> f64 {
    link_probability_of(dot_moments(fi, fj))
}

fn link_probability_of(moments: DotMoments) -> f64 {
    vb::sigmoid(moments.mean / (1.0 + moments.variance * PI / 8.0).sqrt())
}

/// KL(fi ‖ fj) between the diagonal posteriors.
pub fn kl_gaussian(fi: &GaussianFactor, fj: &GaussianFactor) -> Result<f64> {
    kl_parts(
        fi.mean.as_slice(),
        fi.var_diag.as_slice(),
        fj.mean.as_slice(),
        fj.var_diag.as_slice(),
    )
}

fn kl_parts(mean_i: &[f64], var_i: &[f64], mean_j: &[f64], var_j: &[f64]) -> Result<f64> {
    if var_i.iter().chain(var_j).any(|&v| v <= 0.0) {
        return Err(Error::NonPositiveVariance);
    }
    let mut acc = 0.0;
    for k in 0..mean_i.len() {
        let d = mean_i[k] - mean_j[k];
        acc += (var_j[k] / var_i[k]).ln() + (var_i[k] + d * d) / var_j[k] - 1.0;
    }
    Ok(0.5 * acc)
}

/// −KL(fi‖fj) − KL(fj‖fi): symmetric, at most 0, and 0 only for identical
/// factors. Written as 0 − a − b so identical factors yield +0.0, not −0.0.
pub fn sym_kl_similarity(fi: &GaussianFactor, fj: &GaussianFactor) -> Result<f64> {
    Ok(0.0 - kl_gaussian(fi, fj)? - kl_gaussian(fj, fi)?)
}

fn sym_kl_parts(mean_i: &[f64], var_i: &[f64], mean_j: &[f64], var_j: &[f64]) -> Result<f64> {
    Ok(0.0 - kl_parts(mean_i, var_i, mean_j, var_j)? - kl_parts(mean_j, var_j, mean_i, var_i)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Cosine,
    LinkProb,
    SymKl,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Measure::Cosine),
            "link_prob" | "link-prob" => Ok(Measure::LinkProb),
            "sym_kl" | "sym-kl" => Ok(Measure::SymKl),
            other => Err(Error::InvalidArgument(format!(
                "unknown measure {other:?}, expected cosine, link_prob, or sym_kl"
            ))),
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Measure::Cosine => "cosine",
            Measure::LinkProb => "link_prob",
            Measure::SymKl => "sym_kl",
        })
    }
}

/// Which side of the model a query reads. `Sum` adds the two independent
/// posteriors coordinate-wise: means add, variances add.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    U,
    V,
    Sum,
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(Representation::U),
            "v" => Ok(Representation::V),
            "sum" | "u+v" => Ok(Representation::Sum),
            other => Err(Error::InvalidArgument(format!(
                "unknown representation {other:?}, expected u, v, or sum"
            ))),
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Representation::U => "u",
            Representation::V => "v",
            Representation::Sum => "sum",
        })
    }
}

/// One ranked neighbor. `confidence` is populated for cosine queries only:
/// the negated variance of the dot product between the two posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word: String,
    pub score: f64,
    pub confidence: Option<f64>,
}

/// Mean and variance slices for one word under a chosen representation.
/// Borrows the bank directly except for `Sum`, which owns the added moments.
enum Repr<'a> {
    Borrowed(&'a GaussianFactor),
    Owned { mean: Vec<f64>, var: Vec<f64> },
}

impl Repr<'_> {
    fn mean(&self) -> &[f64] {
        match self {
            Repr::Borrowed(f) => f.mean.as_slice(),
            Repr::Owned { mean, .. } => mean,
        }
    }

    fn var(&self) -> &[f64] {
        match self {
            Repr::Borrowed(f) => f.var_diag.as_slice(),
            Repr::Owned { var, .. } => var,
        }
    }
}

fn repr_of(model: &Model, id: u32, representation: Representation) -> Repr<'_> {
    let i = id as usize;
    match representation {
        Representation::U => Repr::Borrowed(&model.u_bank[i]),
        Representation::V => Repr::Borrowed(&model.v_bank[i]),
        Representation::Sum => {
            let (u, v) = (&model.u_bank[i], &model.v_bank[i]);
            Repr::Owned {
                mean: u.mean.iter().zip(v.mean.iter()).map(|(a, b)| a + b).collect(),
                var: u
                    .var_diag
                    .iter()
                    .zip(v.var_diag.iter())
                    .map(|(a, b)| a + b)
                    .collect(),
            }
        }
    }
}

fn cosine_parts(a: &[f64], b: &[f64]) -> Result<f64> {
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    Ok(dot / (na * nb))
}

/// Top-`k` vocabulary words closest to `word`, excluding the word itself.
/// Cosine ranks by the representation means and attaches −σ²_y confidences;
/// the density measures rank over the diagonal posteriors. Ties break toward
/// the more frequent (lower-id) word; `k` past the vocabulary end is clamped.
pub fn nearest_neighbors(
    model: &Model,
    word: &str,
    k: usize,
    measure: Measure,
    representation: Representation,
) -> Result<Vec<Neighbor>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let query = model
        .vocab
        .lookup(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let q = repr_of(model, query, representation);

    let mut scored: Vec<(u32, f64, Option<f64>)> = Vec::with_capacity(model.vocab.len() - 1);
    for id in 0..model.vocab.len() as u32 {
        if id == query {
            continue;
        }
        let r = repr_of(model, id, representation);
        let (score, confidence) = match measure {
            Measure::Cosine => {
                let moments = dot_moments_parts(q.mean(), q.var(), r.mean(), r.var());
                (cosine_parts(q.mean(), r.mean())?, Some(-moments.variance))
            }
            Measure::LinkProb => (
                link_probability_of(dot_moments_parts(q.mean(), q.var(), r.mean(), r.var())),
                None,
            ),
            Measure::SymKl => (sym_kl_parts(q.mean(), q.var(), r.mean(), r.var())?, None),
        };
        scored.push((id, score, confidence));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored
        .into_iter()
        .map(|(id, score, confidence)| Neighbor {
            word: model.vocab.word(id).to_string(),
            score,
            confidence,
        })
        .collect())
}
