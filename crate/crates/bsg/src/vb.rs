//! Variational core: Gaussian word factors, the quadratic logistic bound,
//! bound tightening, natural-parameter accumulation, stochastic blending,
//! and moment recovery via Cholesky inversion.
//!
//! Each word carries two factors (target and context side). An update
//! rebuilds a factor's natural parameters from its adjacency in the current
//! batch, blends them with the previous iteration's values, and recovers
//! moments, keeping only the diagonal of the covariance while the precision
//! stays full.

use nalgebra::{DMatrix, DVector};

use crate::corpus::{AdjEntry, TrainingBatch};
use crate::error::{Error, Result};

/// One Gaussian factor q(x) = N(mean, Σ) with diag(Σ) in moment form and the
/// full natural parameters retained for cross-iteration blending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFactor {
    /// Posterior mean μ.
    pub mean: DVector<f64>,
    /// Diagonal of Σ; the off-diagonal part is discarded after each recovery.
    pub var_diag: DVector<f64>,
    /// Full precision P = Σ⁻¹ as accumulated (never diagonalized).
    pub precision: DMatrix<f64>,
    /// Natural mean r = Pμ.
    pub nat_mean: DVector<f64>,
    /// P from the start of the current iteration; blending anchor.
    pub prev_precision: DMatrix<f64>,
    /// r from the start of the current iteration.
    pub prev_nat_mean: DVector<f64>,
}

impl GaussianFactor {
    /// Fresh factor with the given mean, unit variances, P = I, and r = Pμ = μ.
    /// Previous-iteration snapshots start equal to the current values.
    pub fn init(mean: DVector<f64>) -> Self {
        let m = mean.len();
        let precision = DMatrix::identity(m, m);
        GaussianFactor {
            var_diag: DVector::from_element(m, 1.0),
            precision: precision.clone(),
            nat_mean: mean.clone(),
            prev_precision: precision,
            prev_nat_mean: mean.clone(),
            mean,
        }
    }

    /// Factor with the given moments and the consistent diagonal natural
    /// parameters P = diag(1/σ²), r = Pμ. All variances must be positive.
    pub fn from_moments(mean: DVector<f64>, var_diag: DVector<f64>) -> Self {
        assert_eq!(mean.len(), var_diag.len());
        assert!(var_diag.iter().all(|&v| v > 0.0));
        let precision = DMatrix::from_diagonal(&var_diag.map(|v| 1.0 / v));
        let nat_mean = &precision * &mean;
        GaussianFactor {
            mean,
            var_diag,
            prev_precision: precision.clone(),
            prev_nat_mean: nat_mean.clone(),
            precision,
            nat_mean,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Record the current natural parameters as the blending anchor for the
    /// iteration that is about to run.
    pub fn snapshot_prev(&mut self) {
        self.prev_precision.copy_from(&self.precision);
        self.prev_nat_mean.copy_from(&self.nat_mean);
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Embedding dimension m.
    pub dim: usize,
    /// Prior precision τ of the isotropic Gaussian prior N(0, τ⁻¹I).
    pub tau: f64,
    /// Maximum number of iterations K, warm-up included.
    pub max_iterations: usize,
    /// Largest window size; each position draws uniformly from 1..=max_window.
    pub max_window: usize,
    /// Vocabulary size cap l.
    pub vocab_size: usize,
    /// Subsampling threshold ρ: keep probability is min(1, √(ρ/f(w))).
    pub subsample_threshold: f64,
    /// Negative samples N per positive instance.
    pub negatives: usize,
    /// Warm-up iterations κ with full-replacement updates (β = 1).
    pub warmup_iterations: usize,
    /// Stopping threshold ε on the summed natural-mean movement.
    pub stop_threshold: f64,
    /// Decay exponent γ of the step size β = k^(−γ), required in (0.5, 1].
    pub decay: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            dim: 40,
            tau: 1.0,
            max_iterations: 40,
            max_window: 4,
            vocab_size: 30_000,
            subsample_threshold: 1e-5,
            negatives: 1,
            warmup_iterations: 10,
            stop_threshold: 1e-4,
            decay: 0.7,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |name: &'static str, reason: String| {
            Err(Error::InvalidHyperparameter { name, reason })
        };
        if self.dim == 0 {
            return fail("dim", "must be at least 1".into());
        }
        if self.tau.is_nan() || self.tau <= 0.0 {
            return fail("tau", format!("must be positive, got {}", self.tau));
        }
        if self.max_iterations == 0 {
            return fail("max_iterations", "must be at least 1".into());
        }
        if self.max_window == 0 {
            return fail("max_window", "must be at least 1".into());
        }
        if self.vocab_size == 0 {
            return fail("vocab_size", "must be at least 1".into());
        }
        if self.subsample_threshold.is_nan() || self.subsample_threshold <= 0.0 {
            return fail(
                "subsample_threshold",
                format!("must be positive, got {}", self.subsample_threshold),
            );
        }
        if self.stop_threshold.is_nan() || self.stop_threshold < 0.0 {
            return fail(
                "stop_threshold",
                format!("must be non-negative, got {}", self.stop_threshold),
            );
        }
        if !(self.decay > 0.5 && self.decay <= 1.0) {
            return fail("decay", format!("must lie in (0.5, 1], got {}", self.decay));
        }
        Ok(())
    }
}

/// Numerically safe σ(x) = 1/(1+e^(−x)).
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log σ(x) without overflow in either tail.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Curvature λ(ξ) = (σ(ξ) − 1/2)/(2ξ) of the quadratic logistic bound.
/// The singularity at 0 is removable; below 1e−6 the Taylor limit 1/8 is used.
pub fn lambda_xi(xi: f64) -> f64 {
    debug_assert!(xi >= 0.0);
    if xi < 1e-6 {
        0.125
    } else {
        (sigmoid(xi) - 0.5) / (2.0 * xi)
    }
}

/// Exact variance of uᵀv for independent diagonal Gaussians:
/// Σ_k (σ²_{u,k}σ²_{v,k} + σ²_{u,k}μ²_{v,k} + σ²_{v,k}μ²_{u,k}).
pub fn dot_variance(fu: &GaussianFactor, fv: &GaussianFactor) -> f64 {
    dot_variance_parts(
        fu.mean.as_slice(),
        fu.var_diag.as_slice(),
        fv.mean.as_slice(),
        fv.var_diag.as_slice(),
    )
}

/// Same identity over raw mean/variance slices.
pub fn dot_variance_parts(mean_u: &[f64], var_u: &[f64], mean_v: &[f64], var_v: &[f64]) -> f64 {
    debug_assert_eq!(mean_u.len(), mean_v.len());
    let mut acc = 0.0;
    for k in 0..mean_u.len() {
        let (su, sv) = (var_u[k], var_v[k]);
        let (mu, mv) = (mean_u[k], mean_v[k]);
        acc += su * sv + su * mv * mv + sv * mu * mu;
    }
    acc
}

/// Optimal bound tightening: ξ with ξ² = E[(uᵀv)²] = var(uᵀv) + (μ_uᵀμ_v)².
pub fn compute_xi(fu: &GaussianFactor, fv: &GaussianFactor) -> f64 {
    let mean_dot = fu.mean.dot(&fv.mean);
    (dot_variance(fu, fv) + mean_dot * mean_dot).sqrt()
}

/// Natural parameters of the optimal factor given its batch adjacency and the
/// opposite bank:
///   P = τI + Σ_j 2λ(ξ_j)·c_j·(diag(σ²_j) + μ_jμ_jᵀ)
///   r = ½ Σ_j d_j·c_j·μ_j
/// with ξ_j recomputed from the current moments of `factor` and each
/// neighbor. The sign d_j enters only r; λ depends on ξ², which is sign-free.
pub fn accumulate_natural_params(
    factor: &GaussianFactor,
    adjacency: &[AdjEntry],
    opposite: &[GaussianFactor],
    tau: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let m = factor.dim();
    let mut precision = DMatrix::from_diagonal_element(m, m, tau);
    let mut nat_mean = DVector::zeros(m);
    for entry in adjacency {
        let other = &opposite[entry.other as usize];
        let count = f64::from(entry.count);
        let weight = 2.0 * lambda_xi(compute_xi(factor, other)) * count;
        for i in 0..m {
            precision[(i, i)] += weight * other.var_diag[i];
            let wi = weight * other.mean[i];
            for j in i..m {
                precision[(i, j)] += wi * other.mean[j];
            }
        }
        nat_mean.axpy(0.5 * f64::from(entry.sign) * count, &other.mean, 1.0);
    }
    // Only the upper triangle was accumulated; mirroring it afterwards makes
    // the matrix symmetric bit for bit, which serialization relies on.
    for i in 0..m {
        for j in i + 1..m {
            precision[(j, i)] = precision[(i, j)];
        }
    }
    (precision, nat_mean)
}

/// Step size of the stochastic update: 1 during warm-up (k ≤ 0), k^(−γ) after.
pub fn beta_schedule(k: i64, gamma: f64) -> f64 {
    if k <= 0 {
        1.0
    } else {
        (k as f64).powf(-gamma)
    }
}

/// Convex combination βP_new + (1−β)P_prev, and the same for r.
pub fn blend_stochastic(
    new_precision: &DMatrix<f64>,
    new_nat_mean: &DVector<f64>,
    prev_precision: &DMatrix<f64>,
    prev_nat_mean: &DVector<f64>,
    beta: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    debug_assert!(beta > 0.0 && beta <= 1.0);
    if beta >= 1.0 {
        return (new_precision.clone(), new_nat_mean.clone());
    }
    (
        new_precision * beta + prev_precision * (1.0 - beta),
        new_nat_mean * beta + prev_nat_mean * (1.0 - beta),
    )
}

/// Moment recovery: Σ = P⁻¹ by Cholesky, μ = Σr; returns (μ, diag(Σ)).
/// P is accumulated from PSD addends on top of τI, so a Cholesky failure
/// means upstream corruption; it surfaces as an error, never as jitter.
pub fn recover_moments(
    precision: &DMatrix<f64>,
    nat_mean: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let chol = precision
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("precision matrix".into()))?;
    let mean = chol.solve(nat_mean);
    let var_diag = chol.inverse().diagonal();
    Ok((mean, var_diag))
}

/// KL(N(μ_a, diag v_a) ‖ N(μ_b, diag v_b)) for diagonal Gaussians, as the sum
/// of per-coordinate one-dimensional divergences.
pub fn kl_diagonal(
    mean_a: &DVector<f64>,
    var_a: &DVector<f64>,
    mean_b: &DVector<f64>,
    var_b: &DVector<f64>,
) -> f64 {
    debug_assert_eq!(mean_a.len(), mean_b.len());
    let mut acc = 0.0;
    for k in 0..mean_a.len() {
        let d = mean_a[k] - mean_b[k];
        acc += (var_b[k] / var_a[k]).ln() + (var_a[k] + d * d) / var_b[k] - 1.0;
    }
    0.5 * acc
}

/// Evidence lower bound of the batch under the current factors:
///   Σ_pairs c·(½(d·μ_uᵀμ_v − ξ) + log σ(ξ)) − Σ_factors KL(q ‖ N(0, τ⁻¹I))
/// with ξ recomputed per pair by `compute_xi`, at which point the bound's
/// quadratic remainder λ(ξ)(E[(uᵀv)²] − ξ²) vanishes identically.
///
/// Diagnostic only; training itself never evaluates it.
pub fn elbo(
    u_bank: &[GaussianFactor],
    v_bank: &[GaussianFactor],
    batch: &TrainingBatch,
    tau: f64,
) -> f64 {
    let mut total = 0.0;
    for (i, adjacency) in batch.u_adj.iter().enumerate() {
        let u = &u_bank[i];
        for entry in adjacency {
            let v = &v_bank[entry.other as usize];
            let xi = compute_xi(u, v);
            let dot = u.mean.dot(&v.mean);
            total += f64::from(entry.count)
                * (0.5 * (f64::from(entry.sign) * dot - xi) + log_sigmoid(xi));
        }
    }
    let m = u_bank.first().map_or(0, GaussianFactor::dim);
    let prior_mean = DVector::zeros(m);
    let prior_var = DVector::from_element(m, 1.0 / tau);
    for factor in u_bank.iter().chain(v_bank) {
        total -= kl_diagonal(&factor.mean, &factor.var_diag, &prior_mean, &prior_var);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dv(values: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(values)
    }

    #[test]
    fn lambda_limit_and_frozen_values() {
        assert_eq!(lambda_xi(0.0), 0.125);
        assert!((lambda_xi(1e-8) - 0.125).abs() < 1e-9);
        assert_relative_eq!(lambda_xi(1.0), 0.1155292893, epsilon = 1e-9);
        assert_relative_eq!(lambda_xi(2.0), 0.0951992695, epsilon = 1e-9);
        assert_relative_eq!(lambda_xi(2f64.sqrt()), 0.1076321464, epsilon = 1e-9);
        assert!(lambda_xi(1.0) > lambda_xi(2.0));
    }

    #[test]
    fn lambda_is_strictly_decreasing() {
        let mut prev = lambda_xi(0.0);
        for step in 1..=100 {
            let cur = lambda_xi(step as f64 * 0.1);
            assert!(cur < prev, "lambda must decrease at xi = {}", step as f64 * 0.1);
            prev = cur;
        }
    }

    #[test]
    fn log_sigmoid_is_stable_in_both_tails() {
        assert_relative_eq!(log_sigmoid(1.0), -0.3132616875, epsilon = 1e-9);
        assert!(log_sigmoid(800.0) > -1e-300);
        assert_relative_eq!(log_sigmoid(-800.0), -800.0, epsilon = 1e-9);
        assert!(log_sigmoid(-800.0).is_finite());
    }

    #[test]
    fn dot_variance_matches_hand_cases() {
        let fu = GaussianFactor::from_moments(dv(&[2.0]), dv(&[1.0]));
        let fv = GaussianFactor::from_moments(dv(&[3.0]), dv(&[1.0]));
        assert_relative_eq!(dot_variance(&fu, &fv), 14.0, epsilon = 1e-12);

        // Nearly deterministic factors: variance scales away with σ².
        let fu = GaussianFactor::from_moments(dv(&[2.0, -1.0]), dv(&[1e-300, 1e-300]));
        let fv = GaussianFactor::from_moments(dv(&[3.0, 5.0]), dv(&[1e-300, 1e-300]));
        assert!(dot_variance(&fu, &fv) < 1e-290);

        let m = 7;
        let fu = GaussianFactor::init(DVector::zeros(m));
        let fv = GaussianFactor::init(DVector::zeros(m));
        assert_relative_eq!(dot_variance(&fu, &fv), m as f64, epsilon = 1e-12);
    }

    #[test]
    fn xi_is_the_root_second_moment() {
        let m = 5;
        let fu = GaussianFactor::init(DVector::zeros(m));
        let fv = GaussianFactor::init(DVector::zeros(m));
        assert_relative_eq!(compute_xi(&fu, &fv), (m as f64).sqrt(), epsilon = 1e-12);

        let fu = GaussianFactor::from_moments(dv(&[0.0]), dv(&[1.0]));
        let fv = GaussianFactor::from_moments(dv(&[1.0]), dv(&[1.0]));
        assert_relative_eq!(compute_xi(&fu, &fv), 2f64.sqrt(), epsilon = 1e-12);

        // m = 2 hand expansion: E[(u'v)^2] = var + (mu_u . mu_v)^2.
        let fu = GaussianFactor::from_moments(dv(&[1.0, 2.0]), dv(&[0.5, 0.25]));
        let fv = GaussianFactor::from_moments(dv(&[-1.0, 1.0]), dv(&[2.0, 1.0]));
        let var: f64 = 0.5 * 2.0 + 0.5 * 1.0 + 2.0 * 1.0
            + 0.25 * 1.0 + 0.25 * 1.0 + 1.0 * 4.0;
        let dot: f64 = -1.0 + 2.0;
        assert_relative_eq!(compute_xi(&fu, &fv), (var + dot * dot).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn logistic_bound_holds_with_equality_at_matching_xi() {
        // log σ(a) ≥ (a−ξ)/2 − λ(ξ)(a²−ξ²) + log σ(ξ), tight at ξ = |a|.
        let bound = |a: f64, xi: f64| {
            0.5 * (a - xi) - lambda_xi(xi) * (a * a - xi * xi) + log_sigmoid(xi)
        };
        for &a in &[-3.0, -0.5, 0.0, 0.7, 2.5] {
            for &xi in &[0.0, 0.3, 1.0, 4.0] {
                assert!(log_sigmoid(a) >= bound(a, xi) - 1e-12);
            }
            assert_relative_eq!(log_sigmoid(a), bound(a, a.abs()), epsilon = 1e-12);
        }
    }

    #[test]
    fn accumulate_reproduces_the_hand_computed_update() {
        let fu = GaussianFactor::from_moments(dv(&[0.0]), dv(&[1.0]));
        let fv = GaussianFactor::from_moments(dv(&[1.0]), dv(&[1.0]));
        let adjacency = [AdjEntry { other: 0, sign: 1, count: 1 }];
        let (p, r) = accumulate_natural_params(&fu, &adjacency, std::slice::from_ref(&fv), 1.0);
        assert_relative_eq!(p[(0, 0)], 1.4305285858, epsilon = 1e-6);
        assert_relative_eq!(r[0], 0.5, epsilon = 1e-12);

        let (mean, var) = recover_moments(&p, &r).unwrap();
        assert_relative_eq!(mean[0], 0.3495211525, epsilon = 1e-6);
        assert_relative_eq!(var[0], 0.6990423050, epsilon = 1e-6);

        // The sign flips r only.
        let negative = [AdjEntry { other: 0, sign: -1, count: 1 }];
        let (p2, r2) = accumulate_natural_params(&fu, &negative, std::slice::from_ref(&fv), 1.0);
        assert_eq!(p, p2);
        assert_relative_eq!(r2[0], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn accumulate_with_empty_adjacency_shrinks_to_prior() {
        let fu = GaussianFactor::init(dv(&[0.3, -0.7, 1.1]));
        let (p, r) = accumulate_natural_params(&fu, &[], &[], 2.5);
        assert_eq!(p, DMatrix::from_diagonal_element(3, 3, 2.5));
        assert_eq!(r, DVector::zeros(3));
    }

    #[test]
    fn multiplicity_equals_repetition() {
        let fu = GaussianFactor::from_moments(dv(&[0.4, -0.2]), dv(&[0.9, 1.3]));
        let opposite = [
            GaussianFactor::from_moments(dv(&[1.0, 0.5]), dv(&[0.8, 0.6])),
            GaussianFactor::from_moments(dv(&[-0.3, 0.9]), dv(&[1.1, 0.7])),
        ];
        let counted = [
            AdjEntry { other: 0, sign: 1, count: 3 },
            AdjEntry { other: 1, sign: -1, count: 2 },
        ];
        let repeated = [
            AdjEntry { other: 0, sign: 1, count: 1 },
            AdjEntry { other: 0, sign: 1, count: 1 },
            AdjEntry { other: 0, sign: 1, count: 1 },
            AdjEntry { other: 1, sign: -1, count: 1 },
            AdjEntry { other: 1, sign: -1, count: 1 },
        ];
        let (pa, ra) = accumulate_natural_params(&fu, &counted, &opposite, 1.0);
        let (pb, rb) = accumulate_natural_params(&fu, &repeated, &opposite, 1.0);
        assert_relative_eq!(pa, pb, epsilon = 1e-12);
        assert_relative_eq!(ra, rb, epsilon = 1e-12);
    }

    #[test]
    fn accumulated_precision_is_symmetric_positive_definite() {
        let fu = GaussianFactor::from_moments(dv(&[0.4, -0.2, 0.0]), dv(&[0.9, 1.3, 0.2]));
        let opposite = [
            GaussianFactor::from_moments(dv(&[1.0, 0.5, -2.0]), dv(&[0.8, 0.6, 0.3])),
            GaussianFactor::from_moments(dv(&[-0.3, 0.9, 0.1]), dv(&[1.1, 0.7, 2.0])),
        ];
        let adjacency = [
            AdjEntry { other: 0, sign: 1, count: 5 },
            AdjEntry { other: 1, sign: -1, count: 7 },
        ];
        let (p, _) = accumulate_natural_params(&fu, &adjacency, &opposite, 0.01);
        assert_eq!(p, p.transpose());
        assert!(p.clone().cholesky().is_some());
    }

    #[test]
    fn beta_schedule_matches_the_figure() {
        assert_eq!(beta_schedule(-3, 0.7), 1.0);
        assert_eq!(beta_schedule(0, 0.7), 1.0);
        assert_eq!(beta_schedule(1, 0.7), 1.0);
        assert_relative_eq!(beta_schedule(2, 0.7), 0.6155722067, epsilon = 1e-9);
    }

    #[test]
    fn blend_cases() {
        let new_p = DMatrix::from_element(1, 1, 2.0);
        let prev_p = DMatrix::from_element(1, 1, 4.0);
        let new_r = dv(&[1.0]);
        let prev_r = dv(&[3.0]);

        let (p, r) = blend_stochastic(&new_p, &new_r, &prev_p, &prev_r, 1.0);
        assert_eq!(p, new_p);
        assert_eq!(r, new_r);

        let (p, _) = blend_stochastic(&new_p, &new_r, &new_p, &new_r, 0.5);
        assert_relative_eq!(p[(0, 0)], 2.0, epsilon = 1e-15);

        let (p, r) = blend_stochastic(&new_p, &new_r, &prev_p, &prev_r, 0.25);
        assert_relative_eq!(p[(0, 0)], 3.5, epsilon = 1e-15);
        assert_relative_eq!(r[0], 2.5, epsilon = 1e-15);
    }

    #[test]
    fn recover_moments_identity_and_failure() {
        let (mean, var) = recover_moments(&DMatrix::identity(3, 3), &DVector::zeros(3)).unwrap();
        assert_eq!(mean, DVector::zeros(3));
        assert_eq!(var, DVector::from_element(3, 1.0));

        let bad = DMatrix::from_diagonal(&dv(&[1.0, -2.0]));
        assert!(matches!(
            recover_moments(&bad, &DVector::zeros(2)),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn kl_diagonal_hand_cases() {
        let zero = dv(&[0.0]);
        let one = dv(&[1.0]);
        assert_eq!(kl_diagonal(&zero, &one, &zero, &one), 0.0);
        assert_relative_eq!(kl_diagonal(&zero, &one, &one, &one), 0.5, epsilon = 1e-12);
    }

    fn empty_batch(l: usize) -> TrainingBatch {
        TrainingBatch {
            u_adj: vec![Vec::new(); l],
            v_adj: vec![Vec::new(); l],
            n_positive: 0,
            n_negative: 0,
            skipped_negatives: 0,
        }
    }

    #[test]
    fn elbo_hand_cases() {
        // Empty batch, factors at the prior: exactly zero.
        let bank = vec![GaussianFactor::init(DVector::zeros(2))];
        assert_eq!(elbo(&bank, &bank, &empty_batch(1), 1.0), 0.0);

        // One positive pair between standard-normal factors.
        let mut batch = empty_batch(1);
        batch.u_adj[0].push(AdjEntry { other: 0, sign: 1, count: 1 });
        batch.v_adj[0].push(AdjEntry { other: 0, sign: 1, count: 1 });
        batch.n_positive = 1;
        let u = vec![GaussianFactor::init(dv(&[0.0]))];
        let v = vec![GaussianFactor::init(dv(&[0.0]))];
        assert_relative_eq!(elbo(&u, &v, &batch, 1.0), -0.8132616875, epsilon = 1e-9);

        // Swapping the banks leaves the value unchanged.
        let u = vec![GaussianFactor::from_moments(dv(&[0.6]), dv(&[0.4]))];
        let v = vec![GaussianFactor::from_moments(dv(&[-0.2]), dv(&[1.7]))];
        let mut mirrored = batch.clone();
        std::mem::swap(&mut mirrored.u_adj, &mut mirrored.v_adj);
        assert_relative_eq!(
            elbo(&u, &v, &batch, 1.0),
            elbo(&v, &u, &mirrored, 1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hyperparams_default_and_validation() {
        let hyper = HyperParams::default();
        hyper.validate().unwrap();
        assert_eq!(hyper.dim, 40);
        assert_eq!(hyper.max_window, 4);
        assert_eq!(hyper.vocab_size, 30_000);
        assert_eq!(hyper.subsample_threshold, 1e-5);
        assert_eq!(hyper.negatives, 1);
        assert_eq!(hyper.tau, 1.0);
        assert_eq!(hyper.warmup_iterations, 10);
        assert_eq!(hyper.decay, 0.7);
        assert_eq!(hyper.max_iterations, 40);

        let bad = HyperParams { decay: 0.5, ..HyperParams::default() };
        assert!(matches!(
            bad.validate(),
            Err(Error::InvalidHyperparameter { name: "decay", .. })
        ));
        let bad = HyperParams { tau: 0.0, ..HyperParams::default() };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn blend_is_a_convex_combination(
            new in -10.0..10.0f64,
            prev in -10.0..10.0f64,
            beta in 0.01..1.0f64,
        ) {
            let np = DMatrix::from_element(1, 1, new);
            let pp = DMatrix::from_element(1, 1, prev);
            let (p, _) = blend_stochastic(&np, &dv(&[new]), &pp, &dv(&[prev]), beta);
            let lo = new.min(prev) - 1e-12;
            let hi = new.max(prev) + 1e-12;
            prop_assert!(p[(0, 0)] >= lo && p[(0, 0)] <= hi);
        }

        #[test]
        fn bound_validity_random(a in -10.0..10.0f64, xi in 0.0..10.0f64) {
            let rhs = 0.5 * (a - xi) - lambda_xi(xi) * (a * a - xi * xi) + log_sigmoid(xi);
            prop_assert!(log_sigmoid(a) >= rhs - 1e-12);
        }
    }
}
