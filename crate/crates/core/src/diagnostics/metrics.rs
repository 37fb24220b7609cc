use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::OutcomeDistribution;

/// Threshold for comparisons between exactly computed probabilities.
pub const EPS_EXACT: f64 = 1e-6;

/// `½ Σ |p − q|` over identically labeled distributions.
pub fn tv_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    p.total_variation(q)
}

/// `½ Σ |p − q|` on raw probability vectors of equal length.
pub fn tv(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LabelMismatch);
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Hoeffding deviation `sqrt(ln(2/δ) / (2n))` for one estimated distribution.
pub fn statistical_threshold(shots: u64, delta: f64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence parameter {delta} outside (0, 1)"
        )));
    }
    Ok(((2.0 / delta).ln() / (2.0 * shots as f64)).sqrt())
}

/// Threshold for comparing two independently estimated distributions: twice the one-sample value.
pub fn two_sample_threshold(shots: u64, delta: f64) -> Result<f64> {
    Ok(2.0 * statistical_threshold(shots, delta)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexFitResult {
    /// Weight on the `c = 0` conditional; the `c = 1` weight is `1 − lambda_star`.
    pub lambda_star: f64,
    /// `min_λ TV(P₊, λP₀ + (1−λ)P₁)`.
    pub residual: f64,
}

const GOLDEN_TOL: f64 = 1e-6;

fn mixture_tv(p_plus: &[f64], p0: &[f64], p1: &[f64], l: f64) -> f64 {
    0.5 * p_plus
        .iter()
        .zip(p0.iter().zip(p1))
        .map(|(pp, (a, b))| (pp - (l * a + (1.0 - l) * b)).abs())
        .sum::<f64>()
}

/// Distance from `P₊` to the segment between `P₀` and `P₁`.
///
/// The objective is convex and piecewise linear in λ. Golden-section search brackets the
/// minimum to 1e-6; the kinks `λ_k = (P₊_k − P₁_k)/(P₀_k − P₁_k)` and the endpoints are then
/// evaluated exactly, so an exact mixture yields a residual at roundoff level.
pub fn fit_convex_mixture(p_plus: &[f64], p0: &[f64], p1: &[f64]) -> Result<ConvexFitResult> {
    if p_plus.len() != p0.len() || p0.len() != p1.len() {
        return Err(Error::LabelMismatch);
    }
    let f = |l: f64| mixture_tv(p_plus, p0, p1, l);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut candidates = vec![0.5 * (lo + hi), 0.0, 1.0];
    for k in 0..p_plus.len() {
        let den = p0[k] - p1[k];
        if den.abs() > 1e-15 {
            let l = (p_plus[k] - p1[k]) / den;
            if (0.0..=1.0).contains(&l) {
                candidates.push(l);
            }
        }
    }
    let mut best = ConvexFitResult {
        lambda_star: candidates[0],
        residual: f(candidates[0]),
    };
    for &l in &candidates[1..] {
        let r = f(l);
        if r < best.residual {
            best = ConvexFitResult {
                lambda_star: l,
                residual: r,
            };
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ConsistentClassical,
    CausalSuperpositionLikely,
    FragileSignal,
    RobustViolation,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ConsistentClassical => "consistent-classical",
            Classification::CausalSuperpositionLikely => "causal-superposition-likely",
            Classification::FragileSignal => "fragile-signal",
            Classification::RobustViolation => "robust-violation",
        }
    }
}

/// Decision table over `Δ_CD` at control values `[0, 1, +]`.
///
/// No ideal discrepancy above `eps`: fragile if a noisy one is, else consistent-classical.
/// Otherwise superposition-likely when only `+` exceeds `eps` in the ideal run, and
/// robust-violation for every remaining pattern.
pub fn classify(ideal: [f64; 3], noisy: Option<[f64; 3]>, eps: f64) -> Result<Classification> {
    let all = ideal.iter().chain(noisy.iter().flatten());
    if all.clone().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidArgument(
            "discrepancies must be finite and non-negative".into(),
        ));
    }
    let above = |d: &f64| *d > eps;
    if !ideal.iter().any(above) {
        return Ok(match noisy {
            Some(n) if n.iter().any(above) => Classification::FragileSignal,
            _ => Classification::ConsistentClassical,
        });
    }
    if !above(&ideal[0]) && !above(&ideal[1]) && above(&ideal[2]) {
        return Ok(Classification::CausalSuperpositionLikely);
    }
    Ok(Classification::RobustViolation)
}
