//! Finite-window surrogates for asymptotic quantities of a sequence.

use serde::{Deserialize, Serialize};

use super::trace::TraceStep;
use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;

/// `(Σ β_k ρ(y, z_k)²) / Σ β_k` over a window of points `z_k`.
pub fn cesaro_objective<S: HadamardSpace + ?Sized>(
    space: &S,
    points: &[S::Point],
    weights: &[f64],
    y: &S::Point,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::domain("empty window"));
    }
    if points.len() != weights.len() {
        return Err(Error::domain(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::domain(format!("weight {w} is not positive")));
    }
    let total: f64 = weights.iter().sum();
    let acc: f64 = points
        .iter()
        .zip(weights)
        .map(|(z, w)| w * space.distance(y, z).powi(2))
        .sum();
    Ok(acc / total)
}

/// The candidate minimizing `max_k ρ(·, z_k)`; the first one wins ties.
pub fn window_asymptotic_center<S: HadamardSpace + ?Sized>(
    space: &S,
    points: &[S::Point],
    candidates: &[S::Point],
) -> Result<S::Point> {
    if points.is_empty() || candidates.is_empty() {
        return Err(Error::domain("empty window or candidate list"));
    }
    let radius = |c: &S::Point| {
        points
            .iter()
            .map(|z| space.distance(c, z))
            .fold(0.0, f64::max)
    };
    let mut best = &candidates[0];
    let mut best_r = radius(best);
    for c in &candidates[1..] {
        let r = radius(c);
        if r < best_r {
            best = c;
            best_r = r;
        }
    }
    Ok(best.clone())
}

/// Growth of `ρ(x_n, x_1)` per unit of `σ_n` over the last two windows of
/// `window` steps, as `(previous, recent)`.
pub fn window_growth_rates(steps: &[TraceStep], window: usize) -> Option<(f64, f64)> {
    let n = steps.len();
    if window == 0 || n < 2 * window + 1 {
        return None;
    }
    let rate = |a: &TraceStep, b: &TraceStep| {
        let ds = b.sigma - a.sigma;
        (ds > 0.0).then(|| (b.dist_start - a.dist_start) / ds)
    };
    let (a, b, c) = (&steps[n - 1 - 2 * window], &steps[n - 1 - window], &steps[n - 1]);
    Some((rate(a, b)?, rate(b, c)?))
}

/// Linear-growth evidence for a trace: a run whose distance from its start
/// grows at a steady positive rate in `σ_n` has no bounded subsequence in
/// sight, which for the proximal point iteration signals `Zer(A) = ∅`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub previous_rate: f64,
    pub recent_rate: f64,
    pub linear: bool,
}

pub fn linear_growth(steps: &[TraceStep], window: usize, min_rate: f64) -> Option<GrowthReport> {
    let (previous_rate, recent_rate) = window_growth_rates(steps, window)?;
    Some(GrowthReport {
        previous_rate,
        recent_rate,
        linear: recent_rate >= min_rate && recent_rate >= 0.9 * previous_rate,
    })
}
