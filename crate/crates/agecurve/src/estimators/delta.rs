//! Delta and Delta Plus curve estimators.
//!
//! The year-over-year step at age t is the mean change among players observed
//! at both t and t+1. Steps are accumulated into a level curve which is then
//! anchored: the Delta curve has maximum exactly zero, the Delta Plus curve
//! has maximum equal to the largest per-age observed mean.

use crate::error::{Error, Result};
use crate::panel::{AgeCurve, PerformancePanel};

/// Internals of a delta fit.
#[derive(Debug, Clone)]
pub struct DeltaDiagnostics {
    /// Year-over-year mean changes, one per consecutive age pair (K-1).
    pub deltas: Vec<f64>,
    /// Number of players observed at both ages of each pair (K-1).
    pub pair_counts: Vec<usize>,
    /// Mean of the observed values at each age (K).
    pub observed_means: Vec<f64>,
}

fn delta_steps(panel: &PerformancePanel) -> Result<DeltaDiagnostics> {
    let k = panel.n_ages();
    let mut deltas = Vec::with_capacity(k - 1);
    let mut pair_counts = Vec::with_capacity(k - 1);
    for idx in 0..k - 1 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..panel.n_players() {
            if let (Some(now), Some(next)) = (panel.observed(i, idx), panel.observed(i, idx + 1)) {
                sum += next - now;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::InsufficientPairs {
                age: panel.grid().age_at(idx),
                next: panel.grid().age_at(idx + 1),
            });
        }
        deltas.push(sum / count as f64);
        pair_counts.push(count);
    }
    let observed_means = (0..k)
        .map(|idx| {
            let vals = panel.observed_at_age(idx);
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect();
    Ok(DeltaDiagnostics { deltas, pair_counts, observed_means })
}

fn accumulate(diag: &DeltaDiagnostics) -> Vec<f64> {
    let mut levels = Vec::with_capacity(diag.deltas.len() + 1);
    levels.push(0.0);
    for d in &diag.deltas {
        let last = *levels.last().unwrap();
        levels.push(last + d);
    }
    levels
}

/// Delta Method curve: cumulative year-over-year changes shifted so the
/// largest value is exactly zero.
pub fn delta_curve(panel: &PerformancePanel) -> Result<(AgeCurve, DeltaDiagnostics)> {
    let diag = delta_steps(panel)?;
    let mut levels = accumulate(&diag);
    let peak = levels.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for v in &mut levels {
        *v -= peak;
    }
    let support = (0..panel.n_ages()).map(|k| panel.observed_count(k)).collect();
    let curve = AgeCurve::new(panel.grid(), levels)?.with_support(support)?;
    Ok((curve, diag))
}

/// Delta Plus curve: the Delta curve shifted up by the maximum per-age
/// observed mean, so the peak level is no longer forced to zero.
pub fn delta_plus_curve(panel: &PerformancePanel) -> Result<(AgeCurve, DeltaDiagnostics)> {
    let (base, diag) = delta_curve(panel)?;
    let anchor = diag
        .observed_means
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let values = base.values().iter().map(|v| v + anchor).collect();
    let support = (0..panel.n_ages()).map(|k| panel.observed_count(k)).collect();
    let curve = AgeCurve::new(panel.grid(), values)?.with_support(support)?;
    Ok((curve, diag))
}
