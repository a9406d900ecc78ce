//! Scoring estimated curves against truth, and bootstrap curve bundles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::estimate;
use crate::numerics::AgeGrid;
use crate::panel::{AgeCurve, PerformancePanel};
use crate::rng::{derive_seed, rng_from_seed};
use crate::spec::EstimatorSpec;
use rand::Rng;

/// One factorial cell setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSetting {
    pub n_players: usize,
    pub omega: f64,
    pub sigma_gamma: f64,
}

/// Scores for one estimator within one cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodScores {
    /// Per-age RMSE across successful replications (NaN when none succeeded).
    pub rmse_by_age: Vec<f64>,
    /// One shape-based distance per successful replication.
    pub sbd_values: Vec<f64>,
    pub failure_count: usize,
}

/// Full output of a factorial sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub grid: AgeGrid,
    pub cells: Vec<CellSetting>,
    pub specs: Vec<EstimatorSpec>,
    pub replications: usize,
    /// `per_cell[cell][spec]`, parallel to `cells` and `specs`.
    pub per_cell: Vec<Vec<MethodScores>>,
}

impl EvaluationReport {
    /// Age-averaged RMSE for one spec, averaged over every cell with data.
    pub fn mean_rmse(&self, spec_idx: usize) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for cell in &self.per_cell {
            for r in &cell[spec_idx].rmse_by_age {
                if r.is_finite() {
                    sum += r;
                    count += 1;
                }
            }
        }
        if count == 0 {
            f64::NAN
        } else {
            sum / count as f64
        }
    }

    /// Per-age RMSE for one spec averaged across cells (NaN-aware).
    pub fn rmse_by_age(&self, spec_idx: usize) -> Vec<f64> {
        let k = self.grid.len();
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for cell in &self.per_cell {
            for (idx, r) in cell[spec_idx].rmse_by_age.iter().enumerate() {
                if r.is_finite() {
                    sums[idx] += r;
                    counts[idx] += 1;
                }
            }
        }
        sums.iter()
            .zip(counts.iter())
            .map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
            .collect()
    }

    /// Median SBD for one spec, pooled over all cells and replications.
    pub fn median_sbd(&self, spec_idx: usize) -> f64 {
        let mut values: Vec<f64> = self
            .per_cell
            .iter()
            .flat_map(|cell| cell[spec_idx].sbd_values.iter().cloned())
            .collect();
        if values.is_empty() {
            return f64::NAN;
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite sbd"));
        let n = values.len();
        if n % 2 == 1 {
            values[n / 2]
        } else {
            (values[n / 2 - 1] + values[n / 2]) / 2.0
        }
    }

    pub fn total_failures(&self, spec_idx: usize) -> usize {
        self.per_cell.iter().map(|cell| cell[spec_idx].failure_count).sum()
    }

    /// Average per-age RMSE grouped by player count: one row per
    /// (n_players, spec), averaging across the other factors.
    pub fn rmse_by_age_and_players(&self) -> Vec<(usize, String, Vec<f64>)> {
        let mut player_counts: Vec<usize> = self.cells.iter().map(|c| c.n_players).collect();
        player_counts.sort_unstable();
        player_counts.dedup();
        let k = self.grid.len();
        let mut rows = Vec::new();
        for &n in &player_counts {
            for (s, spec) in self.specs.iter().enumerate() {
                let mut sums = vec![0.0; k];
                let mut counts = vec![0usize; k];
                for (cell_idx, cell) in self.cells.iter().enumerate() {
                    if cell.n_players != n {
                        continue;
                    }
                    for (idx, r) in self.per_cell[cell_idx][s].rmse_by_age.iter().enumerate() {
                        if r.is_finite() {
                            sums[idx] += r;
                            counts[idx] += 1;
                        }
                    }
                }
                let avg = sums
                    .iter()
                    .zip(counts.iter())
                    .map(|(sum, &c)| if c == 0 { f64::NAN } else { sum / c as f64 })
                    .collect();
                rows.push((n, spec.to_string(), avg));
            }
        }
        rows
    }
}

/// Per-age root mean squared error of a set of estimated curves against the
/// truth: entry t is sqrt(mean over estimates of (ghat(t) - g(t))^2).
pub fn rmse_by_age(estimates: &[AgeCurve], truth: &AgeCurve) -> Result<Vec<f64>> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("rmse estimates"));
    }
    for est in estimates {
        if est.grid() != truth.grid() {
            return Err(Error::GridMismatch);
        }
    }
    let k = truth.grid().len();
    let mut out = Vec::with_capacity(k);
    for idx in 0..k {
        let mean_sq = estimates
            .iter()
            .map(|e| (e.values()[idx] - truth.values()[idx]).powi(2))
            .sum::<f64>()
            / estimates.len() as f64;
        out.push(mean_sq.sqrt());
    }
    Ok(out)
}

/// Shape-based distance: one minus the maximum coefficient-normalized
/// cross-correlation over integer shifts (zero padded). Symmetric, zero for
/// positively scaled copies, with theoretical range [0, 2].
pub fn shape_based_distance(x: &AgeCurve, y: &AgeCurve) -> Result<f64> {
    if x.grid() != y.grid() {
        return Err(Error::GridMismatch);
    }
    sbd_slices(x.values(), y.values())
}

pub(crate) fn sbd_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    let k = x.len() as isize;
    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_y = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_x == 0.0 || norm_y == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let mut best = f64::NEG_INFINITY;
    for shift in -(k - 1)..=(k - 1) {
        let mut cc = 0.0;
        for t in 0..k {
            let s = t + shift;
            if s >= 0 && s < k {
                cc += x[s as usize] * y[t as usize];
            }
        }
        let ncc = cc / (norm_x * norm_y);
        if ncc > best {
            best = ncc;
        }
    }
    Ok(1.0 - best)
}

/// Z-normalize a curve (mean 0, unit sample sd). Curves are compared raw by
/// default since they already share a standardized scale; this helper is the
/// opt-in alternative for shape-only comparisons.
pub fn z_normalized(curve: &AgeCurve) -> Result<AgeCurve> {
    let v = curve.values();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let sd = var.sqrt();
    AgeCurve::new(curve.grid(), v.iter().map(|x| (x - mean) / sd).collect())
}

/// A bundle of bootstrap curves.
#[derive(Debug, Clone)]
pub struct BootstrapBundle {
    pub curves: Vec<AgeCurve>,
    /// Indices of draws whose estimator failed after all retries.
    pub failed_draws: Vec<usize>,
}

impl BootstrapBundle {
    /// Sample standard deviation of the bundle at one age index.
    pub fn sd_at(&self, age_idx: usize) -> f64 {
        let n = self.curves.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.curves.iter().map(|c| c.values()[age_idx]).sum::<f64>() / n as f64;
        let var = self
            .curves
            .iter()
            .map(|c| (c.values()[age_idx] - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        var.sqrt()
    }
}

/// Rebuild a panel from resampled player rows (with their masks). Duplicate
/// indices become independent rows, as in a player-level bootstrap.
pub fn resample_players(panel: &PerformancePanel, indices: &[usize]) -> Result<PerformancePanel> {
    if indices.is_empty() {
        return Err(Error::EmptyInput("bootstrap indices"));
    }
    let k = panel.n_ages();
    let mut values = Vec::with_capacity(indices.len() * k);
    let mut mask = Vec::with_capacity(indices.len() * k);
    let mut ids = Vec::with_capacity(indices.len());
    for (copy, &i) in indices.iter().enumerate() {
        if i >= panel.n_players() {
            return Err(Error::InvalidParameter(format!(
                "bootstrap index {i} out of range"
            )));
        }
        ids.push(format!("{}#{copy}", panel.player_ids()[i]));
        for age_idx in 0..k {
            match panel.observed(i, age_idx) {
                Some(v) => {
                    values.push(v);
                    mask.push(true);
                }
                None => {
                    values.push(f64::NAN);
                    mask.push(false);
                }
            }
        }
    }
    PerformancePanel::new(panel.grid(), ids, values, mask)
}

/// Resample whole players with replacement B times and fit `spec` on each
/// resampled panel. Draw b uses a seed derived from (root_seed, b, attempt);
/// a failing draw is retried with the next derived seed up to 3 times, then
/// recorded in `failed_draws`.
pub fn bootstrap_curves(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    b: usize,
    root_seed: u64,
) -> Result<BootstrapBundle> {
    if b == 0 {
        return Err(Error::InvalidParameter("bootstrap needs B >= 1".into()));
    }
    let n = panel.n_players();
    let mut curves = Vec::with_capacity(b);
    let mut failed_draws = Vec::new();
    for draw in 0..b {
        let mut done = false;
        // Initial attempt plus up to three retries on fresh derived seeds.
        for attempt in 0..4u64 {
            let mut rng = rng_from_seed(derive_seed(root_seed, draw as u64, attempt));
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let resampled = resample_players(panel, &indices)?;
            match estimate(&resampled, spec, Some(n), &mut rng) {
                Ok(fit) => {
                    curves.push(fit.curve);
                    done = true;
                    break;
                }
                Err(_) => continue,
            }
        }
        if !done {
            failed_draws.push(draw);
        }
    }
    Ok(BootstrapBundle { curves, failed_draws })
}


// Exhaustive-shift SBD oracle: materializes each zero-padded shifted copy
// before taking the dot product, independent of the production index
// arithmetic.
#[cfg(test)]
fn sbd_exhaustive_oracle(x: &[f64], y: &[f64]) -> Result<f64> {
    let k = x.len();
    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_y = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_x == 0.0 || norm_y == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let mut best = f64::NEG_INFINITY;
    for shift in -(k as isize - 1)..=(k as isize - 1) {
        let mut padded = vec![0.0; k];
        for (t, slot) in padded.iter_mut().enumerate() {
            let s = t as isize + shift;
            if s >= 0 && (s as usize) < k {
                *slot = x[s as usize];
            }
        }
        let cc: f64 = padded.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let ncc = cc / (norm_x * norm_y);
        if ncc > best {
            best = ncc;
        }
    }
    Ok(1.0 - best)
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn vector_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..=8).prop_flat_map(|len| {
            (
                prop::collection::vec(-10.0..10.0f64, len),
                prop::collection::vec(-10.0..10.0f64, len),
            )
        })
    }

    proptest! {
        #[test]
        fn sbd_matches_exhaustive_oracle((x, y) in vector_pair()) {
            prop_assume!(x.iter().any(|v| *v != 0.0) && y.iter().any(|v| *v != 0.0));
            let fast = sbd_slices(&x, &y).unwrap();
            let slow = sbd_exhaustive_oracle(&x, &y).unwrap();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn sbd_symmetric((x, y) in vector_pair()) {
            prop_assume!(x.iter().any(|v| *v != 0.0) && y.iter().any(|v| *v != 0.0));
            let a = sbd_slices(&x, &y).unwrap();
            let b = sbd_slices(&y, &x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&a));
        }

        #[test]
        fn sbd_scale_invariant((x, y) in vector_pair(), alpha in 0.01..50.0f64) {
            prop_assume!(x.iter().any(|v| *v != 0.0) && y.iter().any(|v| *v != 0.0));
            let base = sbd_slices(&x, &y).unwrap();
            let scaled_y: Vec<f64> = y.iter().map(|v| alpha * v).collect();
            let scaled = sbd_slices(&x, &scaled_y).unwrap();
            prop_assert!((base - scaled).abs() < 1e-12);
        }
    }
}
