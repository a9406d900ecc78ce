//! Performance panels and age curves.
//!
//! A panel is an N x K matrix of standardized performance values plus a
//! boolean observability mask. Cells that are masked out store a quiet NaN
//! sentinel and are only reachable through mask-aware accessors, so an
//! estimator that accidentally touches unobserved data produces NaN output
//! instead of silently leaking simulator truth.

use crate::error::{Error, Result};
use crate::numerics::AgeGrid;

/// Rectangular player-by-age performance panel with observability mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformancePanel {
    grid: AgeGrid,
    player_ids: Vec<String>,
    // Row-major N x K. Masked cells hold NaN.
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl PerformancePanel {
    /// Build a panel. Values at masked-out cells are overwritten with the
    /// NaN sentinel regardless of what the caller supplied.
    pub fn new(
        grid: AgeGrid,
        player_ids: Vec<String>,
        mut values: Vec<f64>,
        mask: Vec<bool>,
    ) -> Result<Self> {
        let n = player_ids.len();
        let k = grid.len();
        if n == 0 {
            return Err(Error::EmptyInput("panel players"));
        }
        if values.len() != n * k || mask.len() != n * k {
            return Err(Error::InvalidParameter(format!(
                "panel dimensions mismatch: {} players x {} ages, {} values, {} mask entries",
                n,
                k,
                values.len(),
                mask.len()
            )));
        }
        for (v, &m) in values.iter_mut().zip(mask.iter()) {
            if !m {
                *v = f64::NAN;
            } else if !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "observed panel cells must be finite".into(),
                ));
            }
        }
        Ok(PerformancePanel { grid, player_ids, values, mask })
    }

    /// Fully observed panel from raw values.
    pub fn fully_observed(grid: AgeGrid, player_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; values.len()];
        PerformancePanel::new(grid, player_ids, values, mask)
    }

    pub fn grid(&self) -> AgeGrid {
        self.grid
    }

    pub fn n_players(&self) -> usize {
        self.player_ids.len()
    }

    pub fn n_ages(&self) -> usize {
        self.grid.len()
    }

    pub fn player_ids(&self) -> &[String] {
        &self.player_ids
    }

    fn cell(&self, player: usize, age_idx: usize) -> usize {
        debug_assert!(player < self.n_players() && age_idx < self.n_ages());
        player * self.n_ages() + age_idx
    }

    /// Observed value at (player, age index), or `None` when masked out.
    pub fn observed(&self, player: usize, age_idx: usize) -> Option<f64> {
        let c = self.cell(player, age_idx);
        if self.mask[c] {
            Some(self.values[c])
        } else {
            None
        }
    }

    pub fn is_observed(&self, player: usize, age_idx: usize) -> bool {
        self.mask[self.cell(player, age_idx)]
    }

    /// Number of observed players at one age index.
    pub fn observed_count(&self, age_idx: usize) -> usize {
        (0..self.n_players())
            .filter(|&i| self.mask[self.cell(i, age_idx)])
            .count()
    }

    /// All observed values at one age index.
    pub fn observed_at_age(&self, age_idx: usize) -> Vec<f64> {
        (0..self.n_players())
            .filter_map(|i| self.observed(i, age_idx))
            .collect()
    }

    /// Observed (player, age index, value) triples in row-major order.
    pub fn observed_cells(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n_players() {
            for k in 0..self.n_ages() {
                if let Some(v) = self.observed(i, k) {
                    out.push((i, k, v));
                }
            }
        }
        out
    }

    /// Ages (indices) at which a player is observed.
    pub fn observed_ages_of(&self, player: usize) -> Vec<usize> {
        (0..self.n_ages())
            .filter(|&k| self.mask[self.cell(player, k)])
            .collect()
    }

    pub fn total_observed(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn total_missing(&self) -> usize {
        self.mask.len() - self.total_observed()
    }

    /// Replace the mask, poisoning newly hidden cells. The new mask must be
    /// a subset of the current one (cannot reveal sentinel cells).
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.mask.len() {
            return Err(Error::InvalidParameter("mask length mismatch".into()));
        }
        for (new, old) in mask.iter().zip(self.mask.iter()) {
            if *new && !*old {
                return Err(Error::InvalidParameter(
                    "cannot unmask a cell that has no stored value".into(),
                ));
            }
        }
        PerformancePanel::new(self.grid, self.player_ids.clone(), self.values.clone(), mask)
    }

    /// Return a copy with some previously masked cells filled in. Used by
    /// imputation; observed cells must not be altered.
    pub fn with_filled_cells(&self, fills: &[(usize, usize, f64)]) -> Result<Self> {
        let mut values = self.values.clone();
        let mut mask = self.mask.clone();
        for &(player, age_idx, value) in fills {
            let c = self.cell(player, age_idx);
            if mask[c] {
                return Err(Error::InvalidParameter(format!(
                    "cell ({player}, {age_idx}) is already observed"
                )));
            }
            values[c] = value;
            mask[c] = true;
        }
        PerformancePanel::new(self.grid, self.player_ids.clone(), values, mask)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Fraction of players observed at each age: entry `t` is
/// `sum_i mask[i][t] / N`.
pub fn observed_fraction_by_age(panel: &PerformancePanel) -> Vec<f64> {
    let n = panel.n_players() as f64;
    (0..panel.n_ages())
        .map(|k| panel.observed_count(k) as f64 / n)
        .collect()
}

/// Affine transform of the observed values: `scale * y + shift`, mask
/// unchanged. `scale` must be nonzero so the transform stays invertible.
pub fn apply_affine(panel: &PerformancePanel, scale: f64, shift: f64) -> Result<PerformancePanel> {
    if scale == 0.0 {
        return Err(Error::InvalidTransform);
    }
    let values = panel
        .values
        .iter()
        .map(|v| scale * v + shift)
        .collect::<Vec<_>>();
    PerformancePanel::new(
        panel.grid,
        panel.player_ids.clone(),
        values,
        panel.mask.clone(),
    )
}

/// A mean performance curve on an integer age grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeCurve {
    grid: AgeGrid,
    values: Vec<f64>,
    support_counts: Option<Vec<usize>>,
}

impl AgeCurve {
    pub fn new(grid: AgeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "curve has {} values for a grid of {} ages",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("curve values must be finite".into()));
        }
        Ok(AgeCurve { grid, values, support_counts: None })
    }

    pub fn with_support(mut self, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != self.grid.len() {
            return Err(Error::InvalidParameter("support count length mismatch".into()));
        }
        self.support_counts = Some(counts);
        Ok(self)
    }

    pub fn grid(&self) -> AgeGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_counts(&self) -> Option<&[usize]> {
        self.support_counts.as_deref()
    }

    /// Curve value at an integer age. Panics off the grid.
    pub fn at(&self, age: i32) -> f64 {
        let idx = self
            .grid
            .index_of(age)
            .unwrap_or_else(|| panic!("age {age} off the curve grid"));
        self.values[idx]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}
