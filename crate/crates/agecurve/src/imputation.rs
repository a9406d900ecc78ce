//! Two-pass imputation of unobserved panel cells.
//!
//! Pass one fits a mean model to the observed cells only, records its
//! residual sd (sigma_0), and draws every missing cell from a Normal centered
//! at the fitted mean, truncated above at a spline-smoothed per-age quantile
//! boundary (or unbounded). Pass two refits the mean model on the completed
//! panel and redraws the originally missing cells with the same sigma_0 and
//! boundary. The second-pass draws are what the completed panel carries.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::quantile::quantile_curve;
use crate::estimators::regression::fit_regression_curve;
use crate::fit::PlayerEffects;
use crate::numerics::{least_squares_fit, sample_quantile, truncated_normal_sample, NaturalSplineBasis};
use crate::panel::{AgeCurve, PerformancePanel};
use crate::spec::{DataChoice, EffectKind, EstimatorSpec, Method};

/// Where the per-cell imputation means come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanSource {
    /// Natural spline with fixed player effects fit to the current data.
    Regression,
    /// Quantile-mapping population means plus fixed player effects.
    Quantile,
}

/// Imputation settings.
#[derive(Debug, Clone)]
pub struct ImputationConfig {
    /// Percentile of the observed values that defines the truncation
    /// boundary at each age.
    pub boundary_quantile: f64,
    /// When false the boundary is +infinity (untruncated draws).
    pub truncate: bool,
    /// The algorithm performs exactly two rounds.
    pub passes: usize,
    pub mean_source: MeanSource,
}

impl ImputationConfig {
    pub fn new(boundary_quantile: f64, truncate: bool, mean_source: MeanSource) -> Result<Self> {
        let config = ImputationConfig { boundary_quantile, truncate, passes: 2, mean_source };
        config.validate()?;
        Ok(config)
    }

    /// Configuration implied by an estimator spec (`trunc`/`notrunc` data,
    /// quantile means for the quant method).
    pub fn for_spec(spec: &EstimatorSpec) -> Result<Self> {
        let truncate = match spec.data {
            DataChoice::TruncatedImputed => true,
            DataChoice::UntruncatedImputed => false,
            DataChoice::Observed => {
                return Err(Error::SpecError(format!(
                    "{spec} does not use imputation"
                )))
            }
        };
        let mean_source = if spec.method == Method::Quant {
            MeanSource::Quantile
        } else {
            MeanSource::Regression
        };
        ImputationConfig::new(spec.boundary_quantile, truncate, mean_source)
    }

    fn validate(&self) -> Result<()> {
        if !(self.boundary_quantile > 0.0 && self.boundary_quantile < 1.0) {
            return Err(Error::ProbabilityOutOfDomain(self.boundary_quantile));
        }
        if self.passes != 2 {
            return Err(Error::InvalidParameter(format!(
                "the imputation algorithm runs exactly 2 passes, got {}",
                self.passes
            )));
        }
        Ok(())
    }
}

/// Record of one imputed cell across both passes.
#[derive(Debug, Clone)]
pub struct ImputedCellTrace {
    pub player: usize,
    pub age: i32,
    /// Mean used for the first-pass draw (observed-data fit).
    pub first_pass_mean: f64,
    /// Mean used for the second-pass draw (completed-data refit).
    pub second_pass_mean: f64,
    /// Final imputed value (second-pass draw).
    pub imputed: f64,
}

/// Full imputation audit trail.
#[derive(Debug, Clone, Default)]
pub struct ImputationTrace {
    /// Per-age truncation boundary (+infinity when truncation is off).
    /// Empty when the panel had nothing to impute.
    pub boundary: Vec<f64>,
    pub cells: Vec<ImputedCellTrace>,
    /// Observability mask of the input panel.
    pub original_mask: Vec<bool>,
}

/// Spline-smoothed per-age `q`-quantile of the observed values: the raw
/// quantiles at each age are themselves smoothed by a natural spline fit.
pub fn smoothed_boundary(panel: &PerformancePanel, q: f64, df: usize) -> Result<Vec<f64>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::ProbabilityOutOfDomain(q));
    }
    let grid = panel.grid();
    let mut raw = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let values = panel.observed_at_age(idx);
        if values.is_empty() {
            return Err(Error::BoundaryUndefined { age: grid.age_at(idx) });
        }
        raw.push(sample_quantile(&values, q)?);
    }
    let ages: Vec<f64> = grid.ages().map(|t| t as f64).collect();
    let basis = NaturalSplineBasis::from_ages(&ages, df, &grid)?;
    let design = basis.matrix(&ages);
    let y = nalgebra::DVector::from_vec(raw);
    let fit = least_squares_fit(&design, &y, true)?;
    Ok(ages
        .iter()
        .map(|&a| {
            basis
                .row(a)
                .iter()
                .zip(fit.coefficients.iter())
                .map(|(b, c)| b * c)
                .sum()
        })
        .collect())
}

struct MeanModel {
    population: AgeCurve,
    effects: PlayerEffects,
    residual_sd: f64,
}

impl MeanModel {
    fn mean(&self, player: usize, age: i32) -> f64 {
        self.population.at(age) + self.effects.deviation(player, age as f64)
    }
}

fn fit_mean_model(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    source: MeanSource,
) -> Result<MeanModel> {
    // The regression mean model is always the natural spline with fixed
    // player effects, whatever the caller's final method/effects.
    let mean_spec = EstimatorSpec::custom(Method::Spline, DataChoice::Observed, EffectKind::Fixed)
        .with_spline_df(spec.spline_df)
        .with_boundary_quantile(spec.boundary_quantile);
    let regression = fit_regression_curve(panel, &mean_spec)?;
    match source {
        MeanSource::Regression => Ok(MeanModel {
            population: regression.curve,
            effects: regression.effects,
            residual_sd: regression.residual_sd,
        }),
        MeanSource::Quantile => {
            let (zeta, _) = quantile_curve(panel, panel.n_players(), spec.boundary_quantile)?;
            Ok(MeanModel {
                population: zeta,
                effects: regression.effects,
                residual_sd: regression.residual_sd,
            })
        }
    }
}

/// Complete a panel by the two-pass truncated-Normal imputation algorithm.
///
/// Returns the completed panel (mask all true, observed cells untouched) and
/// the per-cell trace. A panel with no missing cells is returned unchanged
/// with an empty trace.
pub fn impute_panel(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    config: &ImputationConfig,
    rng: &mut impl Rng,
) -> Result<(PerformancePanel, ImputationTrace)> {
    config.validate()?;
    let grid = panel.grid();
    let missing: Vec<(usize, usize)> = (0..panel.n_players())
        .flat_map(|i| (0..panel.n_ages()).map(move |k| (i, k)))
        .filter(|&(i, k)| !panel.is_observed(i, k))
        .collect();
    if missing.is_empty() {
        return Ok((panel.clone(), ImputationTrace {
            boundary: Vec::new(),
            cells: Vec::new(),
            original_mask: panel.mask().to_vec(),
        }));
    }

    // Step 1: mean model on observed cells only; sigma_0 is frozen here.
    let first = fit_mean_model(panel, spec, config.mean_source)?;
    let sigma0 = first.residual_sd.max(f64::MIN_POSITIVE);

    // Step 2: boundary, computed once and reused by the second pass.
    let boundary = if config.truncate {
        smoothed_boundary(panel, config.boundary_quantile, spec.spline_df)?
    } else {
        vec![f64::INFINITY; grid.len()]
    };

    // Step 3: first-pass draws for every missing cell.
    let mut first_means = Vec::with_capacity(missing.len());
    let mut fills = Vec::with_capacity(missing.len());
    for &(i, k) in &missing {
        let age = grid.age_at(k);
        let eta = first.mean(i, age);
        let draw = draw_below(eta, sigma0, boundary[k], rng)?;
        first_means.push(eta);
        fills.push((i, k, draw));
    }

    // Step 4: refit the mean model on observed + first-pass imputed cells.
    let completed_once = panel.with_filled_cells(&fills)?;
    let second = fit_mean_model(&completed_once, spec, config.mean_source)?;

    // Step 5: redraw the originally missing cells with the same sigma_0 and
    // boundary.
    let mut cells = Vec::with_capacity(missing.len());
    let mut final_fills = Vec::with_capacity(missing.len());
    for (pos, &(i, k)) in missing.iter().enumerate() {
        let age = grid.age_at(k);
        let eta = second.mean(i, age);
        let draw = draw_below(eta, sigma0, boundary[k], rng)?;
        final_fills.push((i, k, draw));
        cells.push(ImputedCellTrace {
            player: i,
            age,
            first_pass_mean: first_means[pos],
            second_pass_mean: eta,
            imputed: draw,
        });
    }

    // Step 6: the completed panel carries the second-pass draws.
    let completed = panel.with_filled_cells(&final_fills)?;
    Ok((completed, ImputationTrace {
        boundary,
        cells,
        original_mask: panel.mask().to_vec(),
    }))
}

// Truncated draw that is strictly below a finite boundary.
fn draw_below(mean: f64, sd: f64, upper: f64, rng: &mut impl Rng) -> Result<f64> {
    let x = truncated_normal_sample(mean, sd, upper, rng)?;
    if upper.is_finite() && x >= upper {
        Ok(upper.next_down())
    } else {
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::AgeGrid;
    use crate::rng::rng_from_seed;

    fn spec() -> EstimatorSpec {
        EstimatorSpec::preset("spline:trunc:fixed").unwrap()
    }

    /// Panel where strong players are observed everywhere and weak players
    /// lose their late-career cells (performance-correlated missingness).
    fn biased_panel() -> PerformancePanel {
        let grid = AgeGrid::new(18, 40).unwrap();
        let n = 12;
        let mut values = Vec::new();
        let mut mask = Vec::new();
        for i in 0..n {
            let skill = (i as f64 - 5.5) / 2.0;
            for (k, t) in grid.ages().enumerate() {
                let age = t as f64;
                let curve = -((age - 25.0) * (age - 25.0)) / 9.0;
                let wiggle = ((i * 13 + k * 7) % 11) as f64 / 11.0 - 0.5;
                values.push(curve + skill + 0.4 * wiggle);
                mask.push(skill > 0.0 || k < 12);
            }
        }
        let ids = (0..n).map(|i| format!("p{i}")).collect();
        PerformancePanel::new(grid, ids, values, mask).unwrap()
    }

    #[test]
    fn nothing_to_impute_returns_panel_unchanged() {
        let grid = AgeGrid::new(18, 40).unwrap();
        let full = PerformancePanel::fully_observed(
            grid,
            (0..8).map(|i| format!("p{i}")).collect(),
            (0..8 * 23).map(|c| (c % 7) as f64 * 0.3).collect(),
        )
        .unwrap();
        let mut rng = rng_from_seed(5);
        let (out, trace) =
            impute_panel(&full, &spec(), &ImputationConfig::for_spec(&spec()).unwrap(), &mut rng)
                .unwrap();
        assert_eq!(out, full);
        assert!(trace.cells.is_empty());
        assert!(trace.boundary.is_empty());
    }

    #[test]
    fn truncated_draws_stay_strictly_below_boundary() {
        let panel = biased_panel();
        let mut rng = rng_from_seed(6);
        let config = ImputationConfig::for_spec(&spec()).unwrap();
        let (_, trace) = impute_panel(&panel, &spec(), &config, &mut rng).unwrap();
        assert!(!trace.cells.is_empty());
        for cell in &trace.cells {
            let k = panel.grid().index_of(cell.age).unwrap();
            assert!(
                cell.imputed < trace.boundary[k],
                "imputed {} at boundary {}",
                cell.imputed,
                trace.boundary[k]
            );
        }
    }

    #[test]
    fn observed_cells_bit_identical_after_imputation() {
        let panel = biased_panel();
        let mut rng = rng_from_seed(7);
        let config = ImputationConfig::for_spec(&spec()).unwrap();
        let (completed, _) = impute_panel(&panel, &spec(), &config, &mut rng).unwrap();
        for i in 0..panel.n_players() {
            for k in 0..panel.n_ages() {
                if let Some(v) = panel.observed(i, k) {
                    assert_eq!(completed.observed(i, k), Some(v));
                }
            }
        }
        assert_eq!(completed.total_missing(), 0);
    }

    #[test]
    fn seed_determinism() {
        let panel = biased_panel();
        let config = ImputationConfig::for_spec(&spec()).unwrap();
        let run = |seed: u64| {
            let mut rng = rng_from_seed(seed);
            impute_panel(&panel, &spec(), &config, &mut rng).unwrap().0
        };
        assert_eq!(run(123), run(123));
        assert_ne!(run(123), run(124));
    }

    #[test]
    fn two_passes_actually_move_the_means() {
        let panel = biased_panel();
        let mut rng = rng_from_seed(8);
        let config = ImputationConfig::for_spec(&spec()).unwrap();
        let (_, trace) = impute_panel(&panel, &spec(), &config, &mut rng).unwrap();
        let moved = trace
            .cells
            .iter()
            .any(|c| (c.first_pass_mean - c.second_pass_mean).abs() > 1e-9);
        assert!(moved, "second pass should refit the mean model");
    }

    #[test]
    fn truncation_pulls_imputations_down() {
        let panel = biased_panel();
        let spec_t = EstimatorSpec::preset("spline:trunc:fixed").unwrap();
        let spec_u = EstimatorSpec::preset("spline:notrunc:fixed").unwrap();
        let mean_imputed = |spec: &EstimatorSpec| {
            let config = ImputationConfig::for_spec(spec).unwrap();
            let mut rng = rng_from_seed(99);
            let (_, trace) = impute_panel(&panel, spec, &config, &mut rng).unwrap();
            // Per-age mean of imputed values.
            let grid = panel.grid();
            let mut sums = vec![0.0; grid.len()];
            let mut counts = vec![0usize; grid.len()];
            for c in &trace.cells {
                let k = grid.index_of(c.age).unwrap();
                sums[k] += c.imputed;
                counts[k] += 1;
            }
            (sums, counts)
        };
        let (trunc_sums, counts) = mean_imputed(&spec_t);
        let (free_sums, counts2) = mean_imputed(&spec_u);
        assert_eq!(counts, counts2);
        for k in 0..counts.len() {
            if counts[k] > 0 {
                assert!(
                    trunc_sums[k] <= free_sums[k] + 1e-9,
                    "age index {k}: truncated mean above untruncated"
                );
            }
        }
    }

    #[test]
    fn degenerate_noise_converges_to_means() {
        // Data lying exactly in the mean model's span (linear curve plus
        // player constants): sigma_0 ~ 0, so untruncated draws equal the
        // means.
        let grid = AgeGrid::new(18, 40).unwrap();
        let n = 6;
        let mut values = Vec::new();
        let mut mask = Vec::new();
        for i in 0..n {
            let skill = (i as f64 - 2.5) * 0.5;
            for (k, t) in grid.ages().enumerate() {
                let age = t as f64;
                values.push(0.1 * age - 3.0 + skill);
                mask.push(!(i < 2 && k > 15));
            }
        }
        let ids = (0..n).map(|i| format!("p{i}")).collect();
        let panel = PerformancePanel::new(grid, ids, values, mask).unwrap();
        let spec = EstimatorSpec::preset("spline:notrunc:fixed").unwrap();
        let config = ImputationConfig::for_spec(&spec).unwrap();
        let mut rng = rng_from_seed(21);
        let (_, trace) = impute_panel(&panel, &spec, &config, &mut rng).unwrap();
        for c in &trace.cells {
            assert!(
                (c.imputed - c.second_pass_mean).abs() < 1e-6,
                "draw {} vs mean {}",
                c.imputed,
                c.second_pass_mean
            );
        }
    }

    #[test]
    fn smoothed_boundary_flat_and_linear_data() {
        let grid = AgeGrid::new(18, 40).unwrap();
        let flat = PerformancePanel::fully_observed(
            grid,
            (0..4).map(|i| format!("p{i}")).collect(),
            vec![2.0; 4 * 23],
        )
        .unwrap();
        for b in smoothed_boundary(&flat, 0.75, 6).unwrap() {
            assert!((b - 2.0).abs() < 1e-6);
        }
        // Values linear in age: per-age quantiles are linear, the spline
        // reproduces them.
        let linear = PerformancePanel::fully_observed(
            grid,
            (0..4).map(|i| format!("p{i}")).collect(),
            (0..4)
                .flat_map(|i| {
                    grid.ages()
                        .map(move |t| 0.5 * t as f64 + i as f64)
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
        .unwrap();
        let expected: Vec<f64> = grid
            .ages()
            .map(|t| {
                let vals: Vec<f64> = (0..4).map(|i| 0.5 * t as f64 + i as f64).collect();
                sample_quantile(&vals, 0.75).unwrap()
            })
            .collect();
        for (b, e) in smoothed_boundary(&linear, 0.75, 6).unwrap().iter().zip(expected) {
            assert!((b - e).abs() < 1e-6);
        }
    }

    #[test]
    fn boundary_on_simulated_panel_is_unimodal_concave() {
        // On a career-shaped panel the smoothed boundary peaks in the 20s
        // and is concave down there: negative second differences around the
        // peak, with the ends lower than the middle.
        use crate::rng::rng_from_seed;
        use crate::simulation::{mask_panel, simulate_panel, SimulationConfig};
        let config = SimulationConfig::default();
        let pi = config.resolved_pi().unwrap();
        let mut rng = rng_from_seed(44);
        let (full, _) = simulate_panel(&config, &mut rng).unwrap();
        let (panel, _) = mask_panel(&full, &pi, &mut rng).unwrap();
        let boundary = smoothed_boundary(&panel, 0.75, 6).unwrap();

        let grid = config.grid;
        let peak_idx = boundary
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let peak_age = grid.age_at(peak_idx);
        assert!((20..30).contains(&peak_age), "boundary peak at {peak_age}");
        // Concave down around the peak, ends below the center.
        let center_second =
            boundary[peak_idx + 1] - 2.0 * boundary[peak_idx] + boundary[peak_idx - 1];
        assert!(center_second < 0.0, "second difference at peak {center_second}");
        assert!(boundary[0] < boundary[peak_idx]);
        assert!(boundary[grid.len() - 1] < boundary[peak_idx]);
    }

    #[test]
    fn boundary_errors_on_empty_age() {
        let grid = AgeGrid::new(20, 22).unwrap();
        let panel = PerformancePanel::new(
            grid,
            vec!["a".into(), "b".into()],
            vec![1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
            vec![true, false, true, true, false, true],
        )
        .unwrap();
        assert!(matches!(
            smoothed_boundary(&panel, 0.75, 4),
            Err(Error::BoundaryUndefined { age: 21 })
        ));
    }
}
