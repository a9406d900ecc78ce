//! Mean player aging-curve estimation from incomplete performance panels.
//!
//! Player performance data is missing not-at-random: who gets observed at an
//! age depends on how well they have performed. This crate provides the full
//! estimator family for the mean aging curve g(t) under that selection
//! mechanism, plus a simulator and evaluation harness for comparing the
//! estimators at desk scale:
//!
//! - **Delta / Delta Plus**: year-over-year changes among co-observed
//!   players, accumulated and anchored ([`estimators::delta_plus_curve`]).
//! - **Spline / quadratic regressions** with no, fixed, or shrunken random
//!   player effects ([`estimators::fit_regression_curve`]).
//! - **Quantile mapping**: observed percentiles mapped to population
//!   percentiles through the observed fraction
//!   ([`estimators::quantile_curve`]).
//! - **Two-pass truncated-Normal imputation** of unobserved cells
//!   ([`imputation::impute_panel`]).
//! - **Simulation**: piecewise-cubic generating curve, player random
//!   effects, cumulative-performance missingness, factorial sweeps
//!   ([`simulation`]).
//! - **Evaluation**: per-age RMSE, shape-based distance, player bootstrap
//!   ([`evaluation`]).
//!
//! Estimators are addressed by the `method:data:effects` shorthand, e.g.
//! `spline:obs:fixed` or `quant:trunc:fixed`; see [`spec::EstimatorSpec`].
//!
//! ```
//! use agecurve::prelude::*;
//!
//! let config = SimulationConfig::default();
//! let mut rng = rng_from_seed(7);
//! let (full, truth) = simulate_panel(&config, &mut rng).unwrap();
//! let pi = config.resolved_pi().unwrap();
//! let (panel, _) = mask_panel(&full, &pi, &mut rng).unwrap();
//!
//! let spec = EstimatorSpec::preset("spline:obs:fixed").unwrap();
//! let fit = estimate(&panel, &spec, None, &mut rng).unwrap();
//! let rmse = rmse_by_age(&[fit.curve], &truth.true_curve).unwrap();
//! assert_eq!(rmse.len(), config.grid.len());
//! ```
//!
//! Every stochastic routine takes an explicit RNG or root seed and is
//! bit-reproducible; see the `examples/` directory for one runnable program
//! per capability and `src/bin/agecurve.rs` for the batch CLI.

pub mod data;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod fit;
pub mod imputation;
pub mod io;
pub mod numerics;
pub mod panel;
pub mod rng;
pub mod simulation;
pub mod spec;

pub use error::{Error, Result};

/// The commonly used surface in one import.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::estimators::{
        delta_curve, delta_plus_curve, estimate, fit_regression_curve, quantile_curve,
    };
    pub use crate::evaluation::{
        bootstrap_curves, rmse_by_age, shape_based_distance, BootstrapBundle, EvaluationReport,
    };
    pub use crate::fit::{FitResult, PlayerEffects};
    pub use crate::imputation::{impute_panel, smoothed_boundary, ImputationConfig, MeanSource};
    pub use crate::numerics::AgeGrid;
    pub use crate::panel::{apply_affine, observed_fraction_by_age, AgeCurve, PerformancePanel};
    pub use crate::rng::{derive_seed, rng_from_seed};
    pub use crate::simulation::{
        default_pi_schedule, generate_mask, mask_panel, run_factorial, simulate_panel,
        true_mean_curve, SimulationConfig, SweepSpec, TruthBundle,
    };
    pub use crate::spec::{DataChoice, EffectKind, EstimatorSpec, Method};
}
