//! Mean aging-curve estimators and the method:data:effects dispatcher.

pub mod delta;
pub mod quantile;
pub mod regression;

use rand::Rng;

use crate::error::Result;
use crate::fit::{FitResult, PlayerEffects};
use crate::imputation::{impute_panel, ImputationConfig};
use crate::panel::PerformancePanel;
use crate::spec::{DataChoice, EffectKind, EstimatorSpec, Method};

pub use delta::{delta_curve, delta_plus_curve, DeltaDiagnostics};
pub use quantile::{quantile_curve, QuantileDiagnostics};
pub use regression::fit_regression_curve;

/// Run one estimator on a panel.
///
/// - `data = obs` fits on the observed cells only.
/// - `data = trunc`/`notrunc` first completes the panel by two-pass
///   imputation (quantile means when the method is `quant`, otherwise
///   spline+fixed regression means), then fits on the completed panel. The
///   quant method's final fit is a natural spline with fixed effects.
/// - `delta-plus` ignores effects and imputation.
///
/// `pool_size` is the quantile estimator's population size N_t; it defaults
/// to the panel's player count.
pub fn estimate(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    pool_size: Option<usize>,
    rng: &mut impl Rng,
) -> Result<FitResult> {
    let pool = pool_size.unwrap_or_else(|| panel.n_players());

    if spec.method == Method::DeltaPlus {
        let (curve, _) = delta_plus_curve(panel)?;
        return FitResult::new(curve, PlayerEffects::None, 0.0, spec.clone());
    }

    if spec.data == DataChoice::Observed {
        return match spec.method {
            Method::Quant => {
                let (curve, _) = quantile_curve(panel, pool, spec.boundary_quantile)?;
                FitResult::new(curve, PlayerEffects::None, 0.0, spec.clone())
            }
            Method::Spline | Method::Quad => fit_regression_curve(panel, spec),
            Method::DeltaPlus => unreachable!(),
        };
    }

    // Imputation path.
    let config = ImputationConfig::for_spec(spec)?;
    let (completed, _trace) = impute_panel(panel, spec, &config, rng)?;
    let final_spec = if spec.method == Method::Quant {
        // quant:trunc:fixed reports a spline + fixed-effects fit to the
        // quantile-imputed values.
        EstimatorSpec::custom(Method::Spline, spec.data, EffectKind::Fixed)
            .with_spline_df(spec.spline_df)
            .with_boundary_quantile(spec.boundary_quantile)
    } else {
        spec.clone()
    };
    let mut fit = fit_regression_curve(&completed, &final_spec)?;
    fit.spec = spec.clone();
    Ok(fit)
}
