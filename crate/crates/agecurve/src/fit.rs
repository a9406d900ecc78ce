//! Fitted player effects and fit results.

use crate::error::{Error, Result};
use crate::numerics::NaturalSplineBasis;
use crate::panel::AgeCurve;
use crate::spec::{EffectKind, EstimatorSpec};

/// Per-player deviations from the population curve.
///
/// Fixed intercepts are centered to sum to zero across the players that
/// entered the fit; random effects are shrunken and centered the same way.
/// Players with no observed (or imputed) cells carry effect zero, i.e. they
/// sit on the population curve.
#[derive(Debug, Clone, PartialEq)]
pub enum PlayerEffects {
    None,
    Fixed {
        intercepts: Vec<f64>,
    },
    /// Constant + linear + quadratic deviation per player, in raw age units:
    /// `deviation(i, t) = intercepts[i] + linear[i] * t + quadratic[i] * t^2`.
    RandomQuad {
        intercepts: Vec<f64>,
        linear: Vec<f64>,
        quadratic: Vec<f64>,
    },
    /// Constant plus a natural-spline deviation of the same degree as the
    /// population curve:
    /// `deviation(i, t) = intercepts[i] + sum_j spline_coeffs[i][j] * basis_column_{j+1}(t)`.
    RandomSpline {
        intercepts: Vec<f64>,
        spline_coeffs: Vec<Vec<f64>>,
        basis: NaturalSplineBasis,
    },
}

impl PlayerEffects {
    pub fn kind(&self) -> EffectKind {
        match self {
            PlayerEffects::None => EffectKind::None,
            PlayerEffects::Fixed { .. } => EffectKind::Fixed,
            PlayerEffects::RandomQuad { .. } => EffectKind::RandomQuad,
            PlayerEffects::RandomSpline { .. } => EffectKind::RandomSpline,
        }
    }

    /// Deviation of one player from the population curve at a given age.
    pub fn deviation(&self, player: usize, age: f64) -> f64 {
        match self {
            PlayerEffects::None => 0.0,
            PlayerEffects::Fixed { intercepts } => intercepts[player],
            PlayerEffects::RandomQuad { intercepts, linear, quadratic } => {
                intercepts[player] + linear[player] * age + quadratic[player] * age * age
            }
            PlayerEffects::RandomSpline { intercepts, spline_coeffs, basis } => {
                let row = basis.row(age);
                let mut dev = intercepts[player];
                for (c, b) in spline_coeffs[player].iter().zip(row.iter().skip(1)) {
                    dev += c * b;
                }
                dev
            }
        }
    }

    /// Per-player constant terms, when the structure has them.
    pub fn intercepts(&self) -> Option<&[f64]> {
        match self {
            PlayerEffects::None => None,
            PlayerEffects::Fixed { intercepts }
            | PlayerEffects::RandomQuad { intercepts, .. }
            | PlayerEffects::RandomSpline { intercepts, .. } => Some(intercepts),
        }
    }
}

/// Result of fitting an estimator to a panel.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub curve: AgeCurve,
    pub effects: PlayerEffects,
    /// Residual standard deviation of the fitted mean model (sigma_0 in the
    /// imputation algorithm). Zero for estimators with no residual notion.
    pub residual_sd: f64,
    pub spec: EstimatorSpec,
}

impl FitResult {
    pub fn new(
        curve: AgeCurve,
        effects: PlayerEffects,
        residual_sd: f64,
        spec: EstimatorSpec,
    ) -> Result<Self> {
        if residual_sd.is_nan() || residual_sd < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "residual sd must be nonnegative, got {residual_sd}"
            )));
        }
        Ok(FitResult { curve, effects, residual_sd, spec })
    }
}
