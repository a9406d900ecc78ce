//! Estimator specifications: the method:data:effects naming scheme.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the mean curve is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    DeltaPlus,
    Spline,
    Quad,
    Quant,
}

/// Which data the final fit sees: observed cells only, or a panel completed
/// by imputation with or without the truncation boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataChoice {
    Observed,
    TruncatedImputed,
    UntruncatedImputed,
}

/// Player-effect structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectKind {
    None,
    Fixed,
    RandomQuad,
    RandomSpline,
}

/// One estimation recipe. The ten supported presets mirror the shorthand
/// `method:data:effects` (with `delta-plus` standing alone).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub method: Method,
    pub data: DataChoice,
    pub effects: EffectKind,
    /// Degrees of freedom for every natural spline fit.
    pub spline_df: usize,
    /// Percentile used both by the quantile estimator and as the imputation
    /// boundary quantile.
    pub boundary_quantile: f64,
    /// True when the triple is not one of the named presets.
    pub custom: bool,
}

pub const DEFAULT_SPLINE_DF: usize = 6;
pub const DEFAULT_BOUNDARY_QUANTILE: f64 = 0.75;

const PRESETS: [(&str, Method, DataChoice, EffectKind); 10] = [
    ("delta-plus", Method::DeltaPlus, DataChoice::Observed, EffectKind::None),
    ("spline:obs:none", Method::Spline, DataChoice::Observed, EffectKind::None),
    ("spline:obs:fixed", Method::Spline, DataChoice::Observed, EffectKind::Fixed),
    ("spline:trunc:fixed", Method::Spline, DataChoice::TruncatedImputed, EffectKind::Fixed),
    ("spline:notrunc:fixed", Method::Spline, DataChoice::UntruncatedImputed, EffectKind::Fixed),
    ("quant:trunc:fixed", Method::Quant, DataChoice::TruncatedImputed, EffectKind::Fixed),
    ("quant:obs:none", Method::Quant, DataChoice::Observed, EffectKind::None),
    ("quad:trunc:fixed", Method::Quad, DataChoice::TruncatedImputed, EffectKind::Fixed),
    (
        "spline:trunc:random-quad",
        Method::Spline,
        DataChoice::TruncatedImputed,
        EffectKind::RandomQuad,
    ),
    (
        "spline:trunc:random-spline",
        Method::Spline,
        DataChoice::TruncatedImputed,
        EffectKind::RandomSpline,
    ),
];

impl EstimatorSpec {
    fn with_triple(method: Method, data: DataChoice, effects: EffectKind, custom: bool) -> Self {
        EstimatorSpec {
            method,
            data,
            effects,
            spline_df: DEFAULT_SPLINE_DF,
            boundary_quantile: DEFAULT_BOUNDARY_QUANTILE,
            custom,
        }
    }

    /// One of the ten named presets.
    pub fn preset(name: &str) -> Result<Self> {
        for (preset_name, method, data, effects) in PRESETS {
            if name == preset_name {
                return Ok(EstimatorSpec::with_triple(method, data, effects, false));
            }
        }
        Err(Error::SpecError(format!(
            "unknown preset '{name}'; known presets: {}",
            PRESETS.map(|p| p.0).join(", ")
        )))
    }

    /// An arbitrary method:data:effects combination, explicitly flagged as
    /// custom when it is not one of the presets.
    pub fn custom(method: Method, data: DataChoice, effects: EffectKind) -> Self {
        let is_preset = PRESETS
            .iter()
            .any(|(_, m, d, e)| *m == method && *d == data && *e == effects);
        EstimatorSpec::with_triple(method, data, effects, !is_preset)
    }

    /// All ten presets in the order of the estimation-methods summary.
    pub fn all_presets() -> Vec<EstimatorSpec> {
        PRESETS
            .iter()
            .map(|(_, m, d, e)| EstimatorSpec::with_triple(*m, *d, *e, false))
            .collect()
    }

    pub fn with_spline_df(mut self, df: usize) -> Self {
        self.spline_df = df;
        self
    }

    pub fn with_boundary_quantile(mut self, q: f64) -> Self {
        self.boundary_quantile = q;
        self
    }

    /// True when the final fit runs on an imputed (completed) panel.
    pub fn uses_imputation(&self) -> bool {
        matches!(
            self.data,
            DataChoice::TruncatedImputed | DataChoice::UntruncatedImputed
        )
    }

    /// True when estimation consumes randomness (imputation draws).
    pub fn is_stochastic(&self) -> bool {
        self.uses_imputation()
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.method == Method::DeltaPlus {
            return write!(f, "delta-plus");
        }
        let method = match self.method {
            Method::DeltaPlus => unreachable!(),
            Method::Spline => "spline",
            Method::Quad => "quad",
            Method::Quant => "quant",
        };
        let data = match self.data {
            DataChoice::Observed => "obs",
            DataChoice::TruncatedImputed => "trunc",
            DataChoice::UntruncatedImputed => "notrunc",
        };
        let effects = match self.effects {
            EffectKind::None => "none",
            EffectKind::Fixed => "fixed",
            EffectKind::RandomQuad => "random-quad",
            EffectKind::RandomSpline => "random-spline",
        };
        write!(f, "{method}:{data}:{effects}")
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorSpec::preset(s.trim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ten_presets_parse_and_round_trip() {
        let presets = EstimatorSpec::all_presets();
        assert_eq!(presets.len(), 10);
        for spec in presets {
            let name = spec.to_string();
            let parsed: EstimatorSpec = name.parse().unwrap();
            assert_eq!(parsed, spec, "{name}");
            assert!(!parsed.custom);
        }
    }

    #[test]
    fn unknown_preset_rejected() {
        assert!("spline:obs:random-quad".parse::<EstimatorSpec>().is_err());
        assert!("nonsense".parse::<EstimatorSpec>().is_err());
    }

    #[test]
    fn custom_flag_set_only_off_preset() {
        let c = EstimatorSpec::custom(Method::Spline, DataChoice::Observed, EffectKind::RandomQuad);
        assert!(c.custom);
        let p = EstimatorSpec::custom(Method::Spline, DataChoice::Observed, EffectKind::Fixed);
        assert!(!p.custom);
    }

    #[test]
    fn defaults_match_documented_values() {
        let spec = EstimatorSpec::preset("spline:trunc:fixed").unwrap();
        assert_eq!(spec.spline_df, 6);
        assert_eq!(spec.boundary_quantile, 0.75);
        assert!(spec.uses_imputation());
        assert!(spec.is_stochastic());
        let obs = EstimatorSpec::preset("spline:obs:fixed").unwrap();
        assert!(!obs.is_stochastic());
    }
}
