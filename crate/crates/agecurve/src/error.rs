//! Error types shared across the crate.

use thiserror::Error;

/// All errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degrees of freedom must be at least 2, got {0}")]
    InvalidDegreesOfFreedom(usize),

    #[error("age {age} lies outside the boundary range [{min}, {max}]")]
    AgeOutOfRange { age: f64, min: f64, max: f64 },

    #[error("spline knots are not strictly increasing (data too concentrated for {df} degrees of freedom)")]
    DegenerateKnots { df: usize },

    #[error("design matrix is singular or rank deficient and the ridge fallback is disabled")]
    SingularDesign,

    #[error("design has {rows} rows but {cols} columns; need rows >= cols")]
    UnderdeterminedDesign { rows: usize, cols: usize },

    #[error("probability must lie strictly inside (0, 1), got {0}")]
    ProbabilityOutOfDomain(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("affine transform must have nonzero scale")]
    InvalidTransform,

    #[error("no player is observed at both ages {age} and {next}; delta step undefined")]
    InsufficientPairs { age: i32, next: i32 },

    #[error("observed count {observed} exceeds the stated pool size {pool} at age {age}")]
    InconsistentPool { age: i32, observed: usize, pool: usize },

    #[error("age {age} has {observed} observed values; at least {required} required")]
    InsufficientObservations { age: i32, observed: usize, required: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unsupported estimator combination: {0}")]
    SpecError(String),

    #[error("imputation boundary undefined: age {age} has no observed values")]
    BoundaryUndefined { age: i32 },

    #[error("missingness schedule asks for {requested} of {available} players at age {age}")]
    ScheduleError { age: i32, requested: usize, available: usize },

    #[error("grid [{t_min}, {t_max}] does not span the ages required by the default schedule (18-36)")]
    UnsupportedGrid { t_min: i32, t_max: i32 },

    #[error("curves are defined on different age grids")]
    GridMismatch,

    #[error("curve has zero norm; shape-based distance undefined")]
    DegenerateCurve,

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("duplicate record for ({player}, {season}): lines {first_line} and {second_line}")]
    DuplicateRecord { player: String, season: i32, first_line: usize, second_line: usize },

    #[error("season {season} has {count} usable records; at least 2 required to standardize")]
    CannotStandardize { season: i32, count: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
