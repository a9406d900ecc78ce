//! Shared numerical routines: age grids, spline bases, least squares,
//! Normal/truncated-Normal functions, and sample quantiles.
//!
//! Everything here is a pure function of its inputs (plus an explicitly
//! passed RNG where noted), so concurrent callers are safe as long as each
//! owns its RNG.

pub mod grid;
pub mod lstsq;
pub mod normal;
pub mod quantile;
pub mod spline;

pub use grid::AgeGrid;
pub use lstsq::{least_squares_fit, LeastSquaresFit};
pub use normal::{
    normal_draw, std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf,
    truncated_normal_mean, truncated_normal_sample, truncated_normal_sd, truncated_sd_ratio,
};
pub use quantile::sample_quantile;
pub use spline::{natural_spline_basis, BasisMatrix, NaturalSplineBasis};
