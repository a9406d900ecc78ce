//! Ordinary least squares via the normal equations with an optional tiny
//! ridge fallback for collinear designs.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of a least-squares problem.
#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    pub coefficients: DVector<f64>,
    /// Residual standard deviation with denominator (rows - cols); zero when
    /// the system interpolates exactly.
    pub residual_sd: f64,
    /// True when the ridge fallback had to fire to make the normal equations
    /// solvable.
    pub ridge_used: bool,
}

/// Solve `argmin ||design * beta - response||^2`.
///
/// Requires `rows >= cols`. A rank-deficient design errors with
/// [`Error::SingularDesign`] unless `allow_ridge` is set, in which case a
/// 1e-8-scale ridge is added to the normal-equation diagonal and the fit is
/// flagged via `ridge_used`.
pub fn least_squares_fit(
    design: &DMatrix<f64>,
    response: &DVector<f64>,
    allow_ridge: bool,
) -> Result<LeastSquaresFit> {
    let rows = design.nrows();
    let cols = design.ncols();
    if rows < cols {
        return Err(Error::UnderdeterminedDesign { rows, cols });
    }
    if response.len() != rows {
        return Err(Error::InvalidParameter(format!(
            "response length {} does not match design rows {rows}",
            response.len()
        )));
    }
    let xtx = design.transpose() * design;
    let xty = design.transpose() * response;

    let (chol, ridge_used) = match Cholesky::new(xtx.clone()) {
        Some(c) => (c, false),
        None if allow_ridge => {
            let scale = xtx.diagonal().amax().max(1.0);
            let mut ridged = xtx;
            for i in 0..cols {
                ridged[(i, i)] += 1e-8 * scale;
            }
            match Cholesky::new(ridged) {
                Some(c) => (c, true),
                None => return Err(Error::SingularDesign),
            }
        }
        None => return Err(Error::SingularDesign),
    };

    let coefficients = chol.solve(&xty);
    let residuals = response - design * &coefficients;
    let dof = rows.saturating_sub(cols);
    let residual_sd = if dof == 0 {
        0.0
    } else {
        (residuals.norm_squared() / dof as f64).sqrt()
    };
    Ok(LeastSquaresFit { coefficients, residual_sd, ridge_used })
}
