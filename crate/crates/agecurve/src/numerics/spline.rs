//! Natural cubic spline basis construction.
//!
//! The basis spans the full natural cubic spline space (constants and linear
//! functions included) with `df` columns: boundary knots at the grid ends,
//! `df - 2` interior knots at equally spaced quantiles of the supplied ages.
//! Ages are rescaled to [0, 1] internally so the truncated-cube terms stay
//! well conditioned. Beyond the boundary knots every basis combination is
//! exactly linear, which is the natural condition.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::grid::AgeGrid;
use crate::numerics::quantile::sample_quantile;

/// Dense design matrix: one row per evaluation age, one column per basis
/// function.
pub type BasisMatrix = DMatrix<f64>;

/// A natural cubic spline basis pinned to a boundary range and a knot set.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalSplineBasis {
    // Knots in the scaled [0, 1] coordinate; first is 0.0, last is 1.0.
    knots: Vec<f64>,
    t_min: f64,
    t_max: f64,
}

impl NaturalSplineBasis {
    /// Build a basis with `df` columns. Interior knots sit at equally spaced
    /// quantiles of `ages`; boundary knots at the grid ends.
    pub fn from_ages(ages: &[f64], df: usize, boundary: &AgeGrid) -> Result<Self> {
        if df < 2 {
            return Err(Error::InvalidDegreesOfFreedom(df));
        }
        if ages.is_empty() {
            return Err(Error::EmptyInput("spline basis ages"));
        }
        let t_min = boundary.t_min() as f64;
        let t_max = boundary.t_max() as f64;
        for &age in ages {
            if age < t_min || age > t_max {
                return Err(Error::AgeOutOfRange { age, min: t_min, max: t_max });
            }
        }
        let span = t_max - t_min;
        let interior = df - 2;
        let mut knots = Vec::with_capacity(df);
        knots.push(0.0);
        for j in 1..=interior {
            let level = j as f64 / (interior + 1) as f64;
            let knot = sample_quantile(ages, level)?;
            knots.push((knot - t_min) / span);
        }
        knots.push(1.0);
        for w in knots.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::DegenerateKnots { df });
            }
        }
        Ok(NaturalSplineBasis { knots, t_min, t_max })
    }

    /// Number of basis functions.
    pub fn df(&self) -> usize {
        self.knots.len()
    }

    fn scale(&self, age: f64) -> f64 {
        (age - self.t_min) / (self.t_max - self.t_min)
    }

    /// Evaluate all basis functions at one age. Evaluation outside the
    /// boundary range is permitted and extrapolates linearly (the natural
    /// condition).
    pub fn row(&self, age: f64) -> Vec<f64> {
        let u = self.scale(age);
        let k = self.knots.len();
        let mut out = Vec::with_capacity(k);
        out.push(1.0);
        out.push(u);
        if k == 2 {
            return out;
        }
        let last = self.knots[k - 1];
        let d_last = self.d(k - 2, u, last);
        for j in 0..(k - 2) {
            out.push(self.d(j, u, last) - d_last);
        }
        out
    }

    // d_j(u) = [ (u - xi_j)_+^3 - (u - xi_K)_+^3 ] / (xi_K - xi_j)
    fn d(&self, j: usize, u: f64, last: f64) -> f64 {
        let xi = self.knots[j];
        (pos_cube(u - xi) - pos_cube(u - last)) / (last - xi)
    }

    /// Design matrix over a list of ages.
    pub fn matrix(&self, ages: &[f64]) -> BasisMatrix {
        let rows = ages.len();
        let cols = self.df();
        let mut m = DMatrix::zeros(rows, cols);
        for (r, &age) in ages.iter().enumerate() {
            for (c, v) in self.row(age).into_iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }
}

fn pos_cube(v: f64) -> f64 {
    if v > 0.0 {
        v * v * v
    } else {
        0.0
    }
}

/// Natural cubic spline basis evaluated at `ages`: `df` columns, interior
/// knots at equally spaced quantiles of `ages`, boundary knots at the grid
/// ends. Errors if `df < 2` or any age falls outside the boundary range.
pub fn natural_spline_basis(ages: &[f64], df: usize, boundary: &AgeGrid) -> Result<BasisMatrix> {
    let basis = NaturalSplineBasis::from_ages(ages, df, boundary)?;
    Ok(basis.matrix(ages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::lstsq::least_squares_fit;
    use nalgebra::DVector;

    fn grid() -> AgeGrid {
        AgeGrid::new(18, 40).unwrap()
    }

    fn grid_ages() -> Vec<f64> {
        grid().ages().map(|t| t as f64).collect()
    }

    #[test]
    fn shape_matches_requested_df() {
        let m = natural_spline_basis(&grid_ages(), 6, &grid()).unwrap();
        assert_eq!(m.nrows(), 23);
        assert_eq!(m.ncols(), 6);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let basis = NaturalSplineBasis::from_ages(&grid_ages(), 6, &grid()).unwrap();
        assert_eq!(basis.row(27.3), basis.row(27.3));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            natural_spline_basis(&grid_ages(), 1, &grid()),
            Err(Error::InvalidDegreesOfFreedom(1))
        ));
        assert!(matches!(
            natural_spline_basis(&[17.0, 20.0, 30.0], 4, &grid()),
            Err(Error::AgeOutOfRange { .. })
        ));
        // All ages identical: interior quantile knots collapse.
        assert!(matches!(
            natural_spline_basis(&[25.0; 10], 6, &grid()),
            Err(Error::DegenerateKnots { .. })
        ));
    }

    #[test]
    fn reproduces_linear_functions_exactly() {
        let ages = grid_ages();
        let basis = NaturalSplineBasis::from_ages(&ages, 6, &grid()).unwrap();
        let design = basis.matrix(&ages);
        let y = DVector::from_iterator(ages.len(), ages.iter().map(|t| 2.0 * t));
        let fit = least_squares_fit(&design, &y, false).unwrap();
        let fitted = design * &fit.coefficients;
        for (i, t) in ages.iter().enumerate() {
            assert!(
                (fitted[i] - 2.0 * t).abs() < 1e-9,
                "age {t}: fitted {} want {}",
                fitted[i],
                2.0 * t
            );
        }
    }

    #[test]
    fn second_derivative_vanishes_beyond_boundaries() {
        // Fit a curve, then check second finite differences of the fitted
        // function on a fine grid at and beyond both boundary knots.
        let ages = grid_ages();
        let basis = NaturalSplineBasis::from_ages(&ages, 6, &grid()).unwrap();
        let design = basis.matrix(&ages);
        let y = DVector::from_iterator(ages.len(), ages.iter().map(|t| (t / 6.0).sin()));
        let fit = least_squares_fit(&design, &y, false).unwrap();
        let eval = |t: f64| -> f64 {
            basis
                .row(t)
                .iter()
                .zip(fit.coefficients.iter())
                .map(|(b, c)| b * c)
                .sum()
        };
        let h = 1e-4;
        for t in [18.0, 17.5, 16.0, 40.0, 40.5, 42.0] {
            let second = (eval(t + h) - 2.0 * eval(t) + eval(t - h)) / (h * h);
            assert!(second.abs() < 1e-6, "second derivative at {t} is {second}");
        }
    }

    #[test]
    fn each_basis_column_is_linear_outside_the_boundary() {
        let ages = grid_ages();
        let basis = NaturalSplineBasis::from_ages(&ages, 6, &grid()).unwrap();
        let h = 1e-4;
        for col in 0..basis.df() {
            for t in [18.0, 17.0, 15.5, 40.0, 41.0, 43.5] {
                let f = |t: f64| basis.row(t)[col];
                let second = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                assert!(
                    second.abs() < 1e-6,
                    "column {col} curvature at {t} is {second}"
                );
            }
        }
    }
}
