//! Sample quantiles by linear interpolation between order statistics
//! (the h = q*(n-1)+1 convention, R type 7).

use crate::error::{Error, Result};

/// Linear-interpolation sample quantile of `values` at probability `q`.
pub fn sample_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("sample_quantile"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "quantile probability must lie in [0, 1], got {q}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in quantile input"));
    let n = sorted.len();
    if n == 1 {
        return Ok(sorted[0]);
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        return Ok(sorted[n - 1]);
    }
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn odd_length_median() {
        assert_eq!(sample_quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5).unwrap(), 3.0);
    }

    #[test]
    fn even_length_median_interpolates() {
        assert_eq!(sample_quantile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
    }

    #[test]
    fn uniform_draws_quantile_near_probability() {
        let mut rng = rng_from_seed(3);
        let values: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let q75 = sample_quantile(&values, 0.75).unwrap();
        assert!((q75 - 0.75).abs() < 0.03, "got {q75}");
    }

    #[test]
    fn monotone_in_probability() {
        let values = [0.3, -1.2, 4.5, 2.2, 0.0, 1.7, -0.4];
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=20 {
            let q = i as f64 / 20.0;
            let v = sample_quantile(&values, q).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn endpoints_and_errors() {
        let values = [5.0, 1.0, 3.0];
        assert_eq!(sample_quantile(&values, 0.0).unwrap(), 1.0);
        assert_eq!(sample_quantile(&values, 1.0).unwrap(), 5.0);
        assert!(sample_quantile(&[], 0.5).is_err());
        assert!(sample_quantile(&values, 1.5).is_err());
    }
}
