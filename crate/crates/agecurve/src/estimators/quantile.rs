//! Quantile-mapping estimator of the mean curve.
//!
//! The observed players at age t are treated as the top n_t of a pool of N_t
//! under a Normal model. The observed q-quantile nu_t then estimates the
//! population G_t = 1 - (n_t/N_t)(1-q) quantile, and the population mean
//! follows as zeta_t = nu_t - quantile(G_t) * sigma_t, with sigma_t the
//! observed standard deviation inflated by the truncation sd ratio.

use crate::error::{Error, Result};
use crate::numerics::{
    sample_quantile, std_normal_quantile, truncated_sd_ratio,
};
use crate::panel::{AgeCurve, PerformancePanel};

/// Per-age internals of a quantile fit.
#[derive(Debug, Clone)]
pub struct QuantileDiagnostics {
    /// Observed q-quantile per age.
    pub nu: Vec<f64>,
    /// Mapped population percentile G_t per age.
    pub big_g: Vec<f64>,
    /// Truncation sd ratio theta_t per age, in (0, 1].
    pub theta: Vec<f64>,
    /// Observed sample standard deviation per age.
    pub s_obs: Vec<f64>,
    /// Corrected population sd estimate per age (s_obs / theta).
    pub sigma_hat: Vec<f64>,
    /// Population mean estimate per age.
    pub zeta: Vec<f64>,
    /// Pool size N_t (players observable at any age).
    pub pool_size: usize,
}

/// Estimate the mean curve by quantile mapping with pool size `pool_size`
/// and percentile `q`.
pub fn quantile_curve(
    panel: &PerformancePanel,
    pool_size: usize,
    q: f64,
) -> Result<(AgeCurve, QuantileDiagnostics)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::ProbabilityOutOfDomain(q));
    }
    if pool_size == 0 {
        return Err(Error::InvalidParameter("pool size must be positive".into()));
    }
    let k = panel.n_ages();
    let mut diag = QuantileDiagnostics {
        nu: Vec::with_capacity(k),
        big_g: Vec::with_capacity(k),
        theta: Vec::with_capacity(k),
        s_obs: Vec::with_capacity(k),
        sigma_hat: Vec::with_capacity(k),
        zeta: Vec::with_capacity(k),
        pool_size,
    };
    let mut support = Vec::with_capacity(k);

    for idx in 0..k {
        let age = panel.grid().age_at(idx);
        let values = panel.observed_at_age(idx);
        let n = values.len();
        if n < 2 {
            return Err(Error::InsufficientObservations { age, observed: n, required: 2 });
        }
        if n > pool_size {
            return Err(Error::InconsistentPool { age, observed: n, pool: pool_size });
        }
        let fraction = n as f64 / pool_size as f64;
        let nu = sample_quantile(&values, q)?;
        let big_g = 1.0 - fraction * (1.0 - q);
        let mean = values.iter().sum::<f64>() / n as f64;
        let s = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        // Truncation point implied by the observed fraction: the observed are
        // the top n/N of the pool.
        let z = if fraction >= 1.0 {
            f64::NEG_INFINITY
        } else {
            std_normal_quantile(1.0 - fraction)?
        };
        let theta = truncated_sd_ratio(z);
        let sigma_hat = s / theta;
        let zeta = nu - std_normal_quantile(big_g)? * sigma_hat;

        diag.nu.push(nu);
        diag.big_g.push(big_g);
        diag.theta.push(theta);
        diag.s_obs.push(s);
        diag.sigma_hat.push(sigma_hat);
        diag.zeta.push(zeta);
        support.push(n);
    }

    let curve = AgeCurve::new(panel.grid(), diag.zeta.clone())?.with_support(support)?;
    Ok((curve, diag))
}

/// The closed-form percentile map on its own:
/// G = 1 - (n/N)(1 - q).
pub fn percentile_map(observed: usize, pool: usize, q: f64) -> f64 {
    1.0 - (observed as f64 / pool as f64) * (1.0 - q)
}
