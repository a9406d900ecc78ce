//! The quantile-mapping estimator.
//!
//! When only the top n_t of N_t players are observed at an age, the observed
//! q-quantile corresponds to a higher population percentile
//! G = 1 - (n/N)(1-q). Assuming Normal performance, the population mean
//! follows from the observed quantile and a truncation-corrected sd.
//!
//! ```bash
//! cargo run --example quantile_mapping
//! ```

use agecurve::estimators::quantile::percentile_map;
use agecurve::prelude::*;

fn main() -> Result<()> {
    // The worked percentile map: 400 observed out of 1000.
    println!("400 of 1000 observed:");
    println!("  observed 75th percentile -> population {:.0}th", 100.0 * percentile_map(400, 1000, 0.75));
    println!("  observed 25th percentile -> population {:.0}th", 100.0 * percentile_map(400, 1000, 0.25));

    // Full per-age machinery on a masked simulated panel.
    let config = SimulationConfig::default();
    let pi = config.resolved_pi()?;
    let mut rng = rng_from_seed(5);
    let (full, truth) = simulate_panel(&config, &mut rng)?;
    let (panel, _) = mask_panel(&full, &pi, &mut rng)?;

    let (curve, diag) = quantile_curve(&panel, panel.n_players(), 0.75)?;
    println!("\nage   n_t     nu_t    G_t  theta_t  sigma_hat   zeta_t    truth");
    for (idx, age) in config.grid.ages().enumerate() {
        println!(
            "{age:>3} {:>5} {:>8.3} {:>6.3} {:>8.3} {:>10.3} {:>8.3} {:>8.3}",
            curve.support_counts().unwrap()[idx],
            diag.nu[idx],
            diag.big_g[idx],
            diag.theta[idx],
            diag.sigma_hat[idx],
            diag.zeta[idx],
            truth.true_curve.values()[idx],
        );
    }
    println!(
        "\nnote how the sd correction (sigma_hat = s_t / theta_t) grows as the\nobserved fraction shrinks: tiny old-age samples make zeta_t noisy."
    );
    Ok(())
}
