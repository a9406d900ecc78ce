//! Simulate a career panel and apply performance-driven missingness.
//!
//! Shows the generating mean curve, a few simulated players, and how the
//! observed fraction by age tracks the target schedule after the
//! cumulative-performance selection step.
//!
//! ```bash
//! cargo run --example simulate_and_mask
//! ```

use agecurve::prelude::*;

fn main() -> Result<()> {
    let config = SimulationConfig::default();
    let truth = true_mean_curve(&config)?;
    let pi = config.resolved_pi()?;

    let mut rng = rng_from_seed(7);
    let (full, bundle) = simulate_panel(&config, &mut rng)?;
    let (masked, diag) = mask_panel(&full, &pi, &mut rng)?;
    let fractions = observed_fraction_by_age(&masked);

    println!("{} players, ages {}..{}", config.n_players, config.grid.t_min(), config.grid.t_max());
    println!("\nage  true_curve  pi_target  observed  fraction");
    for (idx, age) in config.grid.ages().enumerate() {
        println!(
            "{age:>3} {:>11.3} {:>10.3} {:>9} {:>9.3}",
            truth.values()[idx],
            pi[idx],
            diag.target_counts[idx],
            fractions[idx],
        );
    }

    // The mechanism selects on cumulative performance, so the players still
    // observed at 36 are much better than the ones that dropped out.
    let idx36 = config.grid.index_of(36).unwrap();
    let k = config.grid.len();
    let (mut obs_sum, mut obs_n, mut miss_sum, mut miss_n) = (0.0, 0, 0.0, 0);
    for i in 0..config.n_players {
        let quality = bundle.noiseless_values[i * k + idx36];
        if masked.is_observed(i, idx36) {
            obs_sum += quality;
            obs_n += 1;
        } else {
            miss_sum += quality;
            miss_n += 1;
        }
    }
    println!(
        "\ntrue (noiseless) quality at age 36: observed players {:.2} vs unobserved {:.2}",
        obs_sum / obs_n as f64,
        miss_sum / miss_n as f64
    );
    Ok(())
}
