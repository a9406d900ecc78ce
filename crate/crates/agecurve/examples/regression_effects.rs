//! Spline and quadratic regressions with none / fixed / random player
//! effects, compared on the same selection-biased panel.
//!
//! ```bash
//! cargo run --example regression_effects
//! ```

use agecurve::prelude::*;

fn main() -> Result<()> {
    let config = SimulationConfig::default();
    let pi = config.resolved_pi()?;
    let mut rng = rng_from_seed(23);
    let (full, truth) = simulate_panel(&config, &mut rng)?;
    let (panel, _) = mask_panel(&full, &pi, &mut rng)?;

    let specs = [
        "spline:obs:none",
        "spline:obs:fixed",
        "spline:trunc:random-quad",
        "spline:trunc:random-spline",
        "quad:trunc:fixed",
    ];
    let mut fits = Vec::new();
    for name in specs {
        let spec = EstimatorSpec::preset(name)?;
        let mut est_rng = rng_from_seed(101);
        fits.push(estimate(&panel, &spec, None, &mut est_rng)?);
    }

    println!("age    truth  obs:none obs:fixed  rnd-quad rnd-spline      quad");
    for (idx, age) in config.grid.ages().enumerate() {
        print!("{age:>3} {:>8.3}", truth.true_curve.values()[idx]);
        for fit in &fits {
            print!(" {:>9.3}", fit.curve.values()[idx]);
        }
        println!();
    }

    // Fixed effects are unshrunken; random effects are pulled toward zero.
    let fixed = &fits[1];
    let random = &fits[2];
    let spread = |effects: &PlayerEffects| {
        let devs: Vec<f64> = (0..panel.n_players())
            .map(|i| {
                config.grid.ages().map(|t| effects.deviation(i, t as f64)).sum::<f64>()
                    / config.grid.len() as f64
            })
            .collect();
        let mean = devs.iter().sum::<f64>() / devs.len() as f64;
        (devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (devs.len() - 1) as f64).sqrt()
    };
    println!(
        "\nplayer-deviation spread: fixed {:.3} vs random-quad {:.3} (shrinkage)",
        spread(&fixed.effects),
        spread(&random.effects)
    );
    println!(
        "residual sd: obs:fixed {:.3}, random-quad {:.3}",
        fixed.residual_sd, random.residual_sd
    );
    Ok(())
}
