//! The Delta and Delta Plus estimators.
//!
//! Year-over-year changes among players observed in both adjacent years are
//! accumulated into a level curve; Delta anchors the peak at zero, Delta
//! Plus at the maximum per-age observed mean.
//!
//! ```bash
//! cargo run --example delta_plus
//! ```

use agecurve::prelude::*;

fn main() -> Result<()> {
    // Tiny worked example: one player, three ages.
    let grid = AgeGrid::new(20, 22)?;
    let toy = PerformancePanel::fully_observed(
        grid,
        vec!["toy".into()],
        vec![1.0, 2.0, 1.5],
    )?;
    let (delta, diag) = delta_curve(&toy)?;
    let (delta_plus, _) = delta_plus_curve(&toy)?;
    println!("toy panel values (1.0, 2.0, 1.5):");
    println!("  year-over-year deltas: {:?}", diag.deltas);
    println!("  delta curve (peak anchored at 0):     {:?}", delta.values());
    println!("  delta-plus curve (peak at max mean):  {:?}", delta_plus.values());

    // On a realistic masked panel, the step sizes and pair counts show where
    // the method runs out of co-observed players.
    let config = SimulationConfig::default();
    let pi = config.resolved_pi()?;
    let mut rng = rng_from_seed(11);
    let (full, truth) = simulate_panel(&config, &mut rng)?;
    let (panel, _) = mask_panel(&full, &pi, &mut rng)?;
    let (curve, diag) = delta_plus_curve(&panel)?;

    println!("\nsimulated panel ({} players):", config.n_players);
    println!("age  pairs  delta    curve     truth");
    for (idx, age) in config.grid.ages().enumerate() {
        let step = if idx + 1 < config.grid.len() {
            format!("{:>7.3}", diag.deltas.get(idx).copied().unwrap_or(f64::NAN))
        } else {
            "      -".into()
        };
        let pairs = if idx + 1 < config.grid.len() {
            format!("{:>5}", diag.pair_counts[idx])
        } else {
            "    -".into()
        };
        println!(
            "{age:>3} {pairs} {step} {:>8.3} {:>9.3}",
            curve.values()[idx],
            truth.true_curve.values()[idx]
        );
    }
    Ok(())
}
