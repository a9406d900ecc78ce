//! A small factorial simulation study: simulate, mask, run every estimator,
//! and score per-age RMSE and shape-based distance against the truth.
//!
//! ```bash
//! cargo run --release --example sweep_study
//! ```

use agecurve::prelude::*;

fn main() -> Result<()> {
    let base = SimulationConfig::default();
    let sweep = SweepSpec {
        n_players: vec![300],
        omega: vec![0.0],
        sigma_gamma: vec![0.8],
    };
    let specs = EstimatorSpec::all_presets();
    let replications = 20;
    let report = run_factorial(&base, &sweep, &specs, replications, 42)?;

    println!(
        "{} cell(s) x {replications} replications x {} specs\n",
        report.cells.len(),
        specs.len()
    );
    println!("{:<28} {:>10} {:>10} {:>9}", "spec", "mean RMSE", "median SBD", "failures");
    for (s, spec) in report.specs.iter().enumerate() {
        println!(
            "{:<28} {:>10.4} {:>10.4} {:>9}",
            spec.to_string(),
            report.mean_rmse(s),
            report.median_sbd(s),
            report.total_failures(s)
        );
    }

    println!("\nper-age RMSE for two estimators:");
    let show = ["spline:obs:fixed", "delta-plus"];
    print!("age ");
    for name in show {
        print!("{name:>18}");
    }
    println!();
    let indices: Vec<usize> = show
        .iter()
        .map(|n| report.specs.iter().position(|s| s.to_string() == *n).unwrap())
        .collect();
    for (idx, age) in report.grid.ages().enumerate() {
        print!("{age:>3} ");
        for &s in &indices {
            print!("{:>18.3}", report.rmse_by_age(s)[idx]);
        }
        println!();
    }
    Ok(())
}
