//! Ingest player-season records from CSV, standardize points per game within
//! each season, and fit aging curves to the resulting panel.
//!
//! The example writes a small synthetic records file in the documented
//! schema, which is the same path real exported data takes.
//!
//! ```bash
//! cargo run --example nhl_ingestion
//! ```

use std::io::Write;

use agecurve::data::{build_panel, load_records, PanelFilters, SimpleDate};
use agecurve::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("agecurve_ingestion_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("records.csv");

    // player_id,birth_date,season_start_year,position,games_played,goals,assists
    let mut file = std::fs::File::create(&path)?;
    writeln!(file, "player_id,birth_date,season_start_year,position,games_played,goals,assists")?;
    for p in 0..12u32 {
        let birth_year = 1978 + (p % 4) as i32;
        for season in 2000..2012 {
            // A mild career arc plus player-specific level, in raw points.
            let age = season + 1 - birth_year;
            let peak = 60.0 - 0.6 * (age as f64 - 26.0).powi(2) + 3.0 * p as f64;
            let games = 60 + (p as i32 + season) % 20;
            let goals = (peak * 0.45).max(0.0) as u32;
            let assists = (peak * 0.55).max(0.0) as u32;
            writeln!(
                file,
                "fwd{p:02},{birth_year}-03-0{},{season},F,{games},{goals},{assists}",
                1 + p % 9
            )?;
        }
    }
    // One retired-early defender filtered out by position below.
    writeln!(file, "def00,1979-06-15,2003,D,70,4,18")?;

    let set = load_records(&path)?;
    println!(
        "loaded {} records ({} skipped for zero games)",
        set.records.len(),
        set.skipped_zero_games
    );

    let filters = PanelFilters {
        positions: Some(vec!["F".into()]),
        min_birth_date: Some(SimpleDate::new(1970, 1, 1)?),
        season_range: Some((2000, 2011)),
        age_cutoff: (1, 31),
    };
    let grid = AgeGrid::new(18, 40)?;
    let panel = build_panel(&set.records, grid, &filters)?;
    println!(
        "panel: {} players x {} ages, {} observed cells",
        panel.n_players(),
        panel.n_ages(),
        panel.total_observed()
    );

    let fractions = observed_fraction_by_age(&panel);
    println!("\nage  observed_fraction");
    for (idx, age) in grid.ages().enumerate() {
        if fractions[idx] > 0.0 {
            println!("{age:>3} {:>8.2}", fractions[idx]);
        }
    }

    let spec = EstimatorSpec::preset("spline:obs:fixed")?;
    let mut rng = rng_from_seed(0);
    let fit = estimate(&panel, &spec, None, &mut rng)?;
    println!("\nestimated curve (standardized points per game):");
    for (idx, age) in grid.ages().enumerate() {
        if fit.curve.support_counts().unwrap()[idx] > 0 {
            println!("{age:>3} {:>8.3}", fit.curve.values()[idx]);
        }
    }
    Ok(())
}
