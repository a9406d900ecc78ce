//! File formats: panel/curve CSV schemas, sweep reports, and the TOML
//! configuration file.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! write-read cycles are lossless and repeated runs with the same seed
//! produce byte-identical files.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::SimpleDate;
use crate::error::{Error, Result};
use crate::evaluation::{BootstrapBundle, EvaluationReport};
use crate::imputation::ImputationTrace;
use crate::numerics::AgeGrid;
use crate::panel::{observed_fraction_by_age, AgeCurve, PerformancePanel};
use crate::simulation::{SimulationConfig, SweepSpec, TruthBundle};
use crate::spec::EstimatorSpec;

fn fmt(v: f64) -> String {
    format!("{v}")
}

// --- Panel CSV --------------------------------------------------------------
// Long format: player_id,age,value,observed. One row per cell; the value
// field is empty for unobserved cells.

pub fn write_panel_csv(path: &Path, panel: &PerformancePanel) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["player_id", "age", "value", "observed"])?;
    for (i, id) in panel.player_ids().iter().enumerate() {
        for (idx, age) in panel.grid().ages().enumerate() {
            match panel.observed(i, idx) {
                Some(v) => w.write_record([id.as_str(), &age.to_string(), &fmt(v), "1"])?,
                None => w.write_record([id.as_str(), &age.to_string(), "", "0"])?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_panel_csv(path: &Path) -> Result<PerformancePanel> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let idx_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::ParseError { line: 1, message: format!("missing column '{name}'") })
    };
    let (ci, ca, cv, co) = (idx_of("player_id")?, idx_of("age")?, idx_of("value")?, idx_of("observed")?);

    struct Row {
        player: String,
        age: i32,
        value: Option<f64>,
    }
    let mut rows = Vec::new();
    let mut t_min = i32::MAX;
    let mut t_max = i32::MIN;
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let get = |c: usize| rec.get(c).unwrap_or("");
        let age: i32 = get(ca).parse().map_err(|_| Error::ParseError {
            line,
            message: format!("invalid age '{}'", get(ca)),
        })?;
        let observed = matches!(get(co), "1" | "true" | "TRUE");
        let value = if observed {
            let v: f64 = get(cv).parse().map_err(|_| Error::ParseError {
                line,
                message: format!("invalid value '{}'", get(cv)),
            })?;
            Some(v)
        } else {
            None
        };
        t_min = t_min.min(age);
        t_max = t_max.max(age);
        rows.push(Row { player: get(ci).to_string(), age, value });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("panel csv"));
    }
    let grid = AgeGrid::new(t_min, t_max)?;
    let mut order: Vec<String> = Vec::new();
    let mut player_index: HashMap<String, usize> = HashMap::new();
    for row in &rows {
        if !player_index.contains_key(&row.player) {
            player_index.insert(row.player.clone(), order.len());
            order.push(row.player.clone());
        }
    }
    let k = grid.len();
    let mut values = vec![f64::NAN; order.len() * k];
    let mut mask = vec![false; order.len() * k];
    for row in &rows {
        let cell = player_index[&row.player] * k + grid.index_of(row.age).unwrap();
        if let Some(v) = row.value {
            values[cell] = v;
            mask[cell] = true;
        }
    }
    PerformancePanel::new(grid, order, values, mask)
}

// --- Curve CSVs -------------------------------------------------------------

/// Long-format estimated curves: spec,age,g_hat,support_count.
pub fn write_curves_csv(path: &Path, curves: &[(String, AgeCurve)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["spec", "age", "g_hat", "support_count"])?;
    for (name, curve) in curves {
        for (idx, age) in curve.grid().ages().enumerate() {
            let support = curve
                .support_counts()
                .map(|c| c[idx].to_string())
                .unwrap_or_default();
            w.write_record([name.as_str(), &age.to_string(), &fmt(curve.values()[idx]), &support])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_curves_csv(path: &Path) -> Result<Vec<(String, AgeCurve)>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let idx_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::ParseError { line: 1, message: format!("missing column '{name}'") })
    };
    let (cs, ca, cg) = (idx_of("spec")?, idx_of("age")?, idx_of("g_hat")?);
    let mut by_spec: Vec<(String, Vec<(i32, f64)>)> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let get = |c: usize| rec.get(c).unwrap_or("");
        let age: i32 = get(ca).parse().map_err(|_| Error::ParseError {
            line,
            message: format!("invalid age '{}'", get(ca)),
        })?;
        let g: f64 = get(cg).parse().map_err(|_| Error::ParseError {
            line,
            message: format!("invalid g_hat '{}'", get(cg)),
        })?;
        let name = get(cs).to_string();
        match by_spec.iter_mut().find(|(n, _)| *n == name) {
            Some((_, points)) => points.push((age, g)),
            None => by_spec.push((name, vec![(age, g)])),
        }
    }
    let mut out = Vec::new();
    for (name, mut points) in by_spec {
        points.sort_by_key(|p| p.0);
        let t_min = points.first().map(|p| p.0).ok_or(Error::EmptyInput("curve csv"))?;
        let t_max = points.last().unwrap().0;
        let grid = AgeGrid::new(t_min, t_max)?;
        if points.len() != grid.len() {
            return Err(Error::ParseError {
                line: 0,
                message: format!("curve '{name}' does not cover every age in [{t_min}, {t_max}]"),
            });
        }
        let values = points.into_iter().map(|p| p.1).collect();
        out.push((name, AgeCurve::new(grid, values)?));
    }
    Ok(out)
}

/// A single curve as age,g (used for simulation truth).
pub fn write_curve_csv(path: &Path, curve: &AgeCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["age", "g"])?;
    for (idx, age) in curve.grid().ages().enumerate() {
        w.write_record([&age.to_string(), &fmt(curve.values()[idx])])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv(path: &Path) -> Result<AgeCurve> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let idx_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::ParseError { line: 1, message: format!("missing column '{name}'") })
    };
    let (ca, cg) = (idx_of("age")?, idx_of("g")?);
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let get = |c: usize| rec.get(c).unwrap_or("");
        let age: i32 = get(ca).parse().map_err(|_| Error::ParseError {
            line,
            message: format!("invalid age '{}'", get(ca)),
        })?;
        let g: f64 = get(cg).parse().map_err(|_| Error::ParseError {
            line,
            message: format!("invalid g '{}'", get(cg)),
        })?;
        points.push((age, g));
    }
    points.sort_by_key(|p| p.0);
    let t_min = points.first().map(|p| p.0).ok_or(Error::EmptyInput("curve csv"))?;
    let t_max = points.last().unwrap().0;
    let grid = AgeGrid::new(t_min, t_max)?;
    if points.len() != grid.len() {
        return Err(Error::ParseError {
            line: 0,
            message: format!("curve does not cover every age in [{t_min}, {t_max}]"),
        });
    }
    AgeCurve::new(grid, points.into_iter().map(|p| p.1).collect())
}

/// Per-player simulation truth: player_id,intercept,quad.
pub fn write_truth_players_csv(
    path: &Path,
    panel: &PerformancePanel,
    truth: &TruthBundle,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["player_id", "intercept", "quad"])?;
    for (i, id) in panel.player_ids().iter().enumerate() {
        w.write_record([
            id.as_str(),
            &fmt(truth.player_intercepts[i]),
            &fmt(truth.player_quads[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Observed-fraction summary: age,observed,fraction.
pub fn write_observed_fraction_csv(path: &Path, panel: &PerformancePanel) -> Result<()> {
    let fractions = observed_fraction_by_age(panel);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["age", "observed", "fraction"])?;
    for (idx, age) in panel.grid().ages().enumerate() {
        w.write_record([
            &age.to_string(),
            &panel.observed_count(idx).to_string(),
            &fmt(fractions[idx]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Bootstrap bundle: spec,draw,age,g_hat.
pub fn write_bootstrap_csv(path: &Path, spec: &str, bundle: &BootstrapBundle) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["spec", "draw", "age", "g_hat"])?;
    for (draw, curve) in bundle.curves.iter().enumerate() {
        for (idx, age) in curve.grid().ages().enumerate() {
            w.write_record([
                spec,
                &draw.to_string(),
                &age.to_string(),
                &fmt(curve.values()[idx]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Imputation outputs: boundary.csv (age,boundary) and
/// imputation_trace.csv (player_id,age,first_pass_mean,second_pass_mean,imputed).
pub fn write_imputation_csvs(
    dir: &Path,
    panel: &PerformancePanel,
    trace: &ImputationTrace,
) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("boundary.csv"))?;
    w.write_record(["age", "boundary"])?;
    for (idx, age) in panel.grid().ages().enumerate() {
        if let Some(b) = trace.boundary.get(idx) {
            let text = if b.is_finite() { fmt(*b) } else { "inf".to_string() };
            w.write_record([&age.to_string(), &text])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("imputation_trace.csv"))?;
    w.write_record(["player_id", "age", "first_pass_mean", "second_pass_mean", "imputed"])?;
    for cell in &trace.cells {
        w.write_record([
            panel.player_ids()[cell.player].as_str(),
            &cell.age.to_string(),
            &fmt(cell.first_pass_mean),
            &fmt(cell.second_pass_mean),
            &fmt(cell.imputed),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// --- Sweep report -----------------------------------------------------------

#[derive(Serialize)]
struct SpecSummary {
    spec: String,
    mean_rmse: Option<f64>,
    median_sbd: Option<f64>,
    failures: usize,
}

#[derive(Serialize)]
struct SweepSummary {
    replications: usize,
    cells: usize,
    methods: Vec<SpecSummary>,
}

/// Write the full sweep report: long-format RMSE, per-replication SBD, the
/// RMSE-by-age-and-player-count table, and a JSON summary.
pub fn write_report_files(dir: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("rmse_by_age.csv"))?;
    w.write_record(["n_players", "omega", "sigma_gamma", "spec", "age", "rmse"])?;
    for (cell_idx, cell) in report.cells.iter().enumerate() {
        for (s, spec) in report.specs.iter().enumerate() {
            let scores = &report.per_cell[cell_idx][s];
            for (idx, age) in report.grid.ages().enumerate() {
                let r = scores.rmse_by_age[idx];
                let text = if r.is_finite() { fmt(r) } else { String::new() };
                w.write_record([
                    &cell.n_players.to_string(),
                    &fmt(cell.omega),
                    &fmt(cell.sigma_gamma),
                    &spec.to_string(),
                    &age.to_string(),
                    &text,
                ])?;
            }
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("sbd.csv"))?;
    w.write_record(["n_players", "omega", "sigma_gamma", "spec", "replication", "sbd"])?;
    for (cell_idx, cell) in report.cells.iter().enumerate() {
        for (s, spec) in report.specs.iter().enumerate() {
            for (rep, sbd) in report.per_cell[cell_idx][s].sbd_values.iter().enumerate() {
                w.write_record([
                    &cell.n_players.to_string(),
                    &fmt(cell.omega),
                    &fmt(cell.sigma_gamma),
                    &spec.to_string(),
                    &rep.to_string(),
                    &fmt(*sbd),
                ])?;
            }
        }
    }
    w.flush()?;

    // Appendix-style table: average RMSE by age (columns), method (rows),
    // player count (sets of rows).
    let mut w = csv::Writer::from_path(dir.join("rmse_by_players.csv"))?;
    let mut header = vec!["n_players".to_string(), "spec".to_string()];
    header.extend(report.grid.ages().map(|t| format!("age_{t}")));
    w.write_record(&header)?;
    for (n, spec, by_age) in report.rmse_by_age_and_players() {
        let mut row = vec![n.to_string(), spec];
        row.extend(by_age.iter().map(|r| if r.is_finite() { fmt(*r) } else { String::new() }));
        w.write_record(&row)?;
    }
    w.flush()?;

    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    let summary = SweepSummary {
        replications: report.replications,
        cells: report.cells.len(),
        methods: report
            .specs
            .iter()
            .enumerate()
            .map(|(s, spec)| SpecSummary {
                spec: spec.to_string(),
                mean_rmse: finite(report.mean_rmse(s)),
                median_sbd: finite(report.median_sbd(s)),
                failures: report.total_failures(s),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("summary serialization: {e}")))?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(())
}

/// Evaluation of stored curves against a stored truth: per-age RMSE and one
/// SBD per spec.
pub fn write_evaluation_files(
    dir: &Path,
    results: &[(String, Vec<f64>, f64)],
    grid: &AgeGrid,
) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("rmse.csv"))?;
    w.write_record(["spec", "age", "rmse"])?;
    for (name, by_age, _) in results {
        for (idx, age) in grid.ages().enumerate() {
            w.write_record([name.as_str(), &age.to_string(), &fmt(by_age[idx])])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("sbd.csv"))?;
    w.write_record(["spec", "sbd"])?;
    for (name, _, sbd) in results {
        w.write_record([name.as_str(), &fmt(*sbd)])?;
    }
    w.flush()?;
    Ok(())
}

// --- Config file ------------------------------------------------------------

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    grid: Option<GridSection>,
    simulation: Option<SimulationSection>,
    missingness: Option<MissingnessSection>,
    estimators: Option<EstimatorSection>,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    t_min: Option<i32>,
    t_max: Option<i32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    n_players: Option<usize>,
    omega: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    t_peak: Option<i32>,
    sigma_gamma: Option<f64>,
    sigma_b: Option<f64>,
    sigma_eps: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MissingnessSection {
    pi: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorSection {
    spline_df: Option<usize>,
    boundary_quantile: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    n_players: Option<Vec<usize>>,
    omega: Option<Vec<f64>>,
    sigma_gamma: Option<Vec<f64>>,
    replications: Option<usize>,
    specs: Option<Vec<String>>,
    seed: Option<u64>,
}

/// Resolved configuration: simulation defaults plus sweep settings.
#[derive(Debug, Clone)]
pub struct AppConfig {
    pub simulation: SimulationConfig,
    pub sweep: SweepSpec,
    pub replications: usize,
    pub specs: Vec<EstimatorSpec>,
    pub spline_df: usize,
    pub boundary_quantile: f64,
    /// Seed from the config file, used when the CLI flag is absent.
    pub seed: Option<u64>,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            simulation: SimulationConfig::default(),
            sweep: SweepSpec {
                n_players: vec![300],
                omega: vec![0.0],
                sigma_gamma: vec![0.8],
            },
            replications: 50,
            specs: EstimatorSpec::all_presets(),
            spline_df: crate::spec::DEFAULT_SPLINE_DF,
            boundary_quantile: crate::spec::DEFAULT_BOUNDARY_QUANTILE,
            seed: None,
        }
    }
}

impl AppConfig {
    /// Apply the configured spline df and boundary quantile to a parsed spec.
    pub fn specialized(&self, spec: &EstimatorSpec) -> EstimatorSpec {
        spec.clone()
            .with_spline_df(self.spline_df)
            .with_boundary_quantile(self.boundary_quantile)
    }
}

/// Load a TOML config file, or the built-in defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<AppConfig> {
    let mut config = AppConfig::default();
    let Some(path) = path else {
        return Ok(config);
    };
    let text = fs::read_to_string(path)?;
    let file: FileConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;

    if let Some(grid) = file.grid {
        let t_min = grid.t_min.unwrap_or(config.simulation.grid.t_min());
        let t_max = grid.t_max.unwrap_or(config.simulation.grid.t_max());
        config.simulation.grid = AgeGrid::new(t_min, t_max)?;
    }
    if let Some(sim) = file.simulation {
        let s = &mut config.simulation;
        if let Some(v) = sim.n_players {
            s.n_players = v;
        }
        if let Some(v) = sim.omega {
            s.omega = v;
        }
        if let Some(v) = sim.a {
            s.a = v;
        }
        if let Some(v) = sim.b {
            s.b = v;
        }
        if let Some(v) = sim.c {
            s.c = v;
        }
        if let Some(v) = sim.t_peak {
            s.t_peak = v;
        }
        if let Some(v) = sim.sigma_gamma {
            s.sigma_gamma = v;
        }
        if let Some(v) = sim.sigma_b {
            s.sigma_b = v;
        }
        if let Some(v) = sim.sigma_eps {
            s.sigma_eps = v;
        }
    }
    if let Some(missing) = file.missingness {
        if let Some(pi) = missing.pi {
            if !pi.is_empty() {
                config.simulation.pi_schedule = Some(pi);
            }
        }
    }
    if let Some(est) = file.estimators {
        if let Some(df) = est.spline_df {
            if df < 2 {
                return Err(Error::InvalidDegreesOfFreedom(df));
            }
            config.spline_df = df;
        }
        if let Some(q) = est.boundary_quantile {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::ProbabilityOutOfDomain(q));
            }
            config.boundary_quantile = q;
        }
    }
    if let Some(sweep) = file.sweep {
        if let Some(v) = sweep.n_players {
            config.sweep.n_players = v;
        }
        if let Some(v) = sweep.omega {
            config.sweep.omega = v;
        }
        if let Some(v) = sweep.sigma_gamma {
            config.sweep.sigma_gamma = v;
        }
        if let Some(v) = sweep.replications {
            config.replications = v;
        }
        if let Some(names) = sweep.specs {
            let mut specs = Vec::new();
            for name in names {
                specs.push(name.parse::<EstimatorSpec>()?);
            }
            config.specs = specs;
        }
        if let Some(seed) = sweep.seed {
            config.seed = Some(seed);
            config.simulation.seed = seed;
        }
    }
    config.specs = config
        .specs
        .iter()
        .map(|s| config.specialized(s))
        .collect();
    config.simulation.validate()?;
    Ok(config)
}

/// The documented default-config file contents, for `--emit-config`.
pub fn default_config_toml() -> String {
    let c = SimulationConfig::default();
    format!(
        "[grid]\nt_min = {}\nt_max = {}\n\n[simulation]\nn_players = {}\nomega = {}\na = {}\nb = {}\nc = {}\nt_peak = {}\nsigma_gamma = {}\nsigma_b = {}\nsigma_eps = {}\n\n[estimators]\nspline_df = 6\nboundary_quantile = 0.75\n\n[sweep]\nn_players = [300]\nomega = [0.0]\nsigma_gamma = [0.8]\nreplications = 50\nspecs = [\n{}]\n",
        c.grid.t_min(),
        c.grid.t_max(),
        c.n_players,
        c.omega,
        c.a,
        c.b,
        c.c,
        c.t_peak,
        c.sigma_gamma,
        c.sigma_b,
        c.sigma_eps,
        EstimatorSpec::all_presets()
            .iter()
            .map(|s| format!("    \"{s}\",\n"))
            .collect::<String>()
    )
}

/// Parse `MM-DD` for the age cutoff flag.
pub fn parse_age_cutoff(s: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = s.split('-').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidParameter(format!("age cutoff '{s}' is not MM-DD")));
    }
    let month: u32 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("age cutoff '{s}' is not MM-DD")))?;
    let day: u32 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("age cutoff '{s}' is not MM-DD")))?;
    SimpleDate::new(2000, month, day)?;
    Ok((month, day))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::simulation::{mask_panel, simulate_panel};

    #[test]
    fn panel_round_trip_is_lossless() {
        let config = SimulationConfig { n_players: 25, ..SimulationConfig::default() };
        let mut rng = rng_from_seed(3);
        let (full, _) = simulate_panel(&config, &mut rng).unwrap();
        let pi = config.resolved_pi().unwrap();
        let (panel, _) = mask_panel(&full, &pi, &mut rng).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.csv");
        write_panel_csv(&path, &panel).unwrap();
        let back = read_panel_csv(&path).unwrap();
        assert_eq!(back.grid(), panel.grid());
        assert_eq!(back.player_ids(), panel.player_ids());
        assert_eq!(back.mask(), panel.mask());
        assert_eq!(back.observed_cells(), panel.observed_cells());
    }

    #[test]
    fn curve_round_trip() {
        let grid = AgeGrid::new(18, 40).unwrap();
        let curve = AgeCurve::new(
            grid,
            grid.ages().map(|t| (t as f64 / 7.0).sin() * 1.234567890123).collect(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        write_curve_csv(&path, &curve).unwrap();
        let back = read_curve_csv(&path).unwrap();
        assert_eq!(back.values(), curve.values());
    }

    #[test]
    fn curves_csv_groups_by_spec() {
        let grid = AgeGrid::new(20, 24).unwrap();
        let c1 = AgeCurve::new(grid, vec![1.0, 2.0, 3.0, 2.0, 1.0]).unwrap();
        let c2 = AgeCurve::new(grid, vec![0.5, 0.25, 0.0, -0.25, -0.5]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.csv");
        write_curves_csv(
            &path,
            &[("delta-plus".into(), c1.clone()), ("spline:obs:none".into(), c2.clone())],
        )
        .unwrap();
        let back = read_curves_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].0, "delta-plus");
        assert_eq!(back[0].1.values(), c1.values());
        assert_eq!(back[1].1.values(), c2.values());
    }

    #[test]
    fn config_defaults_and_overrides() {
        let default = load_config(None).unwrap();
        assert_eq!(default.simulation.n_players, 300);
        assert_eq!(default.specs.len(), 10);
        assert_eq!(default.replications, 50);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        fs::write(
            &path,
            "[simulation]\nn_players = 40\nsigma_gamma = 1.5\n\n[sweep]\nreplications = 3\nspecs = [\"delta-plus\", \"spline:obs:fixed\"]\n",
        )
        .unwrap();
        let config = load_config(Some(&path)).unwrap();
        assert_eq!(config.simulation.n_players, 40);
        assert_eq!(config.simulation.sigma_gamma, 1.5);
        assert_eq!(config.replications, 3);
        assert_eq!(config.specs.len(), 2);

        fs::write(&path, "[simulation]\nbogus_field = 1\n").unwrap();
        assert!(load_config(Some(&path)).is_err());
    }

    #[test]
    fn default_config_toml_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        fs::write(&path, default_config_toml()).unwrap();
        let config = load_config(Some(&path)).unwrap();
        assert_eq!(config.specs.len(), 10);
    }

    #[test]
    fn age_cutoff_parsing() {
        assert_eq!(parse_age_cutoff("01-31").unwrap(), (1, 31));
        assert_eq!(parse_age_cutoff("10-01").unwrap(), (10, 1));
        assert!(parse_age_cutoff("13-01").is_err());
        assert!(parse_age_cutoff("0131").is_err());
    }
}
