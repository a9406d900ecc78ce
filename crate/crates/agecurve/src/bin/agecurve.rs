//! Batch CLI over the agecurve library. Every subcommand is a pure function
//! of its inputs and the --seed flag, so outputs are byte-reproducible.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use agecurve::data::{build_panel, load_records, PanelFilters, SimpleDate};
use agecurve::error::Error;
use agecurve::evaluation::{bootstrap_curves, rmse_by_age, shape_based_distance};
use agecurve::io;
use agecurve::prelude::*;

#[derive(Parser)]
#[command(
    name = "agecurve",
    about = "Aging-curve estimation from incomplete performance panels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a fully observed panel and its generating truth
    Simulate(SimulateArgs),
    /// Apply performance-driven missingness to a fully observed panel
    Mask(MaskArgs),
    /// Fit one or more estimator specs and emit the curves
    Estimate(EstimateArgs),
    /// Complete a panel by two-pass (truncated) imputation
    Impute(ImputeArgs),
    /// Score stored curves against a stored truth curve
    Evaluate(EvaluateArgs),
    /// Run a factorial simulation sweep and emit the evaluation report
    Sweep(SweepArgs),
    /// Bootstrap curve bundles by resampling players
    Bootstrap(BootstrapArgs),
    /// Observed-fraction-by-age summary of a panel
    Summary(SummaryArgs),
}

/// Panel input: either a panel CSV or a player-season records CSV plus
/// ingestion filters.
#[derive(Args)]
struct PanelInput {
    /// Panel CSV (player_id,age,value,observed)
    #[arg(long)]
    panel: Option<PathBuf>,
    /// Player-season records CSV (player_id,birth_date,season_start_year,
    /// position,games_played,goals,assists)
    #[arg(long)]
    records: Option<PathBuf>,
    /// Age grid for records ingestion, as MIN:MAX
    #[arg(long, default_value = "18:40")]
    grid: String,
    /// Comma-separated positions to keep (records input only)
    #[arg(long)]
    positions: Option<String>,
    /// Keep players born on or after this date (records input only)
    #[arg(long)]
    min_birth_date: Option<String>,
    /// Season start-year range to keep, as FIRST:LAST (records input only)
    #[arg(long)]
    seasons: Option<String>,
    /// Reference date (MM-DD) for integer ages (records input only)
    #[arg(long, default_value = "01-31")]
    age_cutoff: String,
}

impl PanelInput {
    fn load(&self) -> Result<PerformancePanel> {
        match (&self.panel, &self.records) {
            (Some(path), None) => io::read_panel_csv(path),
            (None, Some(path)) => {
                let set = load_records(path)?;
                if set.skipped_zero_games > 0 {
                    eprintln!(
                        "warning: skipped {} records with games_played = 0",
                        set.skipped_zero_games
                    );
                }
                let grid = parse_grid(&self.grid)?;
                let filters = PanelFilters {
                    positions: self
                        .positions
                        .as_ref()
                        .map(|s| s.split(',').map(|p| p.trim().to_string()).collect()),
                    min_birth_date: self
                        .min_birth_date
                        .as_ref()
                        .map(|s| SimpleDate::parse(s))
                        .transpose()?,
                    season_range: self.seasons.as_ref().map(|s| parse_range(s)).transpose()?,
                    age_cutoff: io::parse_age_cutoff(&self.age_cutoff)?,
                };
                build_panel(&set.records, grid, &filters)
            }
            _ => Err(Error::InvalidParameter(
                "provide exactly one of --panel or --records".into(),
            )),
        }
    }
}

fn parse_grid(s: &str) -> Result<AgeGrid> {
    let (lo, hi) = parse_range(s)?;
    AgeGrid::new(lo, hi)
}

fn parse_range(s: &str) -> Result<(i32, i32)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidParameter(format!("range '{s}' is not MIN:MAX")));
    }
    let lo: i32 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("range '{s}' is not MIN:MAX")))?;
    let hi: i32 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("range '{s}' is not MIN:MAX")))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct SimulateArgs {
    /// Falls back to the config file's sweep seed when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct MaskArgs {
    #[command(flatten)]
    input: PanelInput,
    /// Falls back to the config file's sweep seed when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: PanelInput,
    /// Comma-separated estimator specs (method:data:effects), or 'all'
    #[arg(long)]
    spec: String,
    /// Required when any requested spec uses imputation
    #[arg(long)]
    seed: Option<u64>,
    /// Quantile-method pool size N_t (defaults to the panel's player count)
    #[arg(long)]
    pool_size: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ImputeArgs {
    #[command(flatten)]
    input: PanelInput,
    /// Estimator spec whose imputation settings to use (trunc/notrunc data)
    #[arg(long)]
    spec: String,
    /// Falls back to the config file's sweep seed when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Estimated curves CSV (spec,age,g_hat,support_count)
    #[arg(long)]
    curves: PathBuf,
    /// Truth curve CSV (age,g)
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Falls back to the config file's sweep seed when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    input: PanelInput,
    #[arg(long)]
    spec: String,
    /// Number of bootstrap draws
    #[arg(long, default_value_t = 100)]
    draws: usize,
    /// Falls back to the config file's sweep seed when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SummaryArgs {
    #[command(flatten)]
    input: PanelInput,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, anything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        // Usage problems.
        Error::SpecError(_) | Error::InvalidDegreesOfFreedom(_) | Error::ProbabilityOutOfDomain(_) => 1,
        // Numerical/estimation failures.
        Error::SingularDesign
        | Error::UnderdeterminedDesign { .. }
        | Error::DegenerateKnots { .. }
        | Error::DegenerateCurve
        | Error::InsufficientPairs { .. }
        | Error::InsufficientObservations { .. }
        | Error::InsufficientData(_) => 3,
        // Everything else is a data/input problem.
        _ => 2,
    }
}

fn require_seed(flag: Option<u64>, config: &io::AppConfig) -> Result<u64> {
    flag.or(config.seed).ok_or_else(|| {
        Error::SpecError("--seed is required (or set seed in the config's [sweep] section)".into())
    })
}

fn ensure_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn parse_specs(arg: &str, config: &io::AppConfig) -> Result<Vec<EstimatorSpec>> {
    if arg.trim() == "all" {
        return Ok(EstimatorSpec::all_presets()
            .iter()
            .map(|s| config.specialized(s))
            .collect());
    }
    arg.split(',')
        .map(|name| name.parse::<EstimatorSpec>().map(|s| config.specialized(&s)))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let config = io::load_config(args.config.as_deref())?;
            ensure_out(&args.out)?;
            let seed = require_seed(args.seed, &config)?;
            let mut rng = rng_from_seed(seed);
            let (panel, truth) = simulate_panel(&config.simulation, &mut rng)?;
            io::write_panel_csv(&args.out.join("panel.csv"), &panel)?;
            io::write_curve_csv(&args.out.join("truth_curve.csv"), &truth.true_curve)?;
            io::write_truth_players_csv(&args.out.join("truth_players.csv"), &panel, &truth)?;
            println!(
                "simulated {} players on ages {}..{} -> {}",
                panel.n_players(),
                panel.grid().t_min(),
                panel.grid().t_max(),
                args.out.display()
            );
            Ok(())
        }
        Command::Mask(args) => {
            let config = io::load_config(args.config.as_deref())?;
            ensure_out(&args.out)?;
            let panel = args.input.load()?;
            let pi = match &config.simulation.pi_schedule {
                Some(pi) => pi.clone(),
                None => default_pi_schedule(&panel.grid())?,
            };
            let mut rng = rng_from_seed(require_seed(args.seed, &config)?);
            let (masked, _) = mask_panel(&panel, &pi, &mut rng)?;
            io::write_panel_csv(&args.out.join("masked_panel.csv"), &masked)?;
            println!(
                "masked panel: {} of {} cells observed -> {}",
                masked.total_observed(),
                masked.total_observed() + masked.total_missing(),
                args.out.display()
            );
            Ok(())
        }
        Command::Estimate(args) => {
            let config = io::load_config(args.config.as_deref())?;
            ensure_out(&args.out)?;
            let panel = args.input.load()?;
            let specs = parse_specs(&args.spec, &config)?;
            let needs_seed = specs.iter().any(|s| s.is_stochastic());
            let seed = match (args.seed, needs_seed) {
                (Some(seed), _) => seed,
                (None, false) => 0,
                (None, true) => {
                    return Err(Error::SpecError(
                        "--seed is required when a spec uses imputation".into(),
                    ))
                }
            };
            let mut curves = Vec::new();
            for (idx, spec) in specs.iter().enumerate() {
                let mut rng = rng_from_seed(derive_seed(seed, idx as u64, 0));
                let fit = estimate(&panel, spec, args.pool_size, &mut rng)?;
                curves.push((spec.to_string(), fit.curve));
            }
            io::write_curves_csv(&args.out.join("curves.csv"), &curves)?;
            println!("estimated {} spec(s) -> {}", curves.len(), args.out.display());
            Ok(())
        }
        Command::Impute(args) => {
            let config = io::load_config(args.config.as_deref())?;
            ensure_out(&args.out)?;
            let panel = args.input.load()?;
            let spec = config.specialized(&args.spec.parse::<EstimatorSpec>()?);
            let imputation = ImputationConfig::for_spec(&spec)?;
            let mut rng = rng_from_seed(require_seed(args.seed, &config)?);
            let (completed, trace) = impute_panel(&panel, &spec, &imputation, &mut rng)?;
            io::write_panel_csv(&args.out.join("completed_panel.csv"), &completed)?;
            io::write_imputation_csvs(&args.out, &panel, &trace)?;
            println!(
                "imputed {} cells with {} -> {}",
                trace.cells.len(),
                spec,
                args.out.display()
            );
            Ok(())
        }
        Command::Evaluate(args) => {
            ensure_out(&args.out)?;
            let curves = io::read_curves_csv(&args.curves)?;
            let truth = io::read_curve_csv(&args.truth)?;
            let mut results = Vec::new();
            for (name, curve) in &curves {
                let by_age = rmse_by_age(std::slice::from_ref(curve), &truth)?;
                let sbd = shape_based_distance(curve, &truth)?;
                results.push((name.clone(), by_age, sbd));
            }
            let grid = truth.grid();
            io::write_evaluation_files(&args.out, &results, &grid)?;
            println!("evaluated {} curve(s) -> {}", results.len(), args.out.display());
            Ok(())
        }
        Command::Sweep(args) => {
            let config = io::load_config(args.config.as_deref())?;
            ensure_out(&args.out)?;
            let seed = require_seed(args.seed, &config)?;
            let report = run_factorial(
                &config.simulation,
                &config.sweep,
                &config.specs,
                config.replications,
                seed,
            )?;
            io::write_report_files(&args.out, &report)?;
            println!(
                "swept {} cells x {} replications x {} specs -> {}",
                report.cells.len(),
                report.replications,
                report.specs.len(),
                args.out.display()
            );
            Ok(())
        }
        Command::Bootstrap(args) => {
            let config = io::load_config(args.config.as_deref())?;
            ensure_out(&args.out)?;
            let panel = args.input.load()?;
            let spec = config.specialized(&args.spec.parse::<EstimatorSpec>()?);
            let bundle = bootstrap_curves(&panel, &spec, args.draws, require_seed(args.seed, &config)?)?;
            if !bundle.failed_draws.is_empty() {
                eprintln!(
                    "warning: {} of {} draws failed after retries",
                    bundle.failed_draws.len(),
                    args.draws
                );
            }
            io::write_bootstrap_csv(&args.out.join("bootstrap_curves.csv"), &spec.to_string(), &bundle)?;
            println!(
                "bootstrapped {} curve(s) with {} -> {}",
                bundle.curves.len(),
                spec,
                args.out.display()
            );
            Ok(())
        }
        Command::Summary(args) => {
            ensure_out(&args.out)?;
            let panel = args.input.load()?;
            io::write_observed_fraction_csv(&args.out.join("observed_fraction.csv"), &panel)?;
            println!(
                "summarized {} players x {} ages -> {}",
                panel.n_players(),
                panel.n_ages(),
                args.out.display()
            );
            Ok(())
        }
    }
}
