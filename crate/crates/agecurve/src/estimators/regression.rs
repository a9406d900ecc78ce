//! Spline and quadratic mean-curve regressions with none/fixed/random
//! player effects.
//!
//! Fixed effects are absorbed by within-player demeaning (algebraically the
//! sum-to-zero dummy fit) and recovered from the per-player residual means.
//! Random effects are ridge-penalized per-player blocks solved by absorbing
//! each block through its Schur complement; penalties come from one
//! moment-matching pass (unpenalized per-player fits on population-fit
//! residuals, spread minus sampling noise, floored).

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fit::{FitResult, PlayerEffects};
use crate::numerics::{least_squares_fit, AgeGrid, NaturalSplineBasis};
use crate::panel::{AgeCurve, PerformancePanel};
use crate::spec::{EffectKind, EstimatorSpec, Method};

/// Affine rescaling of ages to roughly [-1, 1] for conditioning.
#[derive(Debug, Clone, Copy)]
struct AgeScale {
    mid: f64,
    half: f64,
}

impl AgeScale {
    fn from_grid(grid: &AgeGrid) -> Self {
        let mid = (grid.t_min() as f64 + grid.t_max() as f64) / 2.0;
        let half = (grid.t_max() as f64 - grid.t_min() as f64) / 2.0;
        AgeScale { mid, half }
    }

    fn scale(&self, age: f64) -> f64 {
        (age - self.mid) / self.half
    }
}

/// Population mean-curve basis: natural spline or quadratic polynomial.
enum PopulationBasis {
    Spline(NaturalSplineBasis),
    Quad(AgeScale),
}

impl PopulationBasis {
    fn ncols(&self) -> usize {
        match self {
            PopulationBasis::Spline(b) => b.df(),
            PopulationBasis::Quad(_) => 3,
        }
    }

    fn row(&self, age: f64) -> Vec<f64> {
        match self {
            PopulationBasis::Spline(b) => b.row(age),
            PopulationBasis::Quad(s) => {
                let u = s.scale(age);
                vec![1.0, u, u * u]
            }
        }
    }
}

struct ObsData {
    // (player, age index, value) for every observed cell.
    cells: Vec<(usize, usize, f64)>,
    // Observed cell indices grouped per player.
    by_player: Vec<Vec<usize>>,
    ages: Vec<f64>,
}

fn gather(panel: &PerformancePanel) -> ObsData {
    let cells = panel.observed_cells();
    let mut by_player = vec![Vec::new(); panel.n_players()];
    let mut ages = Vec::with_capacity(cells.len());
    for (row, &(player, age_idx, _)) in cells.iter().enumerate() {
        by_player[player].push(row);
        ages.push(panel.grid().age_at(age_idx) as f64);
    }
    ObsData { cells, by_player, ages }
}

/// Fit the population curve g(t) with the player-effect structure of `spec`.
///
/// `spec.method` must be `Spline` or `Quad`; dispatching of delta/quantile
/// methods and of imputation lives in [`crate::estimators::estimate`].
pub fn fit_regression_curve(panel: &PerformancePanel, spec: &EstimatorSpec) -> Result<FitResult> {
    if !matches!(spec.method, Method::Spline | Method::Quad) {
        return Err(Error::SpecError(format!(
            "fit_regression_curve handles spline/quad methods, got {spec}"
        )));
    }
    let obs = gather(panel);
    let n = obs.cells.len();
    if n < spec.spline_df + 2 {
        return Err(Error::InsufficientData(format!(
            "{n} observed cells; need at least {}",
            spec.spline_df + 2
        )));
    }
    let grid = panel.grid();
    // Knots come from the grid ages (the curve's domain), so the basis is
    // identical across replications and resamples of the same grid and the
    // boundary segments keep enough freedom to follow sparse old-age data.
    let grid_ages: Vec<f64> = grid.ages().map(|t| t as f64).collect();
    let pop = match spec.method {
        Method::Spline => PopulationBasis::Spline(NaturalSplineBasis::from_ages(
            &grid_ages,
            spec.spline_df,
            &grid,
        )?),
        Method::Quad => PopulationBasis::Quad(AgeScale::from_grid(&grid)),
        _ => unreachable!(),
    };

    match spec.effects {
        EffectKind::None => fit_no_effects(panel, spec, &obs, &pop),
        EffectKind::Fixed => fit_fixed_effects(panel, spec, &obs, &pop),
        EffectKind::RandomQuad | EffectKind::RandomSpline => {
            fit_random_effects(panel, spec, &obs, &pop)
        }
    }
}

fn curve_from(
    panel: &PerformancePanel,
    values: Vec<f64>,
) -> Result<AgeCurve> {
    let support = (0..panel.n_ages()).map(|k| panel.observed_count(k)).collect();
    AgeCurve::new(panel.grid(), values)?.with_support(support)
}

fn fit_no_effects(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    obs: &ObsData,
    pop: &PopulationBasis,
) -> Result<FitResult> {
    let n = obs.cells.len();
    let p = pop.ncols();
    let mut design = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for (row, &(_, _, v)) in obs.cells.iter().enumerate() {
        for (c, b) in pop.row(obs.ages[row]).into_iter().enumerate() {
            design[(row, c)] = b;
        }
        y[row] = v;
    }
    let fit = least_squares_fit(&design, &y, true)?;
    let values = panel
        .grid()
        .ages()
        .map(|t| {
            pop.row(t as f64)
                .iter()
                .zip(fit.coefficients.iter())
                .map(|(b, c)| b * c)
                .sum()
        })
        .collect();
    let curve = curve_from(panel, values)?;
    FitResult::new(curve, PlayerEffects::None, fit.residual_sd, spec.clone())
}

fn fit_fixed_effects(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    obs: &ObsData,
    pop: &PopulationBasis,
) -> Result<FitResult> {
    let n = obs.cells.len();
    let p = pop.ncols();
    let n_players = panel.n_players();

    // Per-player means of the response and of the nonconstant basis columns.
    let mut mean_y = vec![0.0; n_players];
    let mut mean_b = vec![vec![0.0; p - 1]; n_players];
    let rows_basis: Vec<Vec<f64>> = obs.ages.iter().map(|&a| pop.row(a)).collect();
    for (player, rows) in obs.by_player.iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        let ni = rows.len() as f64;
        for &r in rows {
            mean_y[player] += obs.cells[r].2 / ni;
            for j in 1..p {
                mean_b[player][j - 1] += rows_basis[r][j] / ni;
            }
        }
    }

    // Within-player demeaned regression on the nonconstant columns.
    let mut design = DMatrix::zeros(n, p - 1);
    let mut y = DVector::zeros(n);
    for (player, rows) in obs.by_player.iter().enumerate() {
        for &r in rows {
            for j in 1..p {
                design[(r, j - 1)] = rows_basis[r][j] - mean_b[player][j - 1];
            }
            y[r] = obs.cells[r].2 - mean_y[player];
        }
    }
    let fit = least_squares_fit(&design, &y, true)?;
    let slope = &fit.coefficients;

    // Per-player constants, then sum-to-zero centering across fitted players.
    let fitted_players: Vec<usize> = (0..n_players)
        .filter(|&i| !obs.by_player[i].is_empty())
        .collect();
    let mut constants = vec![0.0; n_players];
    for &i in &fitted_players {
        let mut c = mean_y[i];
        for j in 0..p - 1 {
            c -= mean_b[i][j] * slope[j];
        }
        constants[i] = c;
    }
    let alpha =
        fitted_players.iter().map(|&i| constants[i]).sum::<f64>() / fitted_players.len() as f64;
    let mut intercepts = vec![0.0; n_players];
    for &i in &fitted_players {
        intercepts[i] = constants[i] - alpha;
    }

    let values: Vec<f64> = panel
        .grid()
        .ages()
        .map(|t| {
            let row = pop.row(t as f64);
            alpha + row[1..].iter().zip(slope.iter()).map(|(b, c)| b * c).sum::<f64>()
        })
        .collect();

    // Residual sd over all observed cells with the full parameter count.
    let mut rss = 0.0;
    for &(player, age_idx, v) in &obs.cells {
        let t = panel.grid().age_at(age_idx) as f64;
        let brow = pop.row(t);
        let mean: f64 = alpha
            + brow[1..].iter().zip(slope.iter()).map(|(b, c)| b * c).sum::<f64>()
            + intercepts[player];
        rss += (v - mean).powi(2);
    }
    let params = (p - 1) + fitted_players.len();
    let residual_sd = if n > params {
        (rss / (n - params) as f64).sqrt()
    } else {
        0.0
    };

    let curve = curve_from(panel, values)?;
    FitResult::new(
        curve,
        PlayerEffects::Fixed { intercepts },
        residual_sd,
        spec.clone(),
    )
}

/// Per-player random-effect feature block.
enum BlockBasis {
    // [1, u, u^2] on the conditioning scale.
    Quad(AgeScale),
    // [1, nonconstant spline columns].
    Spline(NaturalSplineBasis),
}

impl BlockBasis {
    fn ncols(&self) -> usize {
        match self {
            BlockBasis::Quad(_) => 3,
            BlockBasis::Spline(b) => b.df(),
        }
    }

    fn row(&self, age: f64) -> Vec<f64> {
        match self {
            BlockBasis::Quad(s) => {
                let u = s.scale(age);
                vec![1.0, u, u * u]
            }
            BlockBasis::Spline(b) => {
                let mut row = b.row(age);
                row[0] = 1.0;
                row
            }
        }
    }
}

fn fit_random_effects(
    panel: &PerformancePanel,
    spec: &EstimatorSpec,
    obs: &ObsData,
    pop: &PopulationBasis,
) -> Result<FitResult> {
    let n = obs.cells.len();
    let p = pop.ncols();
    let n_players = panel.n_players();
    let grid = panel.grid();
    let scale = AgeScale::from_grid(&grid);

    let block = match spec.effects {
        EffectKind::RandomQuad => BlockBasis::Quad(scale),
        EffectKind::RandomSpline => match pop {
            PopulationBasis::Spline(b) => BlockBasis::Spline(b.clone()),
            PopulationBasis::Quad(_) => {
                let grid_ages: Vec<f64> = grid.ages().map(|t| t as f64).collect();
                BlockBasis::Spline(NaturalSplineBasis::from_ages(
                    &grid_ages,
                    spec.spline_df,
                    &grid,
                )?)
            }
        },
        _ => unreachable!(),
    };
    let q = block.ncols();

    let rows_pop: Vec<Vec<f64>> = obs.ages.iter().map(|&a| pop.row(a)).collect();
    let rows_block: Vec<Vec<f64>> = obs.ages.iter().map(|&a| block.row(a)).collect();

    // Population-only fit for residuals feeding the moment pass.
    let mut design = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for row in 0..n {
        for (c, b) in rows_pop[row].iter().enumerate() {
            design[(row, c)] = *b;
        }
        y[row] = obs.cells[row].2;
    }
    let pop_fit = least_squares_fit(&design, &y, true)?;
    let resid = &y - &design * &pop_fit.coefficients;

    let lambdas = moment_match_penalties(
        obs,
        &rows_block,
        &resid,
        q,
        pop_fit.residual_sd,
        matches!(spec.effects, EffectKind::RandomSpline),
    );

    // Penalized normal equations, absorbing each player block via its Schur
    // complement.
    type AbsorbedBlock = (Cholesky<f64, nalgebra::Dyn>, DMatrix<f64>, DVector<f64>);
    let mut s_mat = design.transpose() * &design;
    let mut rhs = design.transpose() * &y;
    let mut block_chols: Vec<Option<AbsorbedBlock>> = Vec::with_capacity(n_players);
    for rows in &obs.by_player {
        if rows.is_empty() {
            block_chols.push(None);
            continue;
        }
        let ni = rows.len();
        let mut z = DMatrix::zeros(ni, q);
        let mut b = DMatrix::zeros(ni, p);
        let mut yi = DVector::zeros(ni);
        for (local, &r) in rows.iter().enumerate() {
            for c in 0..q {
                z[(local, c)] = rows_block[r][c];
            }
            for c in 0..p {
                b[(local, c)] = rows_pop[r][c];
            }
            yi[local] = obs.cells[r].2;
        }
        let mut m = z.transpose() * &z;
        for j in 0..q {
            m[(j, j)] += lambdas[j];
        }
        let chol = Cholesky::new(m).ok_or(Error::SingularDesign)?;
        let c_i = b.transpose() * &z; // p x q
        let zty = z.transpose() * &yi; // q
        let g_ct = chol.solve(&c_i.transpose()); // q x p
        s_mat -= &c_i * &g_ct;
        rhs -= &c_i * chol.solve(&zty);
        block_chols.push(Some((chol, z, yi)));
    }
    let beta = match Cholesky::new(s_mat.clone()) {
        Some(c) => c.solve(&rhs),
        None => {
            let scale_d = s_mat.diagonal().amax().max(1.0);
            for j in 0..p {
                s_mat[(j, j)] += 1e-8 * scale_d;
            }
            Cholesky::new(s_mat)
                .ok_or(Error::SingularDesign)?
                .solve(&rhs)
        }
    };

    // Back-substitute the player deviations.
    let mut deviations = vec![vec![0.0; q]; n_players];
    let mut fitted_players = Vec::new();
    for (player, entry) in block_chols.iter().enumerate() {
        let Some((chol, z, yi)) = entry else { continue };
        let rows = &obs.by_player[player];
        let ni = rows.len();
        let mut b = DMatrix::zeros(ni, p);
        for (local, &r) in rows.iter().enumerate() {
            for c in 0..p {
                b[(local, c)] = rows_pop[r][c];
            }
        }
        let target = z.transpose() * (yi - b * &beta);
        let u = chol.solve(&target);
        deviations[player] = u.iter().cloned().collect();
        fitted_players.push(player);
    }

    // Center the deviations across fitted players; the mean deviation moves
    // into the population curve.
    let mut mean_dev = vec![0.0; q];
    for &i in &fitted_players {
        for j in 0..q {
            mean_dev[j] += deviations[i][j] / fitted_players.len() as f64;
        }
    }
    for &i in &fitted_players {
        for j in 0..q {
            deviations[i][j] -= mean_dev[j];
        }
    }

    let values: Vec<f64> = grid
        .ages()
        .map(|t| {
            let pop_row = pop.row(t as f64);
            let block_row = block.row(t as f64);
            let base: f64 = pop_row.iter().zip(beta.iter()).map(|(b, c)| b * c).sum();
            let shift: f64 = block_row.iter().zip(mean_dev.iter()).map(|(b, c)| b * c).sum();
            base + shift
        })
        .collect();

    // Residuals against curve + centered deviations (identical fitted values
    // to the uncentered parameterization).
    let mut rss = 0.0;
    for &(player, age_idx, v) in &obs.cells {
        let t = grid.age_at(age_idx) as f64;
        let block_row = block.row(t);
        let mut mean = values[age_idx];
        for j in 0..q {
            mean += block_row[j] * deviations[player][j];
        }
        rss += (v - mean).powi(2);
    }
    let residual_sd = if n > p { (rss / (n - p) as f64).sqrt() } else { 0.0 };

    let effects = build_effects(spec, &block, &deviations, scale);
    let curve = curve_from(panel, values)?;
    FitResult::new(curve, effects, residual_sd, spec.clone())
}

/// One moment-matching pass for the per-coordinate ridge penalties
/// lambda_j = sigma_eps^2 / sigma_j^2.
fn moment_match_penalties(
    obs: &ObsData,
    rows_block: &[Vec<f64>],
    resid: &DVector<f64>,
    q: usize,
    fallback_sd: f64,
    shared_tail: bool,
) -> Vec<f64> {
    let mut raw: Vec<Vec<f64>> = Vec::new();
    let mut noise_diag: Vec<Vec<f64>> = Vec::new();
    let mut rss = 0.0;
    let mut dof = 0usize;

    for rows in &obs.by_player {
        if rows.len() < q + 1 {
            continue;
        }
        let ni = rows.len();
        let mut z = DMatrix::zeros(ni, q);
        let mut r = DVector::zeros(ni);
        for (local, &row) in rows.iter().enumerate() {
            for c in 0..q {
                z[(local, c)] = rows_block[row][c];
            }
            r[local] = resid[row];
        }
        let mut ztz = z.transpose() * &z;
        let jitter = 1e-8 * ztz.diagonal().amax().max(1.0);
        for j in 0..q {
            ztz[(j, j)] += jitter;
        }
        let Some(chol) = Cholesky::new(ztz) else { continue };
        let u = chol.solve(&(z.transpose() * &r));
        let fitted = &z * &u;
        rss += (&r - fitted).norm_squared();
        dof += ni - q;
        let inv = chol.inverse();
        raw.push(u.iter().cloned().collect());
        noise_diag.push((0..q).map(|j| inv[(j, j)]).collect());
    }

    let sigma_eps2 = if dof > 0 {
        rss / dof as f64
    } else {
        (fallback_sd * fallback_sd).max(1e-12)
    };
    let floor = 1e-4 * sigma_eps2.max(1e-12);

    if raw.len() < 3 {
        // Too few players to estimate effect spread: shrink hard.
        return vec![1e3; q];
    }

    let m = raw.len() as f64;
    let mut excess = vec![0.0; q];
    for j in 0..q {
        let mean_u = raw.iter().map(|u| u[j]).sum::<f64>() / m;
        let var_u = raw.iter().map(|u| (u[j] - mean_u).powi(2)).sum::<f64>() / (m - 1.0);
        let noise = sigma_eps2 * noise_diag.iter().map(|d| d[j]).sum::<f64>() / m;
        excess[j] = var_u - noise;
    }

    if shared_tail && q > 1 {
        let tail = excess[1..].iter().sum::<f64>() / (q - 1) as f64;
        for e in excess[1..].iter_mut() {
            *e = tail;
        }
    }

    excess
        .into_iter()
        .map(|e| sigma_eps2 / e.max(floor))
        .collect()
}

fn build_effects(
    spec: &EstimatorSpec,
    block: &BlockBasis,
    deviations: &[Vec<f64>],
    scale: AgeScale,
) -> PlayerEffects {
    match spec.effects {
        EffectKind::RandomQuad => {
            // Convert d0 + d1*u + d2*u^2 with u = (t - m)/h into raw-age
            // coefficients g0 + g1*t + g2*t^2.
            let m = scale.mid;
            let h = scale.half;
            let mut intercepts = Vec::with_capacity(deviations.len());
            let mut linear = Vec::with_capacity(deviations.len());
            let mut quadratic = Vec::with_capacity(deviations.len());
            for d in deviations {
                let (d0, d1, d2) = (d[0], d[1], d[2]);
                quadratic.push(d2 / (h * h));
                linear.push(d1 / h - 2.0 * m * d2 / (h * h));
                intercepts.push(d0 - d1 * m / h + d2 * m * m / (h * h));
            }
            PlayerEffects::RandomQuad { intercepts, linear, quadratic }
        }
        EffectKind::RandomSpline => {
            let basis = match block {
                BlockBasis::Spline(b) => b.clone(),
                BlockBasis::Quad(_) => unreachable!("random-spline always builds a spline block"),
            };
            let intercepts = deviations.iter().map(|d| d[0]).collect();
            let spline_coeffs = deviations.iter().map(|d| d[1..].to_vec()).collect();
            PlayerEffects::RandomSpline { intercepts, spline_coeffs, basis }
        }
        _ => unreachable!(),
    }
}
