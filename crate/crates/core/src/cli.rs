//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed validation, 2 bad configuration,
//! 3 numerical failure or non-convergence, 4 I/O failure.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::asymptotics::{AsymptoticSolver, EntanglementReport};
use crate::config::{Axis, RunConfig};
use crate::error::Error;
use crate::simulator::run_walk;
use crate::states::{CoinState, PositionDistribution};
use crate::validation::{self, Expectations, ValidationOptions};

#[derive(Debug, Parser)]
#[command(name = "qwalk2d", version, about = "Coin-position entanglement of two-dimensional quantum walks")]
pub struct Cli {
    /// Worker threads for quadrature and lattice updates.
    #[arg(long, global = true, env = "QWALK2D_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Long-time entanglement for one initial state.
    Asymptotic(AsymptoticArgs),
    /// Long-time entanglement over a one- or two-axis parameter grid.
    Sweep(SweepArgs),
    /// Step-by-step entanglement from the lattice simulation.
    Simulate(SimulateArgs),
    /// Run the built-in reference checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Coarsest grid size per axis; overrides `quadrature.grid`.
    #[arg(long)]
    pub grid: Option<usize>,
    /// CSV file for the density entries.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of steps; overrides `simulate.steps`.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Coarsest grid for the constant checks.
    #[arg(long, default_value_t = ValidationOptions::default().grid)]
    pub grid: usize,
    /// Coarsest grid for the remaining quadratures.
    #[arg(long, default_value_t = ValidationOptions::default().sweep_grid)]
    pub sweep_grid: usize,
    /// Simulation length for the time-average check.
    #[arg(long, default_value_t = ValidationOptions::default().steps)]
    pub steps: usize,
    #[arg(long, default_value_t = ValidationOptions::default().seed)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(#[from] Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{failed} validation check(s) failed")]
    ValidationFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ValidationFailed { .. } => 1,
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 4,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn solver_for(cfg: &RunConfig, grid: Option<usize>) -> Result<AsymptoticSolver, CliError> {
    let coin = cfg.coin.build().map_err(config_err)?;
    let mut quad = cfg.quadrature.build().map_err(config_err)?;
    if let Some(g) = grid {
        quad.grid_points_per_axis = g;
        quad.validate().map_err(config_err)?;
    }
    AsymptoticSolver::new(coin, quad).map_err(config_err)
}

fn format_report(report: &EntanglementReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "entropy_bits = {:.11e}", report.entropy);
    let ev: Vec<String> = report.eigenvalues.iter().map(|v| format!("{v:.11e}")).collect();
    let _ = writeln!(s, "eigenvalues = [{}]", ev.join(", "));
    let _ = writeln!(s, "converged = {}", report.converged);
    let m = report.density.matrix();
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| format!("{:+.8e}{:+.8e}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(s, "rho[{i}] = {}", row.join("  "));
    }
    for (m, e) in &report.refinement_history {
        let _ = writeln!(s, "grid {m:>5}: entropy_bits = {e:.11e}");
    }
    s
}

fn density_csv(report: &EntanglementReport) -> String {
    let mut s = String::from("row,col,re,im\n");
    let m = report.density.matrix();
    for i in 0..4 {
        for j in 0..4 {
            let _ = writeln!(s, "{i},{j},{:.11e},{:.11e}", m[(i, j)].re, m[(i, j)].im);
        }
    }
    s
}

fn run_asymptotic(args: &AsymptoticArgs, cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let solver = solver_for(cfg, args.grid)?;
    let chi = cfg.state.build().map_err(config_err)?;
    let pos = cfg.position.build().map_err(config_err)?;
    let report = solver.entanglement(&chi, &pos)?;
    out.push_str(&format_report(&report));
    if let Some(path) = args.out.as_ref().or(cfg.out.as_ref()) {
        write_output(path, &density_csv(&report))?;
    }
    Ok(())
}

struct SweepPoint {
    coords: Vec<f64>,
    chi: CoinState,
    pos: PositionDistribution,
}

fn sweep_points(cfg: &RunConfig, axes: &[Axis]) -> Result<Vec<SweepPoint>, CliError> {
    let mut index_sets: Vec<Vec<usize>> = vec![Vec::new()];
    for axis in axes {
        index_sets = index_sets
            .into_iter()
            .flat_map(|prefix| {
                (0..axis.values.len()).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    index_sets
        .into_iter()
        .map(|idx| {
            let mut point_cfg = cfg.clone();
            let mut coords = Vec::with_capacity(axes.len());
            for (axis, &i) in axes.iter().zip(&idx) {
                let v = axis.values[i];
                point_cfg = point_cfg.with_axis(axis.name, v).map_err(config_err)?;
                coords.push(v);
            }
            Ok(SweepPoint {
                coords,
                chi: point_cfg.state.build().map_err(config_err)?,
                pos: point_cfg.position.build().map_err(config_err)?,
            })
        })
        .collect()
}

fn run_sweep(args: &SweepArgs, cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let axes = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?
        .axes()
        .map_err(config_err)?;
    let solver = solver_for(cfg, args.grid)?;
    let points = sweep_points(cfg, &axes)?;
    let path = args
        .out
        .as_ref()
        .or(cfg.out.as_ref())
        .ok_or_else(|| CliError::Config("sweep needs --out or `out` in the configuration".into()))?;

    let mut seen = BTreeSet::new();
    let distinct: Vec<PositionDistribution> = points
        .iter()
        .filter(|p| seen.insert(p.pos.to_string()))
        .map(|p| p.pos)
        .collect();
    solver.prepare(&distinct)?;
    let reports: Vec<EntanglementReport> = points
        .par_iter()
        .map(|p| solver.evaluate(&p.chi, &p.pos))
        .collect::<Result<_, _>>()?;

    let mut csv = String::new();
    for axis in &axes {
        let _ = write!(csv, "{}_over_pi,", axis.name.as_str());
    }
    csv.push_str("entropy_bits,converged\n");
    let mut unconverged = 0;
    for (p, r) in points.iter().zip(&reports) {
        for c in &p.coords {
            let _ = write!(csv, "{c:.11e},");
        }
        let _ = writeln!(csv, "{:.11e},{}", r.entropy, r.converged);
        unconverged += usize::from(!r.converged);
    }
    write_output(path, &csv)?;
    let (lo, hi) = reports
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.entropy), hi.max(r.entropy)));
    let _ = writeln!(out, "points = {}", reports.len());
    let _ = writeln!(out, "entropy_bits range = [{lo:.11e}, {hi:.11e}]");
    let _ = writeln!(out, "unconverged = {unconverged}");
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(())
}

fn run_simulate(args: &SimulateArgs, cfg: &RunConfig, out: &mut String) -> Result<(), CliError> {
    let coin = cfg.coin.build().map_err(config_err)?;
    let chi = cfg.state.build().map_err(config_err)?;
    let pos = cfg.position.build().map_err(config_err)?;
    pos.sites().map_err(config_err)?;
    let mut sim = cfg.simulate.clone();
    if let Some(n) = args.steps {
        sim.steps = n;
        if sim.window.is_some_and(|[_, hi]| hi > n) {
            sim.window = None;
        }
    }
    let (lo, hi) = sim.window().map_err(config_err)?;
    let traj = run_walk(&chi, &pos, &coin, sim.steps)?;

    let mut csv = String::from("n,entropy_bits\n");
    for (n, e) in &traj.entropies {
        let _ = writeln!(csv, "{n},{e:.11e}");
    }
    if let Some(path) = args.out.as_ref().or(cfg.out.as_ref()) {
        write_output(path, &csv)?;
    } else {
        out.push_str(&csv);
    }
    let (_, last) = traj.entropies.last().copied().unwrap_or((0, 0.0));
    let mean = traj.window_mean(lo, hi).unwrap_or(last);
    let _ = writeln!(out, "final entropy_bits = {last:.11e}");
    let _ = writeln!(out, "window [{lo}, {hi}] mean entropy_bits = {mean:.11e}");
    Ok(())
}

fn run_validate(args: &ValidateArgs, out: &mut String) -> Result<(), CliError> {
    let opts = ValidationOptions {
        grid: args.grid,
        sweep_grid: args.sweep_grid,
        steps: args.steps,
        seed: args.seed,
    };
    let outcomes = validation::run_all(&Expectations::default(), &opts)?;
    out.push_str(&validation::render(&outcomes));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed { failed });
    }
    Ok(())
}

fn build_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(config_err)
}

/// Runs a parsed command, appending the human-readable summary to `out`.
pub fn execute(cli: &Cli, out: &mut String) -> Result<(), CliError> {
    let cfg = match &cli.command {
        Command::Asymptotic(a) => load_config(a.config.as_deref())?,
        Command::Sweep(a) => load_config(Some(&a.config))?,
        Command::Simulate(a) => load_config(a.config.as_deref())?,
        Command::Validate(_) => RunConfig::default(),
    };
    let pool = build_pool(cli.workers.or(cfg.workers))?;
    pool.install(|| match &cli.command {
        Command::Asymptotic(a) => run_asymptotic(a, &cfg, out),
        Command::Sweep(a) => run_sweep(a, &cfg, out),
        Command::Simulate(a) => run_simulate(a, &cfg, out),
        Command::Validate(a) => run_validate(a, out),
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = String::new();
    let result = execute(&cli, &mut out);
    print!("{out}");
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qwalk2d: {e}");
            e.exit_code()
        }
    }
}
