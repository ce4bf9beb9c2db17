use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use moneygas::fokker_planck::{evolve_with, geometric_grid, stability_bound, uniform_grid};
use moneygas::ingest::write_pairs;
use moneygas::numeric::trapezoid;
use moneygas::{predicted_tail_exponent, stationary_density, DensityOnGrid, DriftDiffusionModel, Error};
use serde::{Deserialize, Serialize};

use crate::output::OutDir;

// Relaxation trajectories are thinned to about this many rows.
const MAX_TRAJECTORY_ROWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Uniform,
    Geometric,
}

/// Stationary income density of the drift-diffusion model A = a0 + a1 r, B = b0 + b2 r².
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FpArgs {
    /// Constant drift [default: 1]
    #[arg(long)]
    pub a0: Option<f64>,
    /// Drift per unit income [default: 0]
    #[arg(long)]
    pub a1: Option<f64>,
    /// Additive diffusion [default: 1]
    #[arg(long)]
    pub b0: Option<f64>,
    /// Multiplicative diffusion [default: 0]
    #[arg(long)]
    pub b2: Option<f64>,
    /// Last grid point [default: 50]
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Grid points, including r = 0 [default: 2001]
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing [default: uniform]
    #[arg(long, value_enum)]
    pub grid: Option<GridKind>,
    /// First nonzero node of a geometric grid [default: 0.01]
    #[arg(long)]
    pub first: Option<f64>,
    /// Also relax a point mass at T for this many explicit steps
    #[arg(long)]
    pub relax_steps: Option<usize>,
    /// Time step of the relaxation [default: 0.9 of the stability bound]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GridReport {
    kind: GridKind,
    points: usize,
    r_max: f64,
}

#[derive(Serialize)]
struct Relaxation {
    steps: usize,
    dt: f64,
    stability_bound: f64,
    final_l1: f64,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    model: DriftDiffusionModel<f64>,
    grid: GridReport,
    temperature: f64,
    tail_exponent: Option<f64>,
    tail: String,
    relaxation: Option<Relaxation>,
    files: Vec<String>,
}

pub fn run_fp(args: FpArgs) -> Result<()> {
    let model = DriftDiffusionModel::new(
        args.a0.unwrap_or(1.0),
        args.a1.unwrap_or(0.0),
        args.b0.unwrap_or(1.0),
        args.b2.unwrap_or(0.0),
    )?;
    let kind = args.grid.unwrap_or(GridKind::Uniform);
    let r_max = args.rmax.unwrap_or(50.0);
    let points = args.points.unwrap_or(2001);
    let grid = match kind {
        GridKind::Uniform => uniform_grid(r_max, points)?,
        GridKind::Geometric => geometric_grid(args.first.unwrap_or(0.01), r_max, points)?,
    };
    let stationary = match stationary_density(&model, &grid) {
        Err(Error::GridTooShort { suggested_r_max, .. }) => {
            anyhow::bail!("grid [0, {r_max}] misses stationary mass; rerun with --rmax {suggested_r_max}")
        }
        other => other?,
    };
    let (alpha, tail) = match predicted_tail_exponent(&model) {
        Ok(a) => (Some(a), format!("power-law tail, CCDF exponent alpha = {a}")),
        Err(Error::NoPowerLawTail) => (None, "exponential regime".to_string()),
        Err(e) => return Err(e.into()),
    };
    let mut out = OutDir::create(&args.out.unwrap_or_else(|| PathBuf::from(".")))?;
    out.write("density.csv", &write_pairs("r", "density", stationary.points()))?;

    let relaxation = match args.relax_steps {
        Some(steps) => Some(relax(&model, &stationary, steps, args.dt, &mut out)?),
        None => None,
    };
    log::info!("T = {}; {tail}", model.temperature());
    let report = Report {
        command: "fp",
        model,
        grid: GridReport { kind, points: grid.len(), r_max },
        temperature: model.temperature(),
        tail_exponent: alpha,
        tail,
        relaxation,
        files: out.written(),
    };
    out.write_json("fp.json", &report)
}

fn relax(
    model: &DriftDiffusionModel<f64>,
    stationary: &DensityOnGrid<f64>,
    steps: usize,
    dt: Option<f64>,
    out: &mut OutDir,
) -> Result<Relaxation> {
    let grid = stationary.grid();
    let bound = stability_bound(model, grid)?;
    let dt = dt.unwrap_or(0.9 * bound);
    let start = DensityOnGrid::point_mass(grid.to_vec(), model.temperature())?;
    let l1 = |values: &[f64]| {
        let diff: Vec<f64> = values.iter().zip(stationary.values()).map(|(a, b)| (a - b).abs()).collect();
        trapezoid(grid, &diff)
    };
    let every = steps.div_ceil(MAX_TRAJECTORY_ROWS).max(1);
    let mut rows = vec![(0.0, l1(start.values()))];
    let end = evolve_with(model, &start, dt, steps, |t, v| {
        if t % every == 0 || t == steps {
            rows.push((t as f64 * dt, l1(v)));
        }
    })
    .context("relaxation")?;
    out.write("relaxation.csv", &write_pairs("time", "l1_distance", rows))?;
    let final_l1 = end.l1_distance(stationary)?;
    log::info!("relaxed {steps} steps of dt = {dt}: L1 distance {final_l1:.3e}");
    Ok(Relaxation { steps, dt, stability_bound: bound, final_l1 })
}
