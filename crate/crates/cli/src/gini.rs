use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use moneygas::inequality::exponential_lorenz_curve;
use moneygas::ingest::{parse_country_panel, parse_country_panel_years, with_file, write_pairs, PanelYear};
use moneygas::{detect_saturation, gini_from_lorenz, lorenz_weighted, GiniSeries, SaturationParams, SaturationReport};
use serde::{Deserialize, Serialize};

use crate::output::OutDir;

/// Lorenz curves and Gini series of a country panel, with plateau detection.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GiniArgs {
    /// Panel with code, population and quantity columns (and year, unless --year is given)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use only this year, or label a panel without a year column
    #[arg(long)]
    pub year: Option<i32>,
    /// Plateau level [default: 0.5]
    #[arg(long)]
    pub level: Option<f64>,
    /// Half-width of the plateau band [default: 0.02]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fewest trailing years inside the band [default: 5]
    #[arg(long)]
    pub min_run: Option<usize>,
    /// Points of the exponential reference curve [default: 1001]
    #[arg(long)]
    pub reference_points: Option<usize>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct YearReport {
    year: i32,
    gini: f64,
    countries: usize,
    rejected: Vec<String>,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    input: String,
    params: SaturationParams<f64>,
    years: Vec<YearReport>,
    saturation: Option<SaturationReport<f64>>,
    summary: String,
    files: Vec<String>,
}

pub fn run_gini(args: GiniArgs) -> Result<()> {
    let Some(input) = args.input else { bail!("no input file: pass --input or set it in the config") };
    let defaults = SaturationParams::default();
    let params = SaturationParams {
        level: args.level.unwrap_or(defaults.level),
        tol: args.tol.unwrap_or(defaults.tol),
        min_run: args.min_run.unwrap_or(defaults.min_run),
    };
    if params.tol.is_nan() || params.tol < 0.0 || !(0.0..=1.0).contains(&params.level) {
        bail!("plateau level {} must lie in [0, 1] and tolerance {} must be >= 0", params.level, params.tol);
    }
    let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
    let name = input.file_name().map_or_else(|| input.display().to_string(), |n| n.to_string_lossy().into_owned());
    let panel: Vec<PanelYear<f64>> = match args.year {
        Some(y) => vec![with_file(parse_country_panel(&text, y), &name).with_context(|| format!("year {y}"))?],
        None => with_file(parse_country_panel_years(&text), &name)
            .context("a panel without a year column needs --year")?,
    };

    // Years are independent; each Lorenz file is its own unit of work.
    let curves = std::thread::scope(|scope| {
        let handles: Vec<_> = panel.iter().map(|y| scope.spawn(move || lorenz_weighted(&y.records))).collect();
        handles.into_iter().map(|h| h.join().expect("lorenz thread panicked")).collect::<Vec<_>>()
    });
    let mut out = OutDir::create(&args.out.unwrap_or_else(|| PathBuf::from(".")))?;
    let mut years = Vec::new();
    for (y, curve) in panel.iter().zip(curves) {
        let curve = curve.with_context(|| format!("Lorenz curve of {}", y.year))?;
        out.write(&format!("lorenz_{}.csv", y.year), &write_pairs("population_share", "quantity_share", curve.points().iter().copied()))?;
        years.push(YearReport {
            year: y.year,
            gini: gini_from_lorenz(&curve),
            countries: y.records.len(),
            rejected: y.rejected.clone(),
        });
    }
    out.write("gini_series.csv", &write_pairs("year", "gini", years.iter().map(|y| (y.year, y.gini))))?;
    let reference = exponential_lorenz_curve::<f64>(args.reference_points.unwrap_or(1001))?;
    out.write("exponential_lorenz.csv", &write_pairs("population_share", "quantity_share", reference.points().iter().copied()))?;

    let (saturation, summary) = if years.len() < 2 {
        (None, "single year; no saturation analysis".to_string())
    } else {
        let series = GiniSeries::new(years.iter().map(|y| (y.year, y.gini)).collect(), name.clone())?;
        let report = detect_saturation(&series, params);
        let summary = match report.onset {
            Some(y) => format!("saturation at {:.2} from year {y}", params.level),
            None => format!("no saturation at {:.2} ± {}", params.level, params.tol),
        };
        (Some(report), summary)
    };
    log::info!("{summary}");
    let report =
        Report { command: "gini", input: input.display().to_string(), params, years, saturation, summary, files: out.written() };
    out.write_json("gini.json", &report)
}
