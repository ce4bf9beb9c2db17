use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use moneygas::ingest::{parse_ccdf, parse_samples, with_file, write_ccdf};
use moneygas::{build_ccdf, fit_two_class, gini_two_class, normalized_ccdf, CcdfCurve, FitWindow};
use serde::{Deserialize, Serialize};

use crate::output::OutDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// One income per line, optional header
    Samples,
    /// `r,c` table of a complementary cumulative distribution
    Ccdf,
}

/// Two-class fit {T, α, r*} of an income distribution.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FitArgs {
    /// Input file
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input layout [default: samples]
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Unit label of the incomes [default: income]
    #[arg(long)]
    pub unit: Option<String>,
    /// Income windows BULK_LO,BULK_HI,TAIL_LO,TAIL_HI [default: 5th-90th percentile and top 3%]
    #[arg(long, value_delimiter = ',', value_name = "LO,HI,LO,HI", allow_negative_numbers = true)]
    pub windows: Option<Vec<f64>>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Split {
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    input: String,
    windows: FitWindow<f64>,
    windows_overridden: bool,
    temperature: f64,
    alpha: Option<f64>,
    r_star: Option<f64>,
    mean: f64,
    upper_share: f64,
    gini_two_class: f64,
    population_split: Split,
    tail: &'static str,
    bulk_rms: f64,
    tail_rms: Option<f64>,
    files: Vec<String>,
}

fn load(path: &PathBuf, format: InputFormat, unit: &str) -> Result<CcdfCurve<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok(match format {
        InputFormat::Samples => build_ccdf(&with_file(parse_samples(&text, unit), &name)?)?,
        InputFormat::Ccdf => with_file(parse_ccdf(&text), &name)?,
    })
}

pub fn run_fit(args: FitArgs) -> Result<()> {
    let Some(input) = args.input else { bail!("no input file: pass --input or set it in the config") };
    let ccdf = load(&input, args.format.unwrap_or(InputFormat::Samples), args.unit.as_deref().unwrap_or("income"))?;
    let windows = match args.windows.as_deref() {
        None => None,
        Some(&[a, b, c, d]) => Some(FitWindow::new((a, b), (c, d))?),
        Some(w) => bail!("--windows takes four numbers, got {}", w.len()),
    };
    let fit = fit_two_class(&ccdf, windows).context("two-class fit")?;
    let t = fit.temperature();
    let mut out = OutDir::create(&args.out.unwrap_or_else(|| PathBuf::from(".")))?;
    out.write("ccdf_normalized.csv", &write_ccdf(&normalized_ccdf(&ccdf, t)?))?;

    let report = Report {
        command: "fit",
        input: input.display().to_string(),
        windows: fit.windows,
        windows_overridden: windows.is_some(),
        temperature: t,
        alpha: fit.tail.map(|tail| tail.fit.alpha),
        r_star: fit.tail.map(|tail| tail.crossover.r_star),
        mean: fit.mean,
        upper_share: fit.upper_share,
        gini_two_class: gini_two_class(fit.upper_share)?,
        population_split: Split { lower: fit.population_split.0, upper: fit.population_split.1 },
        tail: if fit.tail.is_some() { "present" } else { "absent" },
        bulk_rms: fit.bulk.rms,
        tail_rms: fit.tail.map(|tail| tail.fit.rms),
        files: out.written(),
    };
    log::info!("T = {t}, f = {:.4}, tail {}", fit.upper_share, report.tail);
    out.write_json("fit.json", &report)
}
