use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use moneygas::empirical::{exponential_cdf, ks_distance};
use moneygas::ingest::write_pairs;
use moneygas::{entropy, run, BinnedDensity, ExchangeConfig, ExchangeRule};
use serde::{Deserialize, Serialize};

use crate::output::OutDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    #[value(name = "fixed")]
    Fixed,
    #[value(name = "random_fraction")]
    RandomFraction,
    #[value(name = "random_split")]
    RandomSplit,
}

/// Kinetic money exchange from equal balances.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SimulateArgs {
    /// Number of agents [default: 1000]
    #[arg(long)]
    pub agents: Option<usize>,
    /// Total money, shared equally at the start [default: number of agents]
    #[arg(long)]
    pub money: Option<f64>,
    /// Exchange rule [default: random_fraction]
    #[arg(long, value_enum)]
    pub rule: Option<Rule>,
    /// Transfer size of the fixed rule [default: 1]
    #[arg(long)]
    pub dm: Option<f64>,
    /// Number of transactions, rejected ones included [default: 1000000]
    #[arg(long)]
    pub steps: Option<u64>,
    /// Seed of the random stream (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Steps between entropy samples [default: steps / 100]
    #[arg(long)]
    pub entropy_every: Option<u64>,
    /// Histogram bins [default: 50]
    #[arg(long)]
    pub bins: Option<usize>,
    /// Histogram upper edge in units of the mean balance [default: 10]
    #[arg(long)]
    pub grid_factor: Option<f64>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    config: ExchangeConfig<f64>,
    rule: &'static str,
    temperature: f64,
    accepted: u64,
    ks_distance: f64,
    final_entropy: f64,
    exponential_entropy: f64,
    files: Vec<String>,
}

// Entropy of the exponential law at temperature t on the same saturating grid.
fn exponential_entropy(edges: &[f64], t: f64) -> Result<f64> {
    let k = edges.len() - 1;
    let masses =
        (0..k).map(|i| (-edges[i] / t).exp() - if i + 1 == k { 0.0 } else { (-edges[i + 1] / t).exp() }).collect();
    Ok(entropy(&BinnedDensity::new(edges.to_vec(), masses)?))
}

pub fn run_simulate(args: SimulateArgs, seed: u64) -> Result<()> {
    let agents = args.agents.unwrap_or(1000);
    let rule = match args.rule.unwrap_or(Rule::RandomFraction) {
        Rule::Fixed => ExchangeRule::fixed_amount(args.dm.unwrap_or(1.0)),
        other => {
            if args.dm.is_some() {
                log::warn!("--dm only applies to the fixed rule; ignored");
            }
            if other == Rule::RandomFraction {
                ExchangeRule::random_fraction()
            } else {
                ExchangeRule::random_split()
            }
        }
    };
    let mut config =
        ExchangeConfig::new(agents, args.money.unwrap_or(agents as f64), rule, args.steps.unwrap_or(1_000_000), seed);
    if let Some(every) = args.entropy_every {
        config.entropy_every = every;
    }
    if let Some(bins) = args.bins {
        config.bins = bins;
    }
    if let Some(factor) = args.grid_factor {
        config.grid_factor = factor;
    }
    config.validate()?;
    let mut out = OutDir::create(&args.out.unwrap_or_else(|| PathBuf::from(".")))?;

    log::info!("{} agents, {} steps of the {} rule, seed {seed}", config.agents, config.steps, rule.name());
    let res = run(&config)?;
    let t = res.temperature;
    let ks = ks_distance(res.final_state.balances(), |r| exponential_cdf(r, t))?;
    let density = res.final_density()?;

    out.write("histogram.csv", &write_pairs("money", "density", density.density_points()))?;
    out.write("entropy.csv", &write_pairs("step", "entropy", res.entropy_series.iter().copied()))?;
    let report = Report {
        command: "simulate",
        rule: rule.name(),
        temperature: t,
        accepted: res.accepted,
        ks_distance: ks,
        final_entropy: res.entropy_series.last().map_or(f64::NAN, |p| p.1),
        exponential_entropy: exponential_entropy(&res.edges, t)?,
        files: out.written(),
        config,
    };
    out.write_json("simulate.json", &report)?;
    log::info!("KS distance to the exponential law at T = {t}: {ks:.4}");
    Ok(())
}
