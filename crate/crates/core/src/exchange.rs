//! Conservative pairwise money exchange between agents.
//!
//! Each step picks a payer and a distinct payee uniformly at random and moves
//! money between them according to an [`ExchangeRule`]. Total money is
//! conserved and balances never go negative: a transfer the payer cannot
//! cover is rejected but still counts as a step. Starting from equal
//! balances, the ensemble relaxes to the exponential (Boltzmann-Gibbs) law
//! with temperature `M / N`, and the entropy of the binned balance
//! distribution grows until it saturates.
//!
//! Random numbers come from ChaCha8 seeded with `seed_from_u64(seed)`, which
//! is specified bit-for-bit and gives identical runs on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::{uniform_edges, BinnedDensity};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Balances of `N` agents together with the conserved total `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentEnsemble<S> {
    balances: Vec<S>,
    total: S,
}

impl<S: Scalar> AgentEnsemble<S> {
    /// Every agent starts with `total / n`.
    pub fn init_equal(n: usize, total: S) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least two agents, got {n}")));
        }
        if !(total > S::zero()) || !total.is_finite() {
            return Err(Error::InvalidArgument(format!("total money {total} must be finite and > 0")));
        }
        let each = total / S::from_count(n);
        Ok(Self { balances: vec![each; n], total })
    }

    /// Wraps explicit balances; the total is their sum.
    pub fn from_balances(balances: Vec<S>) -> Result<Self> {
        if balances.len() < 2 {
            return Err(Error::InvalidArgument("need at least two agents".into()));
        }
        if balances.iter().any(|b| !b.is_finite() || *b < S::zero()) {
            return Err(Error::InvalidArgument("balances must be finite and non-negative".into()));
        }
        let total: S = balances.iter().copied().sum();
        if !(total > S::zero()) {
            return Err(Error::ZeroTotal);
        }
        Ok(Self { balances, total })
    }

    pub fn balances(&self) -> &[S] {
        &self.balances
    }

    pub fn len(&self) -> usize {
        self.balances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balances.is_empty()
    }

    /// The conserved total `M` fixed at construction.
    pub fn total(&self) -> S {
        self.total
    }

    /// Current sum of balances; equals [`total`](Self::total) up to rounding.
    pub fn balance_sum(&self) -> S {
        self.balances.iter().copied().sum()
    }

    /// Money temperature `M / N`.
    pub fn temperature(&self) -> S {
        self.total / S::from_count(self.balances.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RuleKind<S> {
    /// The payer hands over a fixed `amount`.
    FixedAmount { amount: S },
    /// The payer hands over `ν · (m_payer + m_payee) / 2` with `ν` uniform on `[0, 1)`.
    RandomFraction,
    /// The pair pools its money and splits it at a uniform random point.
    RandomSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRule<S> {
    pub kind: RuleKind<S>,
    /// Always `false`; rules that let balances go negative are not modelled.
    pub debt_allowed: bool,
}

impl<S: Scalar> ExchangeRule<S> {
    pub fn fixed_amount(amount: S) -> Self {
        Self { kind: RuleKind::FixedAmount { amount }, debt_allowed: false }
    }

    pub fn random_fraction() -> Self {
        Self { kind: RuleKind::RandomFraction, debt_allowed: false }
    }

    pub fn random_split() -> Self {
        Self { kind: RuleKind::RandomSplit, debt_allowed: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.debt_allowed {
            return Err(Error::InvalidArgument("debt is not supported by any exchange rule".into()));
        }
        if let RuleKind::FixedAmount { amount } = self.kind {
            if !(amount > S::zero()) || !amount.is_finite() {
                return Err(Error::InvalidArgument(format!("fixed transfer {amount} must be finite and > 0")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            RuleKind::FixedAmount { .. } => "fixed",
            RuleKind::RandomFraction => "random_fraction",
            RuleKind::RandomSplit => "random_split",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    Rejected,
}

fn uniform<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    S::lit(rng.random::<f64>())
}

/// Performs one transaction between two distinct, uniformly chosen agents.
pub fn step<S: Scalar, R: Rng + ?Sized>(
    ensemble: &mut AgentEnsemble<S>,
    rule: &ExchangeRule<S>,
    rng: &mut R,
) -> StepOutcome {
    let n = ensemble.balances.len();
    let payer = rng.random_range(0..n);
    let mut payee = rng.random_range(0..n - 1);
    if payee >= payer {
        payee += 1;
    }
    let b = &mut ensemble.balances;
    let amount = match rule.kind {
        RuleKind::FixedAmount { amount } => amount,
        RuleKind::RandomFraction => uniform::<S, _>(rng) * (b[payer] + b[payee]) * S::lit(0.5),
        RuleKind::RandomSplit => {
            let pool = b[payer] + b[payee];
            let share = uniform::<S, _>(rng) * pool;
            b[payer] = share;
            b[payee] = pool - share;
            return StepOutcome::Accepted;
        }
    };
    if b[payer] < amount {
        return StepOutcome::Rejected;
    }
    b[payer] = b[payer] - amount;
    b[payee] = b[payee] + amount;
    StepOutcome::Accepted
}

/// Shannon entropy `-Σ p ln p` of a binned density, with `0 ln 0 = 0`.
pub fn entropy<S: Scalar>(density: &BinnedDensity<S>) -> S {
    density
        .masses()
        .iter()
        .filter(|p| **p > S::zero())
        .map(|&p| -p * p.ln())
        .sum()
}

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeConfig<S> {
    pub agents: usize,
    pub total: S,
    pub rule: ExchangeRule<S>,
    pub steps: u64,
    pub seed: u64,
    /// Entropy is sampled every this many steps (and at the last step).
    pub entropy_every: u64,
    pub bins: usize,
    /// Upper edge of the entropy grid as a multiple of `M / N`.
    pub grid_factor: S,
}

impl<S: Scalar> ExchangeConfig<S> {
    pub fn new(agents: usize, total: S, rule: ExchangeRule<S>, steps: u64, seed: u64) -> Self {
        Self { agents, total, rule, steps, seed, entropy_every: (steps / 100).max(1), bins: 50, grid_factor: S::lit(10.0) }
    }

    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        if self.agents < 2 {
            return Err(Error::InvalidArgument(format!("need at least two agents, got {}", self.agents)));
        }
        if !(self.total > S::zero()) {
            return Err(Error::InvalidArgument(format!("total money {} must be > 0", self.total)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be >= 1".into()));
        }
        if self.bins < 10 {
            return Err(Error::InvalidArgument(format!("need at least 10 entropy bins, got {}", self.bins)));
        }
        if self.entropy_every == 0 {
            return Err(Error::InvalidArgument("entropy sampling interval must be >= 1".into()));
        }
        if !(self.grid_factor > S::zero()) {
            return Err(Error::InvalidArgument(format!("grid factor {} must be > 0", self.grid_factor)));
        }
        Ok(())
    }

    /// Entropy grid `[0, grid_factor · M / N]` shared by every sample of a run.
    pub fn entropy_edges(&self) -> Result<Vec<S>> {
        let t = self.total / S::from_count(self.agents);
        uniform_edges(S::zero(), self.grid_factor * t, self.bins)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult<S> {
    pub final_state: AgentEnsemble<S>,
    /// `(step, entropy)` pairs, starting with step 0.
    pub entropy_series: Vec<(u64, S)>,
    pub temperature: S,
    pub seed: u64,
    pub accepted: u64,
    pub edges: Vec<S>,
}

impl<S: Scalar> SimResult<S> {
    /// Histogram of the final balances on the entropy grid.
    pub fn final_density(&self) -> Result<BinnedDensity<S>> {
        BinnedDensity::from_values_saturating(self.final_state.balances(), self.edges.clone())
    }
}

/// Runs a seeded simulation from equal balances.
pub fn run<S: Scalar>(config: &ExchangeConfig<S>) -> Result<SimResult<S>> {
    config.validate()?;
    let mut ensemble = AgentEnsemble::init_equal(config.agents, config.total)?;
    let edges = config.entropy_edges()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let measure = |e: &AgentEnsemble<S>| -> Result<S> {
        Ok(entropy(&BinnedDensity::from_values_saturating(e.balances(), edges.clone())?))
    };

    let mut series = vec![(0, measure(&ensemble)?)];
    let mut accepted = 0u64;
    for t in 1..=config.steps {
        if step(&mut ensemble, &config.rule, &mut rng) == StepOutcome::Accepted {
            accepted += 1;
        }
        if t % config.entropy_every == 0 || t == config.steps {
            series.push((t, measure(&ensemble)?));
        }
    }
    Ok(SimResult {
        temperature: ensemble.temperature(),
        final_state: ensemble,
        entropy_series: series,
        seed: config.seed,
        accepted,
        edges,
    })
}

/// Runs one simulation per seed on scoped threads. Output order follows `seeds`.
pub fn run_many<S: Scalar>(base: &ExchangeConfig<S>, seeds: &[u64]) -> Result<Vec<SimResult<S>>> {
    base.validate()?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let cfg = ExchangeConfig { seed, ..base.clone() };
                scope.spawn(move || run(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    })
}
