//! Statistical mechanics of money and income.
//!
//! * [`exchange`]: agents trading money in conservative random transactions,
//!   relaxing to the exponential Boltzmann-Gibbs law as their entropy saturates.
//! * [`fokker_planck`]: income dynamics with additive and multiplicative noise,
//!   whose stationary state is exponential at low income and Pareto at high income.
//! * [`class_fit`]: the two-class fit `{T, α, r*}` of an income CCDF and the
//!   upper-class income share `f = 1 - T/⟨r⟩`.
//! * [`inequality`]: Lorenz curves, Gini coefficients, `G = (1 + f)/2`, and
//!   detection of a Gini plateau at the exponential value `G = 1/2`.
//! * [`ingest`]: delimited-text readers and writers for samples, CCDF tables
//!   and country panels.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar for the common cases.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod class_fit;
pub mod empirical;
pub mod error;
pub mod exchange;
pub mod fokker_planck;
pub mod inequality;
pub mod ingest;
pub mod numeric;
pub mod scalar;

pub use class_fit::{
    find_crossover, fit_exponential_bulk, fit_pareto_tail, fit_two_class, normalized_ccdf, top_income_share,
    upper_share, FitReport, FitWindow,
};
pub use empirical::{bin_density, build_ccdf, BinnedDensity, CcdfCurve, MoneySample, TwoClassParams};
pub use error::{Error, Result};
pub use exchange::{entropy, run, step, AgentEnsemble, ExchangeConfig, ExchangeRule, SimResult};
pub use fokker_planck::{evolve, predicted_tail_exponent, stationary_density, DensityOnGrid, DriftDiffusionModel};
pub use inequality::{
    detect_saturation, exponential_lorenz, gini_from_lorenz, gini_pairwise, gini_two_class, lorenz_from_samples,
    lorenz_weighted, CountryRecord, GiniSeries, LorenzCurve, SaturationParams, SaturationReport,
};
pub use scalar::Scalar;

pub type MoneySample64 = MoneySample<f64>;
pub type MoneySample32 = MoneySample<f32>;
pub type CcdfCurve64 = CcdfCurve<f64>;
pub type CcdfCurve32 = CcdfCurve<f32>;
pub type BinnedDensity64 = BinnedDensity<f64>;
pub type BinnedDensity32 = BinnedDensity<f32>;
pub type TwoClassParams64 = TwoClassParams<f64>;
pub type AgentEnsemble64 = AgentEnsemble<f64>;
pub type AgentEnsemble32 = AgentEnsemble<f32>;
pub type ExchangeRule64 = ExchangeRule<f64>;
pub type ExchangeConfig64 = ExchangeConfig<f64>;
pub type SimResult64 = SimResult<f64>;
pub type DriftDiffusionModel64 = DriftDiffusionModel<f64>;
pub type DriftDiffusionModel32 = DriftDiffusionModel<f32>;
pub type DensityOnGrid64 = DensityOnGrid<f64>;
pub type DensityOnGrid32 = DensityOnGrid<f32>;
pub type FitReport64 = FitReport<f64>;
pub type FitWindow64 = FitWindow<f64>;
pub type LorenzCurve64 = LorenzCurve<f64>;
pub type LorenzCurve32 = LorenzCurve<f32>;
pub type CountryRecord64 = CountryRecord<f64>;
pub type GiniSeries64 = GiniSeries<f64>;
pub type SaturationReport64 = SaturationReport<f64>;
