//! Two-class decomposition of an income CCDF.
//!
//! The lower class follows an exponential law (a straight line of `ln c`
//! against `r`), the upper class a Pareto law (a straight line of `ln c`
//! against `ln r`). Both lines are fitted by least squares in their own
//! window; the crossover income `r*` is where they meet.

use serde::{Deserialize, Serialize};

use crate::empirical::{CcdfCurve, TwoClassParams};
use crate::error::{Error, Result};
use crate::numeric::{bisect, least_squares, LineFit};
use crate::scalar::Scalar;

/// Minimum number of CCDF points a regression window must hold.
pub const MIN_WINDOW_POINTS: usize = 5;

/// Default bulk window, as population levels `c`: from the 5th to the 90th percentile.
pub const BULK_LEVELS: (f64, f64) = (0.95, 0.10);
/// Default tail window: the top 3% of the population.
pub const TAIL_LEVEL: f64 = 0.03;

/// Income ranges used by the two regressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow<S> {
    /// `(r_min, r_max)` for the exponential fit.
    pub lower: (S, S),
    /// `(r_min, r_max)` for the power-law fit.
    pub upper: (S, S),
}

impl<S: Scalar> FitWindow<S> {
    pub fn new(lower: (S, S), upper: (S, S)) -> Result<Self> {
        let w = Self { lower, upper };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.0 < self.lower.1) || !(self.upper.0 < self.upper.1) {
            return Err(Error::InvalidArgument(format!(
                "fit windows must be non-empty: lower {:?}, upper {:?}",
                self.lower, self.upper
            )));
        }
        if self.lower.1 > self.upper.0 {
            return Err(Error::InvalidArgument(format!(
                "bulk window ends at {} after the tail window starts at {}",
                self.lower.1, self.upper.0
            )));
        }
        Ok(())
    }

    /// Bulk between the 5th and 90th population percentiles, tail over the top 3%.
    pub fn default_for(ccdf: &CcdfCurve<S>) -> Result<Self> {
        let at = |level: f64| {
            ccdf.income_at_level(S::lit(level))
                .ok_or_else(|| Error::InvalidArgument(format!("curve does not reach level {level}")))
        };
        let last = ccdf.points()[ccdf.len() - 1].0;
        Self::new((at(BULK_LEVELS.0)?, at(BULK_LEVELS.1)?), (at(TAIL_LEVEL)?, last))
    }
}

fn window_points<S: Scalar>(
    ccdf: &CcdfCurve<S>,
    (lo, hi): (S, S),
    map: impl Fn(S) -> S,
    positive_r: bool,
) -> Result<Vec<(S, S)>> {
    let pts: Vec<(S, S)> = ccdf
        .points()
        .iter()
        .filter(|(r, c)| *r >= lo && *r <= hi && *c > S::zero() && (!positive_r || *r > S::zero()))
        .map(|&(r, c)| (map(r), c.ln()))
        .collect();
    if pts.len() < MIN_WINDOW_POINTS {
        return Err(Error::InsufficientPoints {
            lower: lo.as_f64(),
            upper: hi.as_f64(),
            needed: MIN_WINDOW_POINTS,
            found: pts.len(),
        });
    }
    Ok(pts)
}

/// `ln c ≈ intercept - r / T` over the bulk window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit<S> {
    pub temperature: S,
    pub intercept: S,
    pub rms: S,
    pub points: usize,
}

impl<S: Scalar> ExponentialFit<S> {
    pub fn log_level(&self, r: S) -> S {
        self.intercept - r / self.temperature
    }
}

/// `ln c ≈ intercept - α ln r` over the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoFit<S> {
    pub alpha: S,
    pub intercept: S,
    pub rms: S,
    pub points: usize,
}

impl<S: Scalar> ParetoFit<S> {
    pub fn log_level(&self, r: S) -> S {
        self.intercept - self.alpha * r.ln()
    }
}

/// Least-squares slope of `ln c` against `r`; `T = -1 / slope`.
pub fn fit_exponential_bulk<S: Scalar>(ccdf: &CcdfCurve<S>, window: (S, S)) -> Result<ExponentialFit<S>> {
    let pts = window_points(ccdf, window, |r| r, false)?;
    let LineFit { slope, intercept, rms, points } = least_squares(&pts).ok_or(Error::NotExponential { slope: 0.0 })?;
    if !(slope < S::zero()) {
        return Err(Error::NotExponential { slope: slope.as_f64() });
    }
    Ok(ExponentialFit { temperature: -S::one() / slope, intercept, rms, points })
}

/// Least-squares slope of `ln c` against `ln r`; `α = -slope`.
pub fn fit_pareto_tail<S: Scalar>(ccdf: &CcdfCurve<S>, window: (S, S)) -> Result<ParetoFit<S>> {
    let pts = window_points(ccdf, window, |r| r.ln(), true)?;
    let LineFit { slope, intercept, rms, points } = least_squares(&pts).ok_or(Error::NotPowerLaw { slope: 0.0 })?;
    if !(slope < S::zero()) {
        return Err(Error::NotPowerLaw { slope: slope.as_f64() });
    }
    Ok(ParetoFit { alpha: -slope, intercept, rms, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover<S> {
    pub r_star: S,
    /// Fraction of the population with income `>= r_star`, read off the curve.
    pub population_above: S,
}

/// Income where the fitted exponential falls below the fitted power law.
///
/// The gap `ln c_exp - ln c_pow = const - r/T + α ln r` is concave with its
/// maximum at `r = α T`, so it changes sign at most once above that point.
/// That sign change is the crossover; it must fall inside the data range.
pub fn find_crossover<S: Scalar>(
    bulk: &ExponentialFit<S>,
    tail: &ParetoFit<S>,
    ccdf: &CcdfCurve<S>,
) -> Result<Crossover<S>> {
    let gap = |r: S| bulk.log_level(r) - tail.log_level(r);
    let pts = ccdf.points();
    let (first, last) = (pts[0].0.max(S::min_positive_value()), pts[pts.len() - 1].0);
    let peak = (tail.alpha * bulk.temperature).max(first);
    if peak >= last {
        return Err(Error::NoCrossover(format!("gap peaks at r = {peak}, beyond the data (max {last})")));
    }
    if !(gap(peak) > S::zero()) {
        return Err(Error::NoCrossover("the exponential fit never rises above the power-law fit".into()));
    }
    if !(gap(last) < S::zero()) {
        return Err(Error::NoCrossover(format!("the fits have not crossed by the largest income {last}")));
    }
    let tol = last * S::epsilon() * S::lit(4.0);
    let r_star = bisect(gap, peak, last, tol).ok_or_else(|| Error::NoCrossover("bisection failed".into()))?;
    Ok(Crossover { r_star, population_above: ccdf.level_at(r_star) })
}

/// `f = (mean - T) / mean`, the share of income above the exponential bulk.
pub fn upper_share<S: Scalar>(mean: S, temperature: S) -> Result<S> {
    if !(temperature > S::zero()) {
        return Err(Error::InvalidArgument(format!("temperature {temperature} must be > 0")));
    }
    if mean < temperature {
        return Err(Error::TemperatureExceedsMean { temperature: temperature.as_f64(), mean: mean.as_f64() });
    }
    let f = (mean - temperature) / mean;
    Ok(f.max(S::zero()).min(S::one() - S::epsilon()))
}

/// Share of total income held by the top `q` of the population.
///
/// With `c(r_q) = q`, the share is `[q r_q + ∫_{r_q}^∞ c dr] / ⟨r⟩`.
pub fn top_income_share<S: Scalar>(ccdf: &CcdfCurve<S>, q: S) -> Result<S> {
    if !(q > S::zero() && q < S::one()) {
        return Err(Error::InvalidArgument(format!("population fraction {q} outside (0, 1)")));
    }
    let r_q = ccdf
        .income_at_level(q)
        .ok_or_else(|| Error::InvalidArgument(format!("level {q} outside the data")))?;
    let mean = ccdf.mean_income();
    if !(mean > S::zero()) {
        return Err(Error::ZeroTotal);
    }
    Ok((q * r_q + ccdf.tail_integral(r_q)) / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport<S> {
    pub fit: ParetoFit<S>,
    pub crossover: Crossover<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport<S> {
    pub windows: FitWindow<S>,
    pub bulk: ExponentialFit<S>,
    /// `None` when the tail window is explained as well by the exponential as by a power law.
    pub tail: Option<TailReport<S>>,
    /// `∫ c dr` over the curve.
    pub mean: S,
    pub upper_share: S,
    /// Fractions of the population below and above `r*`.
    pub population_split: (S, S),
}

impl<S: Scalar> FitReport<S> {
    pub fn temperature(&self) -> S {
        self.bulk.temperature
    }

    /// RMS log residuals of the bulk and tail regressions.
    pub fn residuals(&self) -> (S, Option<S>) {
        (self.bulk.rms, self.tail.map(|t| t.fit.rms))
    }

    /// The three-parameter summary, when a tail was found.
    pub fn params(&self) -> Option<Result<TwoClassParams<S>>> {
        self.tail
            .map(|t| TwoClassParams::new(self.bulk.temperature, t.fit.alpha, t.crossover.r_star, self.mean))
    }
}

/// Fits `{T, α, r*}` and derives the mean income and upper-class share.
pub fn fit_two_class<S: Scalar>(ccdf: &CcdfCurve<S>, windows: Option<FitWindow<S>>) -> Result<FitReport<S>> {
    let windows = match windows {
        Some(w) => {
            w.validate()?;
            w
        }
        None => FitWindow::default_for(ccdf)?,
    };
    let bulk = fit_exponential_bulk(ccdf, windows.lower)?;
    let mean = ccdf.mean_income();

    // The tail is absent when extending the bulk line into the tail window fits at least as well.
    let tail_fit = fit_pareto_tail(ccdf, windows.upper)?;
    let tail_pts = window_points(ccdf, windows.upper, |r| r, false)?;
    let extrapolated_rms = {
        let ss: S = tail_pts.iter().map(|&(r, lc)| (lc - bulk.log_level(r)).powi(2)).sum();
        (ss / S::from_count(tail_pts.len())).sqrt()
    };

    if extrapolated_rms <= tail_fit.rms {
        let f = upper_share(mean.max(bulk.temperature), bulk.temperature)?;
        return Ok(FitReport {
            windows,
            bulk,
            tail: None,
            mean,
            upper_share: f,
            population_split: (S::one(), S::zero()),
        });
    }

    let crossover = find_crossover(&bulk, &tail_fit, ccdf)?;
    let f = upper_share(mean, bulk.temperature)?;
    Ok(FitReport {
        windows,
        bulk,
        tail: Some(TailReport { fit: tail_fit, crossover }),
        mean,
        upper_share: f,
        population_split: (S::one() - crossover.population_above, crossover.population_above),
    })
}

/// CCDF with incomes divided by `T`, so every exponential bulk collapses onto `e^{-x}`.
pub fn normalized_ccdf<S: Scalar>(ccdf: &CcdfCurve<S>, temperature: S) -> Result<CcdfCurve<S>> {
    ccdf.rescaled(S::one() / temperature)
}
