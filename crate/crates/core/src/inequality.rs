//! Lorenz curves, Gini coefficients and saturation of Gini time series.

use serde::{Deserialize, Serialize};

use crate::empirical::MoneySample;
use crate::error::{Error, Result};
use crate::numeric::least_squares;
use crate::scalar::Scalar;

/// Cumulative population share `x` against cumulative quantity share `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzCurve<S> {
    points: Vec<(S, S)>,
}

impl<S: Scalar> LorenzCurve<S> {
    /// Checks endpoints `(0,0)` and `(1,1)`, monotonicity and `y <= x` (up to rounding).
    pub fn new(points: Vec<(S, S)>) -> Result<Self> {
        let slack = S::lit(1e-12);
        if points.len() < 2 {
            return Err(Error::InvalidArgument("a Lorenz curve needs at least two points".into()));
        }
        let (first, last) = (points[0], points[points.len() - 1]);
        if first != (S::zero(), S::zero()) || last != (S::one(), S::one()) {
            return Err(Error::InvalidArgument("a Lorenz curve runs from (0,0) to (1,1)".into()));
        }
        for w in points.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::InvalidArgument("Lorenz points must be non-decreasing".into()));
            }
        }
        if points.iter().any(|&(x, y)| y > x + slack) {
            return Err(Error::InvalidArgument("Lorenz curve rises above the diagonal".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(S, S)] {
        &self.points
    }

    /// Linear interpolation of `y` at `x`.
    pub fn at(&self, x: S) -> S {
        let pts = &self.points;
        let k = pts.partition_point(|p| p.0 < x);
        if k == 0 {
            return pts[0].1;
        }
        if k >= pts.len() {
            return S::one();
        }
        let ((x0, y0), (x1, y1)) = (pts[k - 1], pts[k]);
        if x1 == x0 {
            y1
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

/// Builds a curve from `(weight, quantity)` pairs already sorted by quantity per unit weight.
fn cumulative<S: Scalar>(sorted: impl Iterator<Item = (S, S)>, total_weight: S, total: S) -> Vec<(S, S)> {
    let mut points = vec![(S::zero(), S::zero())];
    let (mut cw, mut cq) = (S::zero(), S::zero());
    for (w, q) in sorted {
        cw = cw + w;
        cq = cq + q;
        points.push(((cw / total_weight).min(S::one()), (cq / total).min(S::one())));
    }
    let n = points.len() - 1;
    points[n] = (S::one(), S::one());
    points
}

/// Lorenz curve of individual amounts: `x_k = k/N`, `y_k` = share held by the poorest `k`.
pub fn lorenz_from_samples<S: Scalar>(samples: &MoneySample<S>) -> Result<LorenzCurve<S>> {
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    // Summing in sorted order makes the curve independent of the input order.
    let sorted = samples.sorted();
    let total: S = sorted.iter().copied().sum();
    if !(total > S::zero()) {
        return Err(Error::ZeroTotal);
    }
    let n = S::from_count(sorted.len());
    Ok(LorenzCurve { points: cumulative(sorted.into_iter().map(|v| (S::one(), v)), n, total) })
}

/// Population and total quantity (energy, CO₂, ...) of one country in one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord<S> {
    pub code: String,
    pub population: S,
    pub quantity: S,
    pub per_capita: S,
}

impl<S: Scalar> CountryRecord<S> {
    pub fn new(code: impl Into<String>, population: S, quantity: S) -> Result<Self> {
        let code = code.into();
        if !(population > S::zero()) || !population.is_finite() {
            return Err(Error::InvalidArgument(format!("{code}: population {population} must be > 0")));
        }
        if !(quantity >= S::zero()) || !quantity.is_finite() {
            return Err(Error::InvalidArgument(format!("{code}: quantity {quantity} must be >= 0")));
        }
        Ok(Self { per_capita: quantity / population, code, population, quantity })
    }
}

/// Population-weighted Lorenz curve over countries ordered by per-capita quantity.
pub fn lorenz_weighted<S: Scalar>(records: &[CountryRecord<S>]) -> Result<LorenzCurve<S>> {
    if records.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least two countries, got {}", records.len())));
    }
    let mut order: Vec<&CountryRecord<S>> = records.iter().collect();
    order.sort_by(|a, b| {
        a.per_capita.partial_cmp(&b.per_capita).expect("finite per-capita values").then_with(|| a.code.cmp(&b.code))
    });
    let pop: S = order.iter().map(|r| r.population).sum();
    let qty: S = order.iter().map(|r| r.quantity).sum();
    if !(pop > S::zero()) || !(qty > S::zero()) {
        return Err(Error::ZeroTotal);
    }
    Ok(LorenzCurve { points: cumulative(order.into_iter().map(|r| (r.population, r.quantity)), pop, qty) })
}

/// `G = 1 - 2 A`, with `A` the trapezoidal area under the curve.
pub fn gini_from_lorenz<S: Scalar>(curve: &LorenzCurve<S>) -> S {
    let area: S = curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum::<S>()
        * S::lit(0.5);
    (S::one() - S::lit(2.0) * area).max(S::zero()).min(S::one())
}

/// Mean absolute difference form `Σ_ij w_i w_j |v_i - v_j| / (2 W² μ)`. Quadratic time.
pub fn gini_pairwise<S: Scalar>(values: &[S], weights: &[S]) -> Result<S> {
    if values.len() != weights.len() {
        return Err(Error::InvalidArgument(format!("{} values but {} weights", values.len(), weights.len())));
    }
    if values.is_empty() {
        return Err(Error::NoData);
    }
    if values.iter().chain(weights).any(|v| !v.is_finite() || *v < S::zero()) {
        return Err(Error::InvalidArgument("values and weights must be finite and non-negative".into()));
    }
    let w_total: S = weights.iter().copied().sum();
    if !(w_total > S::zero()) {
        return Err(Error::ZeroTotal);
    }
    let mean = values.iter().zip(weights).map(|(v, w)| *v * *w).sum::<S>() / w_total;
    if !(mean > S::zero()) {
        return Err(Error::ZeroTotal);
    }
    let mut acc = S::zero();
    for (vi, wi) in values.iter().zip(weights) {
        for (vj, wj) in values.iter().zip(weights) {
            acc = acc + *wi * *wj * (*vi - *vj).abs();
        }
    }
    Ok(acc / (S::lit(2.0) * w_total * w_total * mean))
}

/// Lorenz curve of the exponential law, `y = x + (1 - x) ln(1 - x)`.
pub fn exponential_lorenz<S: Scalar>(x: S) -> S {
    if x <= S::zero() {
        return S::zero();
    }
    if x >= S::one() {
        return S::one();
    }
    let rest = S::one() - x;
    x + rest * rest.ln()
}

/// Exponential Lorenz curve sampled at `points` equally spaced `x` values.
pub fn exponential_lorenz_curve<S: Scalar>(points: usize) -> Result<LorenzCurve<S>> {
    if points < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let n = S::from_count(points - 1);
    let pts = (0..points)
        .map(|i| {
            let x = if i == points - 1 { S::one() } else { S::from_count(i) / n };
            (x, exponential_lorenz(x))
        })
        .collect();
    LorenzCurve::new(pts)
}

/// Two-class Gini `G = (1 + f) / 2`.
///
/// Exact when the upper class holds income share `f` but a negligible fraction
/// of the population; a sizeable upper-class population lowers the true Gini.
pub fn gini_two_class<S: Scalar>(f: S) -> Result<S> {
    if !(f >= S::zero() && f <= S::one()) {
        return Err(Error::InvalidArgument(format!("upper-class share {f} outside [0, 1]")));
    }
    Ok((S::one() + f) * S::lit(0.5))
}

/// Gini coefficients by year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniSeries<S> {
    points: Vec<(i32, S)>,
    pub source: String,
}

impl<S: Scalar> GiniSeries<S> {
    pub fn new(points: Vec<(i32, S)>, source: impl Into<String>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("years must be strictly increasing".into()));
        }
        if points.iter().any(|(_, g)| !(*g >= S::zero() && *g <= S::one())) {
            return Err(Error::InvalidArgument("Gini values must lie in [0, 1]".into()));
        }
        Ok(Self { points, source: source.into() })
    }

    pub fn points(&self) -> &[(i32, S)] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationParams<S> {
    pub level: S,
    pub tol: S,
    pub min_run: usize,
}

impl Default for SaturationParams<f64> {
    fn default() -> Self {
        Self { level: 0.5, tol: 0.02, min_run: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport<S> {
    pub params: SaturationParams<S>,
    /// First year of the plateau, if one was found.
    pub onset: Option<i32>,
    /// Number of points on the plateau.
    pub plateau_points: usize,
    /// Least-squares slope of G per year before the plateau (whole series when there is none).
    pub pre_trend_slope: Option<S>,
}

/// Finds the earliest year from which every later G stays within `level ± tol`,
/// provided that run covers at least `min_run` points.
pub fn detect_saturation<S: Scalar>(series: &GiniSeries<S>, params: SaturationParams<S>) -> SaturationReport<S> {
    let pts = series.points();
    let inside = |g: S| (g - params.level).abs() <= params.tol;
    let run = pts.iter().rev().take_while(|(_, g)| inside(*g)).count();
    let saturated = run >= params.min_run.max(1);
    let split = if saturated { pts.len() - run } else { pts.len() };
    let trend: Vec<(S, S)> = pts[..split].iter().map(|&(y, g)| (S::lit(f64::from(y)), g)).collect();
    SaturationReport {
        params,
        onset: saturated.then(|| pts[split].0),
        plateau_points: if saturated { run } else { 0 },
        pre_trend_slope: least_squares(&trend).map(|l| l.slope),
    }
}
