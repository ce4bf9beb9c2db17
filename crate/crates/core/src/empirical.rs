//! Money samples, complementary cumulative distributions and binned densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Non-negative money or income amounts, one per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoneySample<S> {
    values: Vec<S>,
    pub unit_label: String,
}

impl<S: Scalar> MoneySample<S> {
    pub fn new(values: Vec<S>, unit_label: impl Into<String>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "money amounts must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self { values, unit_label: unit_label.into() })
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> S {
        self.values.iter().copied().sum()
    }

    pub fn mean(&self) -> Result<S> {
        if self.values.is_empty() {
            return Err(Error::NoData);
        }
        Ok(self.total() / S::from_count(self.values.len()))
    }

    /// Values sorted ascending.
    pub fn sorted(&self) -> Vec<S> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        v
    }
}

/// Points `(r, c)` where `c` is the fraction of the population with income `>= r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve<S> {
    points: Vec<(S, S)>,
}

impl<S: Scalar> CcdfCurve<S> {
    /// Validates strictly increasing `r`, non-increasing `c` in `[0, 1]`, and `c = 1` at `r = 0`.
    pub fn new(points: Vec<(S, S)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoData);
        }
        for (k, &(r, c)) in points.iter().enumerate() {
            if !r.is_finite() || r < S::zero() {
                return Err(Error::InvalidArgument(format!("point {k}: income {r} must be finite and >= 0")));
            }
            if !c.is_finite() || c < S::zero() || c > S::one() {
                return Err(Error::InvalidArgument(format!("point {k}: fraction {c} outside [0, 1]")));
            }
            if k > 0 {
                let (pr, pc) = points[k - 1];
                if r <= pr {
                    return Err(Error::InvalidArgument(format!(
                        "point {k}: income {r} does not increase (previous {pr})"
                    )));
                }
                if c > pc {
                    return Err(Error::InvalidArgument(format!(
                        "point {k}: fraction {c} increases (previous {pc})"
                    )));
                }
            }
        }
        if points[0].0 == S::zero() && points[0].1 != S::one() {
            return Err(Error::InvalidArgument("a curve starting at r = 0 must start at c = 1".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(S, S)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points with `(0, 1)` prepended when the curve starts above zero income.
    pub(crate) fn anchored(&self) -> Vec<(S, S)> {
        let mut pts = Vec::with_capacity(self.points.len() + 1);
        if self.points[0].0 > S::zero() {
            pts.push((S::zero(), S::one()));
        }
        pts.extend_from_slice(&self.points);
        pts
    }

    /// Mean income `∫₀^∞ c(r) dr` by the trapezoid rule through the points, anchored at `(0, 1)`.
    pub fn mean_income(&self) -> S {
        let pts = self.anchored();
        let half = S::lit(0.5);
        pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * half).sum()
    }

    /// Income at which the piecewise-linear curve falls to `level`.
    ///
    /// Below the last point's fraction the curve drops vertically to zero at the last income.
    pub fn income_at_level(&self, level: S) -> Option<S> {
        if !(level > S::zero() && level <= S::one()) {
            return None;
        }
        let pts = self.anchored();
        if level >= pts[0].1 {
            return Some(pts[0].0);
        }
        for w in pts.windows(2) {
            let ((r0, c0), (r1, c1)) = (w[0], w[1]);
            if c1 <= level && level <= c0 {
                if c0 == c1 {
                    return Some(r0);
                }
                return Some(r0 + (r1 - r0) * (c0 - level) / (c0 - c1));
            }
        }
        pts.last().map(|p| p.0)
    }

    /// Linear interpolation of `c` at income `r`; zero beyond the last point.
    pub fn level_at(&self, r: S) -> S {
        let pts = self.anchored();
        if r <= pts[0].0 {
            return pts[0].1;
        }
        let k = pts.partition_point(|p| p.0 < r);
        if k >= pts.len() {
            return S::zero();
        }
        let (r1, c1) = pts[k];
        if r1 == r {
            return c1;
        }
        let (r0, c0) = pts[k - 1];
        c0 + (c1 - c0) * (r - r0) / (r1 - r0)
    }

    /// `∫_{from}^∞ c(r) dr` over the piecewise-linear curve.
    pub fn tail_integral(&self, from: S) -> S {
        let pts = self.anchored();
        let half = S::lit(0.5);
        let mut acc = S::zero();
        for w in pts.windows(2) {
            let ((r0, c0), (r1, c1)) = (w[0], w[1]);
            if r1 <= from {
                continue;
            }
            if r0 >= from {
                acc = acc + (r1 - r0) * (c0 + c1) * half;
            } else {
                let cf = c0 + (c1 - c0) * (from - r0) / (r1 - r0);
                acc = acc + (r1 - from) * (cf + c1) * half;
            }
        }
        acc
    }

    /// Rescales incomes by `factor` (used for normalized-income plots, `r / T`).
    pub fn rescaled(&self, factor: S) -> Result<Self> {
        if !(factor > S::zero()) {
            return Err(Error::InvalidArgument(format!("scale factor {factor} must be > 0")));
        }
        Self::new(self.points.iter().map(|&(r, c)| (r * factor, c)).collect())
    }
}

/// Builds the empirical CCDF `c(r) = #{values >= r} / N` at the sorted distinct values.
pub fn build_ccdf<S: Scalar>(samples: &MoneySample<S>) -> Result<CcdfCurve<S>> {
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    let sorted = samples.sorted();
    let n = sorted.len();
    let total = S::from_count(n);
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        points.push((v, S::from_count(n - i) / total));
        while i < n && sorted[i] == v {
            i += 1;
        }
    }
    Ok(CcdfCurve { points })
}

/// Histogram of a sample normalized to unit total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedDensity<S> {
    edges: Vec<S>,
    masses: Vec<S>,
}

impl<S: Scalar> BinnedDensity<S> {
    pub fn new(edges: Vec<S>, masses: Vec<S>) -> Result<Self> {
        validate_edges(&edges)?;
        if masses.len() + 1 != edges.len() {
            return Err(Error::InvalidArgument(format!(
                "{} edges need {} masses, got {}",
                edges.len(),
                edges.len() - 1,
                masses.len()
            )));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < S::zero()) {
            return Err(Error::InvalidArgument("bin masses must be finite and non-negative".into()));
        }
        let sum: S = masses.iter().copied().sum();
        if (sum - S::one()).abs() > S::lit(1e-9) {
            return Err(Error::InvalidArgument(format!("bin masses sum to {sum}, expected 1")));
        }
        Ok(Self { edges, masses })
    }

    pub fn edges(&self) -> &[S] {
        &self.edges
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    /// `(bin center, mass / width)` pairs.
    pub fn density_points(&self) -> Vec<(S, S)> {
        self.edges
            .windows(2)
            .zip(&self.masses)
            .map(|(e, &m)| ((e[0] + e[1]) * S::lit(0.5), m / (e[1] - e[0])))
            .collect()
    }

    /// Histogram where values beyond the top edge are counted in the last bin.
    ///
    /// Used for entropy tracking on a fixed grid whose upper edge is a multiple of the mean.
    pub fn from_values_saturating(values: &[S], edges: Vec<S>) -> Result<Self> {
        validate_edges(&edges)?;
        if values.is_empty() {
            return Err(Error::NoData);
        }
        let k = edges.len() - 1;
        let mut counts = vec![0usize; k];
        for &v in values {
            if v < edges[0] {
                return Err(Error::OutsideGrid { value: v.as_f64(), lower: edges[0].as_f64(), upper: edges[k].as_f64() });
            }
            counts[bin_index(&edges, v).unwrap_or(k - 1)] += 1;
        }
        Ok(Self { masses: normalize_counts(&counts), edges })
    }
}

/// Uniform grid of `bins + 1` edges over `[lower, upper]`.
pub fn uniform_edges<S: Scalar>(lower: S, upper: S, bins: usize) -> Result<Vec<S>> {
    if bins == 0 || !(upper > lower) {
        return Err(Error::InvalidArgument(format!("cannot build {bins} bins over [{lower}, {upper}]")));
    }
    let span = upper - lower;
    let k = S::from_count(bins);
    Ok((0..=bins).map(|i| if i == bins { upper } else { lower + span * S::from_count(i) / k }).collect())
}

/// Bins a sample on `edges`. Bins are half-open `[e_k, e_{k+1})` except the last, which is closed.
pub fn bin_density<S: Scalar>(samples: &MoneySample<S>, edges: &[S]) -> Result<BinnedDensity<S>> {
    validate_edges(edges)?;
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    let k = edges.len() - 1;
    let mut counts = vec![0usize; k];
    for &v in samples.values() {
        match bin_index(edges, v) {
            Some(i) => counts[i] += 1,
            None if v == edges[k] => counts[k - 1] += 1,
            None => {
                return Err(Error::OutsideGrid { value: v.as_f64(), lower: edges[0].as_f64(), upper: edges[k].as_f64() })
            }
        }
    }
    Ok(BinnedDensity { masses: normalize_counts(&counts), edges: edges.to_vec() })
}

fn bin_index<S: Scalar>(edges: &[S], v: S) -> Option<usize> {
    if v < edges[0] || v >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|e| *e <= v) - 1)
}

fn normalize_counts<S: Scalar>(counts: &[usize]) -> Vec<S> {
    let n: usize = counts.iter().sum();
    let total = S::from_count(n);
    counts.iter().map(|&c| S::from_count(c) / total).collect()
}

fn validate_edges<S: Scalar>(edges: &[S]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidArgument("a grid needs at least two edges".into()));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid edges must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Kolmogorov-Smirnov distance between the empirical distribution of `values` and `cdf`.
pub fn ks_distance<S: Scalar, F: Fn(S) -> S>(values: &[S], cdf: F) -> Result<S> {
    if values.is_empty() {
        return Err(Error::NoData);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = S::from_count(sorted.len());
    let mut d = S::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = S::from_count(i + 1) / n - f;
        let below = f - S::from_count(i) / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

/// CDF of the exponential law with mean `temperature`.
pub fn exponential_cdf<S: Scalar>(r: S, temperature: S) -> S {
    if r <= S::zero() {
        S::zero()
    } else {
        -(-r / temperature).exp_m1()
    }
}

/// The three-parameter two-class decomposition plus the derived upper-class income share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoClassParams<S> {
    /// Mean income of the exponential bulk.
    pub temperature: S,
    /// Cumulative Pareto exponent of the upper tail.
    pub alpha: S,
    /// Income separating the two classes.
    pub r_star: S,
    /// Mean income of the whole population.
    pub mean: S,
    /// Share of income going to the upper class, `1 - T / mean`.
    pub upper_share: S,
}

impl<S: Scalar> TwoClassParams<S> {
    pub fn new(temperature: S, alpha: S, r_star: S, mean: S) -> Result<Self> {
        if !(temperature > S::zero()) {
            return Err(Error::InvalidArgument(format!("temperature {temperature} must be > 0")));
        }
        if !(alpha > S::one()) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} must exceed 1 for a finite mean")));
        }
        if !(r_star > S::zero()) {
            return Err(Error::InvalidArgument(format!("crossover {r_star} must be > 0")));
        }
        let upper_share = crate::class_fit::upper_share(mean, temperature)?;
        Ok(Self { temperature, alpha, r_star, mean, upper_share })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> MoneySample<f64> {
        MoneySample::new(v.to_vec(), "u").unwrap()
    }

    #[test]
    fn ccdf_of_three_values() {
        let c = build_ccdf(&sample(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(c.points(), &[(1.0, 1.0), (2.0, 2.0 / 3.0), (3.0, 1.0 / 3.0)]);
    }

    #[test]
    fn ccdf_of_repeated_value() {
        let c = build_ccdf(&sample(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!(c.points(), &[(5.0, 1.0)]);
    }

    #[test]
    fn ccdf_of_empty_sample_is_no_data() {
        assert_eq!(build_ccdf(&sample(&[])), Err(Error::NoData));
    }

    #[test]
    fn sample_rejects_negative() {
        assert!(MoneySample::new(vec![1.0, -0.5], "u").is_err());
        assert!(MoneySample::new(vec![f64::NAN], "u").is_err());
    }

    #[test]
    fn ccdf_validation() {
        assert!(CcdfCurve::new(vec![(1.0, 1.0), (1.0, 0.5)]).is_err());
        assert!(CcdfCurve::new(vec![(1.0, 0.5), (2.0, 0.6)]).is_err());
        assert!(CcdfCurve::new(vec![(1.0, 1.2)]).is_err());
        assert!(CcdfCurve::new(vec![(0.0, 0.9)]).is_err());
        assert!(CcdfCurve::new(vec![(0.0, 1.0), (1.0, 0.4)]).is_ok());
    }

    #[test]
    fn curve_lookup_and_integrals() {
        let c = CcdfCurve::new(vec![(0.0, 1.0), (1.0, 0.5), (3.0, 0.0)]).unwrap();
        assert_eq!(c.income_at_level(0.75), Some(0.5));
        assert_eq!(c.level_at(2.0), 0.25);
        assert_eq!(c.level_at(5.0), 0.0);
        assert_eq!(c.mean_income(), 0.75 + 0.5);
        assert_eq!(c.tail_integral(2.0), 0.125);
        assert_eq!(c.tail_integral(0.5), 0.3125 + 0.5);
    }

    #[test]
    fn two_bins_split_evenly() {
        let d = bin_density(&sample(&[0.5, 1.5]), &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.masses(), &[0.5, 0.5]);
    }

    #[test]
    fn single_occupied_bin() {
        let d = bin_density(&sample(&[1.1, 1.2, 1.9, 2.0]), &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.masses(), &[0.0, 1.0]);
    }

    #[test]
    fn out_of_grid_value_is_reported() {
        let err = bin_density(&sample(&[0.5, 7.25]), &[0.0, 1.0, 2.0]).unwrap_err();
        assert_eq!(err, Error::OutsideGrid { value: 7.25, lower: 0.0, upper: 2.0 });
        assert!(err.to_string().contains("7.25"));
    }

    #[test]
    fn saturating_histogram_folds_overflow_into_last_bin() {
        let d = BinnedDensity::from_values_saturating(&[0.5, 5.0, 9.0, 1.5], vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.masses(), &[0.25, 0.75]);
    }

    #[test]
    fn uniform_edges_hit_endpoints() {
        let e = uniform_edges(0.0, 10.0, 50).unwrap();
        assert_eq!(e.len(), 51);
        assert_eq!(e[5], 1.0);
        assert_eq!(e[50], 10.0);
    }

    #[test]
    fn density_masses_must_sum_to_one() {
        assert!(BinnedDensity::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.4]).is_err());
        assert!(BinnedDensity::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn ks_of_perfect_uniform_grid() {
        // Points at (i + 0.5)/n against the uniform CDF sit half a step from both sides.
        let v: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_distance(&v, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.05).abs() < 1e-15);
    }

    #[test]
    fn two_class_params_validate() {
        let p = TwoClassParams::new(1.0f64, 3.0, 3.2, 1.25).unwrap();
        assert!((p.upper_share - 0.2).abs() < 1e-15);
        assert!(TwoClassParams::new(1.0, 0.9, 3.2, 1.25).is_err());
        assert!(TwoClassParams::new(1.0, 3.0, 3.2, 0.9).is_err());
    }
}
