//! Drift-diffusion model of income with additive and multiplicative components.
//!
//! The income density evolves as
//!
//! ```text
//! ∂P/∂t = ∂/∂r [A(r) P] + ∂²/∂r² [B(r) P],   A(r) = a0 + a1 r,   B(r) = b0 + b2 r²
//! ```
//!
//! with zero probability flux at `r = 0` and at the top of the grid. The
//! additive part (`a0`, `b0`) alone gives the exponential law with
//! temperature `b0 / a0`; the multiplicative part (`a1`, `b2`) bends the
//! upper tail into a power law whose cumulative exponent is `1 + a1 / b2`.
//! The zero-flux stationary state is `P(r) ∝ exp(-Φ(r)) / B(r)` with
//! `Φ(r) = ∫₀^r A/B`, a member of the Pearson type IV family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, trapezoid};
use crate::scalar::Scalar;

/// Stationary mass allowed above the top of the grid.
pub const MAX_TAIL_MASS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusionModel<S> {
    /// Additive drift, money per time.
    pub a0: S,
    /// Multiplicative drift rate, per time.
    pub a1: S,
    /// Additive diffusion, money² per time.
    pub b0: S,
    /// Multiplicative diffusion rate, per time.
    pub b2: S,
}

impl<S: Scalar> DriftDiffusionModel<S> {
    pub fn new(a0: S, a1: S, b0: S, b2: S) -> Result<Self> {
        let m = Self { a0, a1, b0, b2 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.a0, self.a1, self.b0, self.b2].iter().all(|v| v.is_finite());
        if !all_finite || !(self.a0 > S::zero()) || !(self.b0 > S::zero()) || self.a1 < S::zero() || self.b2 < S::zero() {
            return Err(Error::InvalidArgument(format!(
                "need a0 > 0, b0 > 0, a1 >= 0, b2 >= 0 (got a0={}, a1={}, b0={}, b2={})",
                self.a0, self.a1, self.b0, self.b2
            )));
        }
        Ok(())
    }

    pub fn drift(&self, r: S) -> S {
        self.a0 + self.a1 * r
    }

    pub fn diffusion(&self, r: S) -> S {
        self.b0 + self.b2 * r * r
    }

    /// Temperature `b0 / a0` of the exponential regime.
    pub fn temperature(&self) -> S {
        self.b0 / self.a0
    }

    /// `Φ(r) = ∫₀^r A(s)/B(s) ds` in closed form.
    pub fn potential(&self, r: S) -> S {
        let Self { a0, a1, b0, b2 } = *self;
        if b2 == S::zero() {
            return (a0 * r + a1 * r * r * S::lit(0.5)) / b0;
        }
        let k = (b2 / b0).sqrt();
        a0 / (b0 * b2).sqrt() * (r * k).atan() + a1 / (S::lit(2.0) * b2) * (b2 * r * r / b0).ln_1p()
    }

    /// Logarithm of the unnormalized stationary density, zero at `r = 0`.
    pub fn log_weight(&self, r: S) -> S {
        -(self.b2 * r * r / self.b0).ln_1p() - self.potential(r)
    }

    fn weight(&self, r: S) -> S {
        self.log_weight(r).exp()
    }

    // Length scale of the bulk: the smaller of the exponential and Gaussian widths.
    fn bulk_scale(&self) -> S {
        let t = self.temperature();
        if self.a1 > S::zero() {
            t.min((self.b0 / self.a1).sqrt())
        } else {
            t
        }
    }
}

/// Unnormalized stationary mass on `[0, r_max]` by panelled Gauss-Legendre quadrature.
fn inner_mass<S: Scalar>(model: &DriftDiffusionModel<S>, r_max: S) -> S {
    let scale = model.bulk_scale();
    let mut a = S::zero();
    let mut acc = S::zero();
    while a < r_max {
        let b = (a + S::lit(0.5) * scale + S::lit(0.1) * a).min(r_max);
        acc = acc + gauss_legendre(a, b, |r| model.weight(r));
        a = b;
    }
    acc
}

/// Unnormalized stationary mass above `r_max`, integrated in `s = ln(r / r_max)`.
fn outer_mass<S: Scalar>(model: &DriftDiffusionModel<S>, r_max: S) -> S {
    let mut acc = S::zero();
    let panel = S::lit(0.25);
    let mut s = S::zero();
    for _ in 0..4000 {
        let part = gauss_legendre(s, s + panel, |u| {
            let r = r_max * u.exp();
            if !r.is_finite() {
                return S::zero();
            }
            let w = model.weight(r) * r;
            if w.is_finite() {
                w
            } else {
                S::zero()
            }
        });
        acc = acc + part;
        s = s + panel;
        if part <= acc * S::lit(1e-17) || acc == S::zero() && s > S::lit(8.0) {
            break;
        }
    }
    acc
}

/// Fraction of the stationary mass lying above `r`; this is the exact stationary CCDF.
pub fn stationary_ccdf<S: Scalar>(model: &DriftDiffusionModel<S>, r: S) -> S {
    if r <= S::zero() {
        return S::one();
    }
    let inner = inner_mass(model, r);
    let outer = outer_mass(model, r);
    outer / (inner + outer)
}

/// Smallest `r_max` (by doubling from `start`) that leaves at most [`MAX_TAIL_MASS`] above it.
pub fn suggest_r_max<S: Scalar>(model: &DriftDiffusionModel<S>, start: S) -> S {
    let mut r = start.max(model.temperature());
    for _ in 0..200 {
        if stationary_ccdf(model, r) <= S::lit(MAX_TAIL_MASS) {
            return r;
        }
        r = r * S::lit(2.0);
    }
    r
}

/// Probability density tabulated on a grid that starts at zero income.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOnGrid<S> {
    grid: Vec<S>,
    values: Vec<S>,
}

impl<S: Scalar> DensityOnGrid<S> {
    /// Validates the grid and values; the trapezoidal mass must be 1 within 1e-6.
    pub fn new(grid: Vec<S>, values: Vec<S>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("{} grid points but {} values", grid.len(), values.len())));
        }
        if values.iter().any(|v| !v.is_finite() || *v < S::zero()) {
            return Err(Error::InvalidArgument("density values must be finite and non-negative".into()));
        }
        let mass = trapezoid(&grid, &values);
        if (mass - S::one()).abs() > S::lit(1e-6) {
            return Err(Error::InvalidArgument(format!("density integrates to {mass}, expected 1")));
        }
        Ok(Self { grid, values })
    }

    /// Rescales `values` to unit trapezoidal mass.
    pub fn normalized(grid: Vec<S>, values: Vec<S>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("{} grid points but {} values", grid.len(), values.len())));
        }
        let mass = trapezoid(&grid, &values);
        if !(mass > S::zero()) || !mass.is_finite() {
            return Err(Error::ZeroTotal);
        }
        let values = values.into_iter().map(|v| v / mass).collect();
        Self::new(grid, values)
    }

    /// All mass on the grid node nearest to `r`.
    pub fn point_mass(grid: Vec<S>, r: S) -> Result<Self> {
        validate_grid(&grid)?;
        let k = grid
            .iter()
            .enumerate()
            .min_by(|a, b| (*a.1 - r).abs().partial_cmp(&(*b.1 - r).abs()).expect("finite grid"))
            .map(|(k, _)| k)
            .expect("non-empty grid");
        let w = cell_weights(&grid);
        let mut values = vec![S::zero(); grid.len()];
        values[k] = S::one() / w[k];
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[S] {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn mass(&self) -> S {
        trapezoid(&self.grid, &self.values)
    }

    /// Trapezoidal L1 distance to a density on the same grid.
    pub fn l1_distance(&self, other: &Self) -> Result<S> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("densities live on different grids".into()));
        }
        let diff: Vec<S> = self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).abs()).collect();
        Ok(trapezoid(&self.grid, &diff))
    }

    pub fn points(&self) -> impl Iterator<Item = (S, S)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

fn validate_grid<S: Scalar>(grid: &[S]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidArgument("a density grid needs at least three points".into()));
    }
    if grid[0] != S::zero() {
        return Err(Error::InvalidArgument(format!("grid must start at 0, starts at {}", grid[0])));
    }
    if grid.iter().any(|r| !r.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `points` equally spaced nodes on `[0, r_max]`.
pub fn uniform_grid<S: Scalar>(r_max: S, points: usize) -> Result<Vec<S>> {
    if points < 3 || !(r_max > S::zero()) {
        return Err(Error::InvalidArgument(format!("cannot build a {points}-point grid up to {r_max}")));
    }
    let n = points - 1;
    Ok((0..points).map(|i| if i == n { r_max } else { r_max * S::from_count(i) / S::from_count(n) }).collect())
}

/// Zero followed by `points - 1` geometrically spaced nodes from `first` to `r_max`.
pub fn geometric_grid<S: Scalar>(first: S, r_max: S, points: usize) -> Result<Vec<S>> {
    if points < 3 || !(first > S::zero()) || !(r_max > first) {
        return Err(Error::InvalidArgument(format!(
            "cannot build a {points}-point geometric grid on [{first}, {r_max}]"
        )));
    }
    let n = points - 2;
    let ratio = (r_max / first).ln();
    let mut g = vec![S::zero()];
    g.extend((0..=n).map(|i| if i == n { r_max } else { first * (ratio * S::from_count(i) / S::from_count(n)).exp() }));
    Ok(g)
}

/// Zero-flux stationary density on `grid`, normalized to unit trapezoidal mass.
///
/// Fails with [`Error::GridTooShort`] when more than [`MAX_TAIL_MASS`] of the
/// stationary mass lies above the last grid point.
pub fn stationary_density<S: Scalar>(model: &DriftDiffusionModel<S>, grid: &[S]) -> Result<DensityOnGrid<S>> {
    model.validate()?;
    validate_grid(grid)?;
    let r_max = grid[grid.len() - 1];
    let above = stationary_ccdf(model, r_max);
    if above > S::lit(MAX_TAIL_MASS) {
        return Err(Error::GridTooShort {
            captured: (S::one() - above).as_f64(),
            suggested_r_max: suggest_r_max(model, r_max).as_f64(),
        });
    }
    let values = grid.iter().map(|&r| model.weight(r)).collect();
    DensityOnGrid::normalized(grid.to_vec(), values)
}

/// Trapezoid weights of each node; the discrete mass is `Σ w_i P_i`.
fn cell_weights<S: Scalar>(grid: &[S]) -> Vec<S> {
    let n = grid.len();
    let half = S::lit(0.5);
    (0..n)
        .map(|i| {
            let left = if i > 0 { grid[i] - grid[i - 1] } else { S::zero() };
            let right = if i + 1 < n { grid[i + 1] - grid[i] } else { S::zero() };
            (left + right) * half
        })
        .collect()
}

/// Explicit finite-volume stepper.
///
/// The flux through the interface between nodes `i` and `i+1` is
/// `J = down_i P_i - up_i P_{i+1}` with `down_i = B_i e^{-δ/2} / h`,
/// `up_i = B_{i+1} e^{δ/2} / h` and `δ = Φ_{i+1} - Φ_i`. This is consistent
/// with `J = -(A P + ∂(B P)/∂r)`, vanishes exactly on the stationary state,
/// and conserves `Σ w_i P_i` because fluxes telescope and both boundary fluxes
/// are zero.
struct Stepper<S> {
    down: Vec<S>,
    up: Vec<S>,
    weights: Vec<S>,
}

impl<S: Scalar> Stepper<S> {
    fn new(model: &DriftDiffusionModel<S>, grid: &[S]) -> Self {
        let half = S::lit(0.5);
        let (mut down, mut up) = (Vec::with_capacity(grid.len() - 1), Vec::with_capacity(grid.len() - 1));
        for w in grid.windows(2) {
            let h = w[1] - w[0];
            let delta = model.potential(w[1]) - model.potential(w[0]);
            down.push(model.diffusion(w[0]) * (-delta * half).exp() / h);
            up.push(model.diffusion(w[1]) * (delta * half).exp() / h);
        }
        Self { down, up, weights: cell_weights(grid) }
    }

    /// Largest `dt` keeping every update a non-negative combination of old values.
    fn stability_bound(&self) -> S {
        let n = self.weights.len();
        let mut worst = S::zero();
        for i in 0..n {
            let mut out = S::zero();
            if i + 1 < n {
                out = out + self.down[i];
            }
            if i > 0 {
                out = out + self.up[i - 1];
            }
            worst = worst.max(out / self.weights[i]);
        }
        S::one() / worst
    }

    fn fluxes(&self, p: &[S]) -> Vec<S> {
        (0..p.len() - 1).map(|i| self.down[i] * p[i] - self.up[i] * p[i + 1]).collect()
    }

    fn advance(&self, p: &[S], next: &mut [S], dt: S) {
        let n = p.len();
        for i in 0..n {
            let mut out = S::zero();
            let mut inflow = S::zero();
            if i + 1 < n {
                out = out + self.down[i];
                inflow = inflow + self.up[i] * p[i + 1];
            }
            if i > 0 {
                out = out + self.up[i - 1];
                inflow = inflow + self.down[i - 1] * p[i - 1];
            }
            let k = dt / self.weights[i];
            next[i] = p[i] * (S::one() - k * out) + k * inflow;
        }
    }
}

/// Largest stable time step for [`evolve`] on `grid`.
///
/// Equals `Δr² / (2 max B)` when the drift across one cell is small compared
/// with diffusion, and is tighter otherwise.
pub fn stability_bound<S: Scalar>(model: &DriftDiffusionModel<S>, grid: &[S]) -> Result<S> {
    model.validate()?;
    validate_grid(grid)?;
    Ok(Stepper::new(model, grid).stability_bound())
}

/// Discrete probability flux through each interior interface, as used by [`evolve`].
pub fn interface_fluxes<S: Scalar>(model: &DriftDiffusionModel<S>, density: &DensityOnGrid<S>) -> Vec<S> {
    Stepper::new(model, density.grid()).fluxes(density.values())
}

/// Advances `initial` by `steps` explicit time steps of size `dt`.
pub fn evolve<S: Scalar>(
    model: &DriftDiffusionModel<S>,
    initial: &DensityOnGrid<S>,
    dt: S,
    steps: usize,
) -> Result<DensityOnGrid<S>> {
    evolve_with(model, initial, dt, steps, |_, _| {})
}

/// Like [`evolve`], calling `observe(step, values)` after every step.
pub fn evolve_with<S: Scalar, F: FnMut(usize, &[S])>(
    model: &DriftDiffusionModel<S>,
    initial: &DensityOnGrid<S>,
    dt: S,
    steps: usize,
    mut observe: F,
) -> Result<DensityOnGrid<S>> {
    model.validate()?;
    let stepper = Stepper::new(model, initial.grid());
    let bound = stepper.stability_bound();
    if !(dt > S::zero()) || dt > bound {
        return Err(Error::Unstable { dt: dt.as_f64(), bound: bound.as_f64() });
    }
    let mut cur = initial.values().to_vec();
    let mut next = vec![S::zero(); cur.len()];
    for t in 1..=steps {
        stepper.advance(&cur, &mut next, dt);
        std::mem::swap(&mut cur, &mut next);
        observe(t, &cur);
    }
    Ok(DensityOnGrid { grid: initial.grid().to_vec(), values: cur })
}

/// Cumulative tail exponent `α = 1 + a1 / b2`; the density decays as `r^-(2 + a1/b2)`.
pub fn predicted_tail_exponent<S: Scalar>(model: &DriftDiffusionModel<S>) -> Result<S> {
    model.validate()?;
    if model.b2 == S::zero() {
        return Err(Error::NoPowerLawTail);
    }
    if model.a1 == S::zero() {
        log::warn!("a1 = 0 gives alpha = 1: the stationary mean income diverges");
    }
    Ok(S::one() + model.a1 / model.b2)
}
