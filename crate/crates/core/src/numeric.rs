//! Small numerical kernels: least squares, trapezoid rule, Gauss-Legendre panels, bisection.

use crate::scalar::Scalar;

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<S> {
    pub slope: S,
    pub intercept: S,
    /// Root-mean-square residual.
    pub rms: S,
    pub points: usize,
}

impl<S: Scalar> LineFit<S> {
    pub fn eval(&self, x: S) -> S {
        self.intercept + self.slope * x
    }
}

/// Fits a line through `(x, y)` pairs. Returns `None` for fewer than two points or zero x-spread.
pub fn least_squares<S: Scalar>(pts: &[(S, S)]) -> Option<LineFit<S>> {
    if pts.len() < 2 {
        return None;
    }
    let n = S::from_count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<S>() / n;
    let my = pts.iter().map(|p| p.1).sum::<S>() / n;
    let (mut sxx, mut sxy) = (S::zero(), S::zero());
    for &(x, y) in pts {
        let dx = x - mx;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (y - my);
    }
    if sxx <= S::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<S>();
    Some(LineFit { slope, intercept, rms: (ss / n).sqrt(), points: pts.len() })
}

/// Trapezoid rule over tabulated `(x, y)` pairs with non-decreasing x.
pub fn trapezoid<S: Scalar>(xs: &[S], ys: &[S]) -> S {
    debug_assert_eq!(xs.len(), ys.len());
    let half = S::lit(0.5);
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * half)
        .sum()
}

// 8-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// One 8-point Gauss-Legendre panel over `[a, b]`.
pub fn gauss_legendre<S: Scalar, F: FnMut(S) -> S>(a: S, b: S, mut f: F) -> S {
    let mid = (a + b) * S::lit(0.5);
    let half = (b - a) * S::lit(0.5);
    let mut acc = S::zero();
    for (&x, &w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let dx = half * S::lit(x);
        acc = acc + S::lit(w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must have opposite signs.
pub fn bisect<S: Scalar, F: Fn(S) -> S>(f: F, mut lo: S, mut hi: S, tol: S) -> Option<S> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Some(lo);
    }
    if fhi == S::zero() {
        return Some(hi);
    }
    if (flo > S::zero()) == (fhi > S::zero()) {
        return None;
    }
    for _ in 0..400 {
        let mid = (lo + hi) * S::lit(0.5);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == S::zero() {
            return Some(mid);
        }
        if (fm > S::zero()) == (flo > S::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * S::lit(0.5))
}
