use moneygas::inequality::exponential_lorenz_curve;
use moneygas::{
    detect_saturation, exponential_lorenz, gini_from_lorenz, gini_pairwise, gini_two_class, lorenz_from_samples,
    lorenz_weighted, upper_share, CountryRecord, GiniSeries, MoneySample, SaturationParams,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Pareto};

fn sample(values: &[f64]) -> MoneySample<f64> {
    MoneySample::new(values.to_vec(), "money").unwrap()
}

fn gini_of(values: &[f64]) -> f64 {
    gini_from_lorenz(&lorenz_from_samples(&sample(values)).unwrap())
}

fn records(rows: &[(f64, f64)]) -> Vec<CountryRecord<f64>> {
    rows.iter().enumerate().map(|(i, &(p, q))| CountryRecord::new(format!("C{i:03}"), p, q).unwrap()).collect()
}

fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

#[test]
fn exponential_draws_follow_exponential_lorenz() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let exp = Exp::new(1.0).unwrap();
    let draws: Vec<f64> = (0..100_000).map(|_| exp.sample(&mut rng)).collect();
    let l = lorenz_from_samples(&sample(&draws)).unwrap();
    let worst = l.points().iter().map(|&(x, y)| (y - exponential_lorenz(x)).abs()).fold(0.0, f64::max);
    assert!(worst < 0.01, "max deviation {worst}");
}

// y(x) is the income share of the poorest x: ∫₀^{r(x)} r e^{-r} dr with r(x) = -ln(1 - x).
#[test]
fn exponential_lorenz_matches_quadrature() {
    for x in [0.1, 0.5, 0.9, 0.999] {
        let r = -(1.0f64 - x).ln();
        let oracle = simpson(0.0, r, 10_000, |s| s * (-s).exp());
        assert!((exponential_lorenz(x) - oracle).abs() < 1e-12, "x={x}");
    }
    assert_eq!(exponential_lorenz(0.0), 0.0);
    assert_eq!(exponential_lorenz(1.0), 1.0);
    assert!((exponential_lorenz(0.5f64) - 0.153_43).abs() < 1e-5);
}

#[test]
fn exponential_gini_is_one_half() {
    let g = gini_from_lorenz(&exponential_lorenz_curve::<f64>(10_000).unwrap());
    assert!((g - 0.5).abs() < 1e-4, "G = {g}");
    assert_eq!(gini_two_class(0.0).unwrap(), 0.5);
}

#[test]
fn two_class_formula_examples() {
    assert!((gini_two_class(0.2f64).unwrap() - 0.6).abs() < 1e-15);
    assert_eq!(gini_two_class(1.0).unwrap(), 1.0);
    assert!(gini_two_class(1.5).is_err());
    assert!(gini_two_class(-0.1).is_err());
}

#[test]
fn pairwise_examples() {
    assert_eq!(gini_pairwise(&[0.0, 1.0], &[1.0, 1.0]).unwrap(), 0.5);
    assert_eq!(gini_pairwise(&[2.0; 5], &[1.0; 5]).unwrap(), 0.0);
    assert!((gini_pairwise(&[1.0f64, 3.0], &[1.0, 1.0]).unwrap() - 0.25).abs() < 1e-15);
    assert!(gini_pairwise(&[0.0, 0.0], &[1.0, 1.0]).is_err());
}

#[test]
fn weighted_curve_is_order_independent() {
    let rows = [(5.0, 10.0), (1.0, 7.0), (3.0, 1.0), (2.0, 2.0)];
    let a = lorenz_weighted(&records(&rows)).unwrap();
    let mut rev = records(&rows);
    rev.reverse();
    assert_eq!(a, lorenz_weighted(&rev).unwrap());
    assert!(lorenz_weighted(&records(&rows[..1])).is_err());
}

// Exp(1) bulk plus a Pareto(α = 3) class holding 20% of income, at shrinking class sizes.
#[test]
fn two_class_gini_gap_shrinks_with_upper_population() {
    let mut gaps = Vec::new();
    for p in [0.04, 0.01, 0.001] {
        let mean_tail = 0.2 * (1.0 - p) / (0.8 * p);
        let pareto = Pareto::new(mean_tail * 2.0 / 3.0, 3.0).unwrap();
        let exp = Exp::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2010);
        let draws: Vec<f64> =
            (0..1_000_000).map(|_| if rng.random::<f64>() < p { pareto.sample(&mut rng) } else { exp.sample(&mut rng) }).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let predicted = gini_two_class(upper_share(mean, 1.0).unwrap()).unwrap();
        gaps.push((gini_of(&draws) - predicted).abs());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "gaps {gaps:?}");
    assert!(gaps[2] < 0.02, "gaps {gaps:?}");
}

#[test]
fn saturation_after_linear_decline() {
    let mut points: Vec<(i32, f64)> = (1980..1995).map(|y| (y, 0.80 - 0.02 * (y - 1980) as f64)).collect();
    let wiggle = [0.004, -0.008, 0.01, -0.002, 0.0, 0.006, -0.01];
    points.extend((1995..2002).zip(wiggle).map(|(y, w)| (y, 0.5 + w)));
    let series = GiniSeries::new(points, "synthetic").unwrap();
    let report = detect_saturation(&series, SaturationParams::default());
    assert_eq!(report.onset, Some(1995));
    assert_eq!(report.plateau_points, 7);
    assert!((report.pre_trend_slope.unwrap() + 0.02).abs() < 1e-9);
}

#[test]
fn decreasing_series_has_no_plateau() {
    let points = (1980..2011).map(|y| (y, 0.75 - 0.01 * (y - 1980) as f64)).collect();
    let report = detect_saturation(&GiniSeries::new(points, "synthetic").unwrap(), SaturationParams::default());
    assert_eq!(report.onset, None);
    assert_eq!(report.plateau_points, 0);
}

#[test]
fn constant_series_at_level_saturates_at_first_year() {
    let points = (2000..2008).map(|y| (y, 0.5)).collect();
    let report = detect_saturation(&GiniSeries::new(points, "flat").unwrap(), SaturationParams::default());
    assert_eq!(report.onset, Some(2000));
    assert_eq!(report.pre_trend_slope, None);
}

#[test]
fn short_plateau_is_not_saturation() {
    let mut points: Vec<(i32, f64)> = (1980..1990).map(|y| (y, 0.7 - 0.02 * (y - 1980) as f64)).collect();
    points.extend((1990..1994).map(|y| (y, 0.5)));
    let series = GiniSeries::new(points, "short").unwrap();
    assert_eq!(detect_saturation(&series, SaturationParams::default()).onset, None);
    let lenient = SaturationParams { min_run: 4, ..SaturationParams::default() };
    assert_eq!(detect_saturation(&series, lenient).onset, Some(1990));
}

#[test]
fn series_validation() {
    assert!(GiniSeries::new(vec![(2001, 0.5), (2000, 0.5)], "x").is_err());
    assert!(GiniSeries::new(vec![(2000, 1.5)], "x").is_err());
}

fn positive_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..100.0, 1..=200).prop_filter("positive total", |v| v.iter().sum::<f64>() > 0.0)
}

proptest! {
    #[test]
    fn lorenz_area_gini_equals_pairwise_gini(v in positive_values()) {
        let g = gini_of(&v);
        let oracle = gini_pairwise(&v, &vec![1.0; v.len()]).unwrap();
        prop_assert!((g - oracle).abs() < 1e-12, "{} vs {}", g, oracle);
    }

    #[test]
    fn weighted_lorenz_gini_equals_weighted_pairwise(rows in prop::collection::vec((0.1f64..1e3, 0.0f64..1e4), 2..=150)) {
        prop_assume!(rows.iter().map(|r| r.1).sum::<f64>() > 0.0);
        let recs = records(&rows);
        let g = gini_from_lorenz(&lorenz_weighted(&recs).unwrap());
        let per_capita: Vec<f64> = recs.iter().map(|r| r.per_capita).collect();
        let pop: Vec<f64> = recs.iter().map(|r| r.population).collect();
        let oracle = gini_pairwise(&per_capita, &pop).unwrap();
        prop_assert!((g - oracle).abs() < 1e-12, "{} vs {}", g, oracle);
    }

    #[test]
    fn gini_is_scale_invariant(v in positive_values(), lambda in 1e-3f64..1e3) {
        let scaled: Vec<f64> = v.iter().map(|x| x * lambda).collect();
        prop_assert!((gini_of(&v) - gini_of(&scaled)).abs() < 1e-12);
    }

    #[test]
    fn weighted_gini_is_scale_invariant(rows in prop::collection::vec((0.1f64..1e3, 0.1f64..1e4), 2..=60), lambda in 1e-3f64..1e3) {
        let a = gini_from_lorenz(&lorenz_weighted(&records(&rows)).unwrap());
        let scaled: Vec<(f64, f64)> = rows.iter().map(|&(p, q)| (p, q * lambda)).collect();
        let b = gini_from_lorenz(&lorenz_weighted(&records(&scaled)).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn country_order_does_not_matter(rows in prop::collection::vec((0.1f64..1e3, 0.0f64..1e4), 2..=60), seed in any::<u64>()) {
        prop_assume!(rows.iter().map(|r| r.1).sum::<f64>() > 0.0);
        let recs = records(&rows);
        let mut shuffled = recs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(lorenz_weighted(&recs).unwrap(), lorenz_weighted(&shuffled).unwrap());
    }

    #[test]
    fn sample_order_does_not_matter(v in positive_values(), seed in any::<u64>()) {
        let mut shuffled = v.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(
            lorenz_from_samples(&sample(&v)).unwrap(),
            lorenz_from_samples(&sample(&shuffled)).unwrap()
        );
    }

    // Moving money from a poorer to a richer agent never raises the curve.
    #[test]
    fn mean_preserving_spread_lowers_lorenz_curve(
        v in prop::collection::vec(0.0f64..100.0, 2..=100),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        frac in 0.0f64..=1.0,
    ) {
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        let (a, b) = (i.index(sorted.len()), j.index(sorted.len()));
        prop_assume!(a != b && sorted.iter().sum::<f64>() > 0.0);
        let (poor, rich) = (a.min(b), a.max(b));
        let mut spread = sorted.clone();
        let delta = frac * spread[poor];
        spread[poor] -= delta;
        spread[rich] += delta;
        let before = lorenz_from_samples(&sample(&sorted)).unwrap();
        let after = lorenz_from_samples(&sample(&spread)).unwrap();
        for (p, q) in before.points().iter().zip(after.points()) {
            prop_assert!(q.1 <= p.1 + 1e-12, "x={}: {} above {}", p.0, q.1, p.1);
        }
        prop_assert!(gini_of(&spread) >= gini_of(&sorted) - 1e-12);
    }
}
