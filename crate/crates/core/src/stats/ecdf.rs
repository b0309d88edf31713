//! Empirical step functions and exact sup-deviation against a theoretical CDF.

use serde::{Deserialize, Serialize};

use super::dist::{Cdf, PiecewiseTable};
use crate::error::{invalid, Error, Result};

/// A right-continuous nondecreasing step function with finitely many jumps.
pub trait StepCdf {
    fn value(&self, x: f64) -> f64;
    fn left_limit(&self, x: f64) -> f64;
    /// Jump locations in ascending order.
    fn jumps(&self) -> &[f64];
}

/// `F_n(x) = #{scores <= x} / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl TryFrom<Vec<f64>> for EmpiricalCdf {
    type Error = Error;

    fn try_from(scores: Vec<f64>) -> Result<Self> {
        EmpiricalCdf::new(scores)
    }
}

impl From<EmpiricalCdf> for Vec<f64> {
    fn from(e: EmpiricalCdf) -> Self {
        e.sorted
    }
}

impl EmpiricalCdf {
    pub fn new(mut scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = scores.iter().find(|v| !v.is_finite()) {
            return Err(invalid("scores", format!("non-finite score {bad}")));
        }
        scores.sort_by(f64::total_cmp);
        Ok(Self { sorted: scores })
    }

    pub fn from_slice(scores: &[f64]) -> Result<Self> {
        Self::new(scores.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of scores `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    /// Number of scores `< x`.
    pub fn count_lt(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.len() as f64
    }

    /// The same step function as a piecewise table with vertical jumps.
    pub fn to_table(&self) -> PiecewiseTable {
        let n = self.len() as f64;
        let mut points = Vec::new();
        let mut i = 0;
        while i < self.sorted.len() {
            let x = self.sorted[i];
            let j = self.count_le(x);
            points.push((x, i as f64 / n));
            points.push((x, j as f64 / n));
            i = j;
        }
        PiecewiseTable::new(points).expect("empirical steps form a valid table")
    }
}

impl StepCdf for EmpiricalCdf {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        self.count_lt(x) as f64 / self.len() as f64
    }

    fn jumps(&self) -> &[f64] {
        &self.sorted
    }
}

/// Step function placing an arbitrary nonnegative weight on each point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedStepCdf {
    points: Vec<f64>,
    cumulative: Vec<f64>,
}

impl WeightedStepCdf {
    /// Builds from `(point, weight)` pairs. Weights are used as given, so the
    /// total need not be exactly 1.
    pub fn new(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        if pairs.iter().any(|(x, w)| !x.is_finite() || !w.is_finite() || *w < 0.0) {
            return Err(invalid("weights", "points must be finite with nonnegative weights"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let (points, cumulative) = pairs
            .into_iter()
            .map(|(x, w)| {
                acc += w;
                (x, acc)
            })
            .unzip();
        Ok(Self { points, cumulative })
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn mass_before(&self, idx: usize) -> f64 {
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1].min(1.0)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mass_before(self.points.partition_point(|&v| v <= x))
    }
}

impl StepCdf for WeightedStepCdf {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        self.mass_before(self.points.partition_point(|&v| v < x))
    }

    fn jumps(&self) -> &[f64] {
        &self.points
    }
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::DegenerateRegion { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn full() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn below(hi: f64) -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Exact `sup_{x in region} |theory(x) - step(x)|`.
///
/// Between consecutive jumps of the step function the difference is monotone
/// wherever the theoretical CDF is smooth, so the supremum is attained as a
/// one-sided limit at a jump, a theoretical breakpoint, or a region edge.
pub fn sup_deviation<T, S>(theory: &T, step: &S, region: Interval) -> Result<f64>
where
    T: Cdf + ?Sized,
    S: StepCdf + ?Sized,
{
    if region.lo.is_nan() || region.hi.is_nan() || region.lo >= region.hi {
        return Err(Error::DegenerateRegion {
            lo: region.lo,
            hi: region.hi,
        });
    }
    if step.jumps().is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sup: f64 = 0.0;
    let mut visit = |x: f64| {
        if region.contains(x) {
            sup = sup
                .max((theory.value(x) - step.value(x)).abs())
                .max((theory.left_limit(x) - step.left_limit(x)).abs());
        }
    };
    for &x in step.jumps() {
        visit(x);
    }
    for x in theory.breakpoints() {
        visit(x);
    }
    if region.lo.is_finite() {
        sup = sup.max((theory.value(region.lo) - step.value(region.lo)).abs());
    }
    if region.hi.is_finite() {
        sup = sup.max((theory.left_limit(region.hi) - step.left_limit(region.hi)).abs());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::dist::TheoreticalCdf;
    use crate::stats::rng::SeededRng;
    use proptest::prelude::*;

    #[test]
    fn counting_definition() {
        let e = EmpiricalCdf::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.eval(2.0), 2.0 / 3.0);
        let single = EmpiricalCdf::new(vec![5.0]).unwrap();
        assert_eq!(single.eval(4.999), 0.0);
        assert_eq!(single.eval(5.0), 1.0);
        let ties = EmpiricalCdf::new(vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(ties.eval(1.0), 2.0 / 3.0);
        assert_eq!(ties.left_limit(1.0), 0.0);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(matches!(EmpiricalCdf::new(vec![]), Err(Error::EmptySample)));
        assert!(EmpiricalCdf::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn identity_table_has_zero_deviation() {
        let e = EmpiricalCdf::new(vec![0.3, 1.0, 1.0, 2.5, 4.0]).unwrap();
        let t = TheoreticalCdf::Table(e.to_table());
        assert_eq!(sup_deviation(&t, &e, Interval::full()).unwrap(), 0.0);
    }

    #[test]
    fn uniform_single_point() {
        let u = TheoreticalCdf::Table(PiecewiseTable::uniform(0.0, 1.0).unwrap());
        let e = EmpiricalCdf::new(vec![0.5]).unwrap();
        assert!((sup_deviation(&u, &e, Interval::full()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn region_edges_are_open() {
        let u = TheoreticalCdf::Table(PiecewiseTable::uniform(0.0, 1.0).unwrap());
        let e = EmpiricalCdf::new(vec![0.5]).unwrap();
        // On (0, 0.25) the empirical CDF is 0 and the uniform reaches 0.25 at the edge.
        let d = sup_deviation(&u, &e, Interval::new(0.0, 0.25).unwrap()).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        assert!(Interval::new(1.0, 1.0).is_err());
        let bad = Interval { lo: 2.0, hi: 1.0 };
        assert!(sup_deviation(&u, &e, bad).is_err());
    }

    fn dense_scan<T: Cdf, S: StepCdf>(t: &T, s: &S, lo: f64, hi: f64, points: usize) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..=points {
            let x = lo + (hi - lo) * i as f64 / points as f64;
            best = best.max((t.value(x) - s.value(x)).abs());
        }
        best
    }

    #[test]
    fn matches_dense_grid_scan() {
        let f = TheoreticalCdf::gaussian(7.0, 1.0).unwrap();
        let mut rng = SeededRng::new(11, 0);
        let draws: Vec<f64> = (0..50).map(|_| f.quantile(rng.open_uniform())).collect();
        let e = EmpiricalCdf::new(draws).unwrap();
        let exact = sup_deviation(&f, &e, Interval::full()).unwrap();
        let scan = dense_scan(&f, &e, 2.0, 12.0, 1_000_000);
        // The grid only approaches the one-sided limits from above; the
        // remaining gap is at most the density times the grid spacing.
        assert!(exact >= scan - 1e-12);
        assert!(exact - scan < 0.4 * 1e-5 + 1e-9, "{exact} vs {scan}");
    }

    #[test]
    fn weighted_steps() {
        let w = WeightedStepCdf::new(vec![(2.0, 0.5), (1.0, 0.25), (3.0, 0.25)]).unwrap();
        assert_eq!(w.eval(0.0), 0.0);
        assert_eq!(w.eval(1.0), 0.25);
        assert_eq!(w.left_limit(2.0), 0.25);
        assert_eq!(w.eval(2.5), 0.75);
        assert_eq!(w.eval(3.0), 1.0);
        assert!(WeightedStepCdf::new(vec![(1.0, -0.1)]).is_err());
    }

    proptest! {
        #[test]
        fn ecdf_monotone_and_bounded(
            scores in prop::collection::vec(-1e6f64..1e6, 1..60),
            probes in prop::collection::vec(-2e6f64..2e6, 2..20),
        ) {
            let e = EmpiricalCdf::new(scores).unwrap();
            let mut probes = probes;
            probes.sort_by(f64::total_cmp);
            let mut prev = 0.0;
            for x in probes {
                let v = e.eval(x);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert!(v >= prev);
                prop_assert!(e.left_limit(x) <= v);
                prev = v;
            }
        }

        #[test]
        fn sup_matches_grid_on_random_pairs(seed in 0u64..500, mean in -2.0f64..2.0, sd in 0.5f64..2.0) {
            let f = TheoreticalCdf::gaussian(mean, sd).unwrap();
            let mut rng = SeededRng::new(seed, 3);
            let draws: Vec<f64> = (0..20).map(|_| rng.uniform() * 8.0 - 4.0).collect();
            let e = EmpiricalCdf::new(draws).unwrap();
            let exact = sup_deviation(&f, &e, Interval::full()).unwrap();
            // Grid placed exactly on the jumps and just left of them.
            let mut scan: f64 = 0.0;
            for &x in e.scores() {
                let below = x - 1e-12;
                scan = scan.max((f.eval(x) - e.eval(x)).abs()).max((f.eval(below) - e.eval(below)).abs());
            }
            prop_assert!((exact - scan).abs() < 1e-9);
        }
    }
}
