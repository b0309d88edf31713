//! Theoretical distribution functions: Gaussian, piecewise-linear tables, and
//! their restrictions to an interval.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A cumulative distribution function that can be evaluated pointwise.
pub trait Cdf {
    fn value(&self, x: f64) -> f64;

    /// `lim_{y -> x-} F(y)`. Continuous families keep the default.
    fn left_limit(&self, x: f64) -> f64 {
        self.value(x)
    }

    /// Points where the function is not smooth (table knots). Used by
    /// `sup_deviation` so the supremum is exact for piecewise tables.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Standard normal CDF, accurate to ~1e-16 absolute through `libm::erfc`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `Φ((x - mean) / stddev)`.
pub fn gaussian_cdf(x: f64, mean: f64, stddev: f64) -> Result<f64> {
    if !(stddev > 0.0 && stddev.is_finite()) {
        return Err(invalid("stddev", format!("must be positive, got {stddev}")));
    }
    Ok(std_normal_cdf((x - mean) / stddev))
}

/// Inverse standard normal CDF (Wichura's AS241, PPND16). Relative accuracy
/// about 1e-16 over (0, 1); returns ±inf at the endpoints.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p.is_nan() {
        return f64::NAN;
    }
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5;
        let den = ((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return q * num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_445_9e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianFields")]
pub struct Gaussian {
    mean: f64,
    stddev: f64,
}

#[derive(Deserialize)]
struct GaussianFields {
    mean: f64,
    stddev: f64,
}

impl TryFrom<GaussianFields> for Gaussian {
    type Error = Error;

    fn try_from(f: GaussianFields) -> Result<Self> {
        Gaussian::new(f.mean, f.stddev)
    }
}

impl Gaussian {
    pub fn new(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(invalid("mean", format!("must be finite, got {mean}")));
        }
        if !(stddev > 0.0 && stddev.is_finite()) {
            return Err(invalid("stddev", format!("must be positive, got {stddev}")));
        }
        Ok(Self { mean, stddev })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    pub fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mean) / self.stddev)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf((x - self.mean) / self.stddev) / self.stddev
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.mean + self.stddev * std_normal_quantile(p)
    }
}

/// Piecewise-linear CDF through `(x, p)` knots. Repeated `x` values encode a
/// jump; the function is right-continuous there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseTable {
    xs: Vec<f64>,
    ps: Vec<f64>,
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseTable {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        PiecewiseTable::new(points)
    }
}

impl From<PiecewiseTable> for Vec<(f64, f64)> {
    fn from(t: PiecewiseTable) -> Self {
        t.xs.into_iter().zip(t.ps).collect()
    }
}

impl PiecewiseTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("table", "needs at least two knots"));
        }
        let (xs, ps): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if xs.iter().chain(&ps).any(|v| !v.is_finite()) {
            return Err(invalid("table", "knots must be finite"));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("table", "x values must be sorted ascending"));
        }
        if ps.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("table", "probabilities must be nondecreasing"));
        }
        if ps[0] != 0.0 || ps[ps.len() - 1] != 1.0 {
            return Err(invalid("table", "probabilities must start at 0 and end at 1"));
        }
        Ok(Self { xs, ps })
    }

    /// Uniform distribution on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::DegenerateRegion { lo, hi });
        }
        Self::new(vec![(lo, 0.0), (hi, 1.0)])
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ps.iter().copied())
    }

    fn interpolate(&self, i: usize, j: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[j]);
        let (p0, p1) = (self.ps[i], self.ps[j]);
        p0 + (p1 - p0) * (x - x0) / (x1 - x0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if x < self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[last] {
            return 1.0;
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        self.interpolate(i, i + 1, x)
    }

    pub fn left_limit(&self, x: f64) -> f64 {
        let j = self.xs.partition_point(|&v| v < x);
        if j == 0 {
            return 0.0;
        }
        if j == self.xs.len() {
            return 1.0;
        }
        self.interpolate(j - 1, j, x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.xs[0];
        }
        let i = self.ps.partition_point(|&q| q < p);
        if i == 0 {
            return self.xs[0];
        }
        if i == self.ps.len() {
            return self.xs[self.xs.len() - 1];
        }
        let (p0, p1) = (self.ps[i - 1], self.ps[i]);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        x0 + (p - p0) / (p1 - p0) * (x1 - x0)
    }

    pub fn density(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v <= x);
        if i == 0 || i == self.xs.len() {
            return 0.0;
        }
        (self.ps[i] - self.ps[i - 1]) / (self.xs[i] - self.xs[i - 1])
    }
}

/// Ground-truth distribution of a score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoreticalCdf {
    Gaussian(Gaussian),
    Table(PiecewiseTable),
}

impl TheoreticalCdf {
    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        Ok(Self::Gaussian(Gaussian::new(mean, stddev)?))
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self::Table(PiecewiseTable::new(points)?))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian(g) => g.cdf(x),
            Self::Table(t) => t.eval(x),
        }
    }

    /// Smallest `x` with `F(x) >= p`; ±inf at the endpoints for unbounded
    /// support.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            Self::Gaussian(g) => g.quantile(p),
            Self::Table(t) => t.quantile(p),
        }
    }

    /// Density where it exists (0 at table jumps).
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian(g) => g.pdf(x),
            Self::Table(t) => t.density(x),
        }
    }
}

impl Cdf for TheoreticalCdf {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian(g) => g.cdf(x),
            Self::Table(t) => t.left_limit(x),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Gaussian(_) => Vec::new(),
            Self::Table(t) => t.xs.clone(),
        }
    }
}

/// `base` conditioned on `lo <= X <= hi`: `(base(x) - base(lo)) / (base(hi) - base(lo))`
/// inside the interval, 0 below and 1 above.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedCdf {
    base: TheoreticalCdf,
    lo: f64,
    hi: f64,
    lo_p: f64,
    hi_p: f64,
}

impl RestrictedCdf {
    pub fn new(base: TheoreticalCdf, lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::DegenerateRegion { lo, hi });
        }
        let lo_p = base.eval(lo);
        let hi_p = base.eval(hi);
        if hi_p <= lo_p {
            return Err(invalid(
                "region",
                format!("carries no probability mass under the base distribution ({lo}, {hi})"),
            ));
        }
        Ok(Self {
            base,
            lo,
            hi,
            lo_p,
            hi_p,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Probability mass of the region under the base distribution.
    pub fn mass(&self) -> f64 {
        self.hi_p - self.lo_p
    }

    pub fn base(&self) -> &TheoreticalCdf {
        &self.base
    }

    fn rescale(&self, p: f64) -> f64 {
        ((p - self.lo_p) / (self.hi_p - self.lo_p)).clamp(0.0, 1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo {
            0.0
        } else if x >= self.hi {
            1.0
        } else {
            self.rescale(self.base.eval(x))
        }
    }

    /// Inverse-CDF map used for conditional sampling.
    pub fn quantile(&self, u: f64) -> f64 {
        let x = self.base.quantile(self.lo_p + u * (self.hi_p - self.lo_p));
        x.clamp(self.lo, self.hi)
    }
}

impl Cdf for RestrictedCdf {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        if x <= self.lo {
            0.0
        } else if x > self.hi {
            1.0
        } else {
            self.rescale(self.base.left_limit(x))
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.base.breakpoints();
        pts.retain(|&x| x > self.lo && x < self.hi);
        pts.extend([self.lo, self.hi].into_iter().filter(|x| x.is_finite()));
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Reference values from mpmath at 40 digits.
    const PHI: [(f64, f64); 7] = [
        (1.0, 0.841_344_746_068_542_948_59),
        (-5.0, 2.866_515_718_791_939_116_7e-7),
        (-0.5, 0.308_537_538_725_986_896_36),
        (2.5, 0.993_790_334_674_223_864_83),
        (-10.0, 7.619_853_024_160_526_066e-24),
        (0.3, 0.617_911_422_188_952_633_07),
        (-1.0, 0.158_655_253_931_457_051_41),
    ];

    #[test]
    fn normal_cdf_matches_reference() {
        for (z, want) in PHI {
            let got = std_normal_cdf(z);
            assert!((got - want).abs() < 1e-15, "z={z}: {got} vs {want}");
        }
        assert_eq!(gaussian_cdf(7.0, 7.0, 1.0).unwrap(), 0.5);
        assert!((gaussian_cdf(8.0, 7.0, 1.0).unwrap() - 0.841_344_746_068_543).abs() < 1e-12);
        assert_eq!(gaussian_cdf(f64::NEG_INFINITY, 7.0, 1.0).unwrap(), 0.0);
        assert_eq!(gaussian_cdf(f64::INFINITY, 7.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_rejects_bad_stddev() {
        assert!(gaussian_cdf(0.0, 0.0, 0.0).is_err());
        assert!(gaussian_cdf(0.0, 0.0, -1.0).is_err());
        assert!(Gaussian::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn normal_quantile_matches_reference() {
        // References evaluated at the exact binary value of each p.
        let cases = [
            (0.975, 1.959_963_984_540_054_235_5),
            (1e-10, -6.361_340_902_404_056_204_7),
            (0.3, -0.524_400_512_708_040_784_04),
            (0.999_999, 4.753_424_308_817_087_765_7),
            (0.5, 0.0),
        ];
        for (p, want) in cases {
            let got = std_normal_quantile(p);
            assert!((got - want).abs() < 1e-13 * want.abs().max(1.0), "p={p}: {got}");
        }
        assert_eq!(std_normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(std_normal_quantile(1.0), f64::INFINITY);
    }

    #[test]
    fn table_eval_and_quantile() {
        let t = PiecewiseTable::uniform(0.0, 1.0).unwrap();
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(0.25), 0.25);
        assert_eq!(t.eval(1.0), 1.0);
        assert_eq!(t.quantile(0.75), 0.75);
        assert_eq!(t.density(0.5), 1.0);
        assert_eq!(t.density(2.0), 0.0);
    }

    #[test]
    fn table_jump_is_right_continuous() {
        let t = PiecewiseTable::new(vec![(0.0, 0.0), (1.0, 0.2), (1.0, 0.6), (2.0, 1.0)]).unwrap();
        assert!((t.eval(1.0) - 0.6).abs() < 1e-15);
        assert!((t.left_limit(1.0) - 0.2).abs() < 1e-15);
        assert!((t.eval(0.5) - 0.1).abs() < 1e-15);
        assert_eq!(t.quantile(0.4), 1.0);
    }

    #[test]
    fn table_validation() {
        assert!(PiecewiseTable::new(vec![(0.0, 0.0)]).is_err());
        assert!(PiecewiseTable::new(vec![(1.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(PiecewiseTable::new(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(PiecewiseTable::new(vec![(0.0, 0.0), (1.0, 0.9)]).is_err());
        let bad: std::result::Result<TheoreticalCdf, _> =
            serde_json::from_str(r#"{"table": [[0, 0.5], [1, 1]]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn serde_shape() {
        let g: TheoreticalCdf =
            serde_json::from_str(r#"{"gaussian": {"mean": 7, "stddev": 3}}"#).unwrap();
        assert_eq!(g, TheoreticalCdf::gaussian(7.0, 3.0).unwrap());
        let bad: std::result::Result<TheoreticalCdf, _> =
            serde_json::from_str(r#"{"gaussian": {"mean": 7, "stddev": 0}}"#);
        assert!(bad.is_err());
        let json = serde_json::to_string(&TheoreticalCdf::table(vec![(0.0, 0.0), (2.0, 1.0)]).unwrap())
            .unwrap();
        assert_eq!(json, r#"{"table":[[0.0,0.0],[2.0,1.0]]}"#);
    }

    #[test]
    fn restricted_censored_identity() {
        let f = TheoreticalCdf::gaussian(7.0, 1.0).unwrap();
        let theta = 7.4;
        let alpha = f.eval(theta);
        let g = RestrictedCdf::new(f.clone(), f64::NEG_INFINITY, theta).unwrap();
        assert!((g.eval(theta) - 1.0).abs() < 1e-12);
        for x in [3.0, 5.5, 6.9, 7.2, 7.39] {
            assert!((g.eval(x) - f.eval(x) / alpha).abs() < 1e-12);
        }
        assert_eq!(g.eval(9.0), 1.0);
        let k = RestrictedCdf::new(f.clone(), theta, f64::INFINITY).unwrap();
        for x in [7.5, 8.0, 10.0] {
            assert!((k.eval(x) - (f.eval(x) - alpha) / (1.0 - alpha)).abs() < 1e-12);
        }
        assert_eq!(k.eval(7.0), 0.0);
    }

    #[test]
    fn restricted_rejects_empty_regions() {
        let f = TheoreticalCdf::gaussian(0.0, 1.0).unwrap();
        assert!(RestrictedCdf::new(f.clone(), 1.0, 1.0).is_err());
        let t = TheoreticalCdf::Table(PiecewiseTable::uniform(0.0, 1.0).unwrap());
        assert!(RestrictedCdf::new(t, 2.0, 3.0).is_err());
    }

    proptest! {
        #[test]
        fn quantile_inverts_cdf(p in 1e-12f64..(1.0 - 1e-12)) {
            let z = std_normal_quantile(p);
            let back = std_normal_cdf(z);
            prop_assert!((back - p).abs() <= 1e-14 * p.min(1.0 - p).max(1e-3));
        }

        #[test]
        fn restricted_quantile_stays_inside(u in 0.0f64..1.0, lo in -3.0f64..0.0, width in 0.1f64..4.0) {
            let f = TheoreticalCdf::gaussian(0.0, 1.0).unwrap();
            let r = RestrictedCdf::new(f, lo, lo + width).unwrap();
            let x = r.quantile(u);
            prop_assert!(x >= lo && x <= lo + width);
            prop_assert!((r.eval(x) - u).abs() < 1e-9);
        }
    }
}
