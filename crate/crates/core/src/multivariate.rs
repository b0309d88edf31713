//! Two-dimensional scores with a linear decision boundary.
//!
//! Every point is reduced to its projection `w . x`; the boundary `w . x = b`
//! then acts exactly like a one-dimensional threshold at `b`. The adjusted CDF
//! `P(w . X <= b')` is the CDF of that projection. Bounds carry the leading
//! constant 4 instead of 2.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::censored::{
    combine, three_region_terms, two_region_terms, EtaSolution, MassSpec, RegionCounts,
    RegionPartition, RegionSpec,
};
use crate::classic::BoundValue;
use crate::error::{invalid, Error, Result};
use crate::stats::{std_normal_cdf, EmpiricalCdf, Label, SeededRng, TheoreticalCdf};

pub const LEAD_2D: f64 = 4.0;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoundaryFields")]
pub struct Boundary2D {
    pub w: [f64; 2],
    pub b: f64,
    /// Intercept of the exploration edge, below `b`.
    pub lb_intercept: Option<f64>,
}

#[derive(Deserialize)]
struct BoundaryFields {
    w: [f64; 2],
    b: f64,
    #[serde(default)]
    lb_intercept: Option<f64>,
}

impl TryFrom<BoundaryFields> for Boundary2D {
    type Error = Error;

    fn try_from(f: BoundaryFields) -> Result<Self> {
        Self::new(f.w, f.b, f.lb_intercept)
    }
}

impl Boundary2D {
    pub fn new(w: [f64; 2], b: f64, lb_intercept: Option<f64>) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) || w == [0.0, 0.0] {
            return Err(invalid("w", "must be finite and nonzero"));
        }
        if !b.is_finite() {
            return Err(invalid("b", "must be finite"));
        }
        if let Some(lb) = lb_intercept {
            if !(lb < b) {
                return Err(invalid("lb_intercept", format!("must be below b = {b}")));
            }
        }
        Ok(Self { w, b, lb_intercept })
    }

    pub fn project(&self, p: &Point) -> f64 {
        self.w[0] * p[0] + self.w[1] * p[1]
    }

    pub fn project_all(&self, points: &[Point]) -> Vec<f64> {
        points.iter().map(|p| self.project(p)).collect()
    }

    /// The equivalent one-dimensional region geometry on projected scores.
    pub fn region_spec(&self, epsilon: f64) -> Result<RegionSpec> {
        RegionSpec::new(self.b, self.lb_intercept, epsilon)
    }
}

/// Counts by the sign of `w . x - b` (and `w . x - b_lb`); points on a line
/// count as above it. No new samples are included.
pub fn partition_2d(points: &[Point], boundary: &Boundary2D) -> Result<RegionPartition> {
    let spec = boundary.region_spec(0.0)?;
    crate::censored::partition(&boundary.project_all(points), 0, 0, &spec)
}

/// Fraction of points with `w . x <= b_prime`.
pub fn adjusted_cdf_empirical(points: &[Point], w: [f64; 2], b_prime: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let below = points.iter().filter(|p| w[0] * p[0] + w[1] * p[1] <= b_prime).count();
    Ok(below as f64 / points.len() as f64)
}

/// Theoretical adjusted CDF: the distribution of `w . X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjustedCdf {
    pub w: [f64; 2],
    pub projection: TheoreticalCdf,
}

impl AdjustedCdf {
    pub fn eval(&self, b_prime: f64) -> f64 {
        self.projection.eval(b_prime)
    }
}

/// Bivariate normal population.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianFields")]
pub struct Gaussian2D {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

#[derive(Deserialize)]
struct GaussianFields {
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
}

impl TryFrom<GaussianFields> for Gaussian2D {
    type Error = Error;

    fn try_from(f: GaussianFields) -> Result<Self> {
        Self::new(f.mean, f.cov)
    }
}

impl Gaussian2D {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        if mean.iter().chain(cov.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(invalid("gaussian", "parameters must be finite"));
        }
        if cov[0][1] != cov[1][0] {
            return Err(invalid("cov", "must be symmetric"));
        }
        if !(cov[0][0] > 0.0 && cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0] > 0.0) {
            return Err(invalid("cov", "must be positive definite"));
        }
        Ok(Self { mean, cov })
    }

    pub fn stddevs(&self) -> [f64; 2] {
        [self.cov[0][0].sqrt(), self.cov[1][1].sqrt()]
    }

    pub fn correlation(&self) -> f64 {
        let [s1, s2] = self.stddevs();
        self.cov[0][1] / (s1 * s2)
    }

    /// `P(X1 <= x1, X2 <= x2)`.
    pub fn cdf(&self, x: &Point) -> f64 {
        let [s1, s2] = self.stddevs();
        bivariate_normal_cdf((x[0] - self.mean[0]) / s1, (x[1] - self.mean[1]) / s2, self.correlation())
    }

    pub fn adjusted(&self, w: [f64; 2]) -> Result<AdjustedCdf> {
        let mean = w[0] * self.mean[0] + w[1] * self.mean[1];
        let var = w[0] * w[0] * self.cov[0][0] + 2.0 * w[0] * w[1] * self.cov[0][1] + w[1] * w[1] * self.cov[1][1];
        Ok(AdjustedCdf {
            w,
            projection: TheoreticalCdf::gaussian(mean, var.sqrt())?,
        })
    }

    pub fn draw(&self, rng: &mut SeededRng) -> Point {
        let z1 = crate::stats::std_normal_quantile(rng.open_uniform());
        let z2 = crate::stats::std_normal_quantile(rng.open_uniform());
        let l11 = self.cov[0][0].sqrt();
        let l21 = self.cov[1][0] / l11;
        let l22 = (self.cov[1][1] - l21 * l21).sqrt();
        [self.mean[0] + l11 * z1, self.mean[1] + l21 * z1 + l22 * z2]
    }

    pub fn sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        (0..count).map(|_| self.draw(rng)).collect()
    }
}

const GL6: ([f64; 3], [f64; 3]) = (
    [0.932_469_514_203_152_2, 0.661_209_386_466_264_7, 0.238_619_186_083_197],
    [0.171_324_492_379_170_5, 0.360_761_573_048_138_4, 0.467_913_934_572_690_4],
);
const GL12: ([f64; 6], [f64; 6]) = (
    [
        0.981_560_634_246_719_1,
        0.904_117_256_370_475,
        0.769_902_674_194_305,
        0.587_317_954_286_617_1,
        0.367_831_498_998_180_2,
        0.125_233_408_511_469_2,
    ],
    [
        0.047_175_336_386_511_77,
        0.106_939_325_995_318_3,
        0.160_078_328_543_346_4,
        0.203_167_426_723_065_9,
        0.233_492_536_538_354_7,
        0.249_147_045_813_402_9,
    ],
);
const GL20: ([f64; 10], [f64; 10]) = (
    [
        0.993_128_599_185_094_9,
        0.963_971_927_277_913_8,
        0.912_234_428_251_325_9,
        0.839_116_971_822_218_8,
        0.746_331_906_460_150_8,
        0.636_053_680_726_515,
        0.510_867_001_950_827_1,
        0.373_706_088_715_419_6,
        0.227_785_851_141_645_1,
        0.076_526_521_133_497_33,
    ],
    [
        0.017_614_007_139_152_12,
        0.040_601_429_800_386_94,
        0.062_672_048_334_109_06,
        0.083_276_741_576_704_75,
        0.101_930_119_817_240_4,
        0.118_194_531_961_518_4,
        0.131_688_638_449_176_6,
        0.142_096_109_318_382_1,
        0.149_172_986_472_603_7,
        0.152_753_387_130_725_9,
    ],
);

/// Upper orthant probability `P(Z1 > h, Z2 > k)` for standard normals with
/// correlation `r` (Drezner-Wesolowsky with Genz's refinements).
fn bvn_upper(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::INFINITY || k == f64::INFINITY {
        return 0.0;
    }
    if h == f64::NEG_INFINITY {
        return if k == f64::NEG_INFINITY { 1.0 } else { std_normal_cdf(-k) };
    }
    if k == f64::NEG_INFINITY {
        return std_normal_cdf(-h);
    }
    if r == 0.0 {
        return std_normal_cdf(-h) * std_normal_cdf(-k);
    }
    let (xs, ws): (&[f64], &[f64]) = if r.abs() < 0.3 {
        (&GL6.0, &GL6.1)
    } else if r.abs() < 0.75 {
        (&GL12.0, &GL12.1)
    } else {
        (&GL20.0, &GL20.1)
    };
    // Nodes mapped to (0, 2): 1 - x and 1 + x.
    let nodes = || {
        xs.iter()
            .zip(ws)
            .flat_map(|(&x, &w)| [(1.0 - x, w), (1.0 + x, w)])
    };
    let tp = 2.0 * PI;
    let mut k = k;
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = (h * h + k * k) / 2.0;
        let asr = r.asin() / 2.0;
        for (x, w) in nodes() {
            let sn = (asr * x).sin();
            bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
        }
        return (bvn * asr / tp + std_normal_cdf(-h) * std_normal_cdf(-k)).clamp(0.0, 1.0);
    }
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if r.abs() < 1.0 {
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 80.0;
        let asr = -(bs / a_s + hk) / 2.0;
        if asr > -100.0 {
            bvn = a * asr.exp() * (1.0 - c * (bs - a_s) * (1.0 - d * bs) / 3.0 + c * d * a_s * a_s);
        }
        if hk > -100.0 {
            let b = bs.sqrt();
            let sp = tp.sqrt() * std_normal_cdf(-b / a);
            bvn -= (-hk / 2.0).exp() * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
        }
        a /= 2.0;
        let mut acc = 0.0;
        for (x, w) in nodes() {
            let xs = (a * x) * (a * x);
            let asr = -(bs / xs + hk) / 2.0;
            if asr > -100.0 {
                let sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                let rs = (1.0 - xs).sqrt();
                let ep = (-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))).exp() / rs;
                acc += w * asr.exp() * (sp - ep);
            }
        }
        bvn = (a * acc - bvn) / tp;
    }
    let p = if r > 0.0 {
        bvn + std_normal_cdf(-h.max(k))
    } else if h >= k {
        -bvn
    } else {
        let l = if h < 0.0 {
            std_normal_cdf(k) - std_normal_cdf(h)
        } else {
            std_normal_cdf(-h) - std_normal_cdf(-k)
        };
        l - bvn
    };
    p.clamp(0.0, 1.0)
}

/// `P(Z1 <= h, Z2 <= k)` for standard normals with correlation `r`.
pub fn bivariate_normal_cdf(h: f64, k: f64, r: f64) -> f64 {
    bvn_upper(-h, -k, r)
}

/// `sup |F(s, t) - F_n(s, t)|` over rectangles `(-inf, s] x (-inf, t]`,
/// checked at every pair of sample coordinates with both one-sided limits.
pub fn rectangular_sup_deviation(theory: &Gaussian2D, points: &[Point]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = points.len();
    let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    // counts[i][j] = #{p : p.x <= xs[i-1], p.y <= ys[j-1]} with index 0 meaning "none".
    let (nx, ny) = (xs.len(), ys.len());
    let mut counts = vec![0u32; (nx + 1) * (ny + 1)];
    let at = |i: usize, j: usize| i * (ny + 1) + j;
    for p in points {
        let i = xs.partition_point(|&v| v < p[0]) + 1;
        let j = ys.partition_point(|&v| v < p[1]) + 1;
        counts[at(i, j)] += 1;
    }
    for i in 1..=nx {
        for j in 1..=ny {
            counts[at(i, j)] += counts[at(i - 1, j)] + counts[at(i, j - 1)] - counts[at(i - 1, j - 1)];
        }
    }
    let nf = n as f64;
    let mut sup = 0.0f64;
    for i in 1..=nx {
        for j in 1..=ny {
            let f = theory.cdf(&[xs[i - 1], ys[j - 1]]);
            for (a, b) in [(i, j), (i - 1, j), (i, j - 1), (i - 1, j - 1)] {
                sup = sup.max((f - counts[at(a, b)] as f64 / nf).abs());
            }
        }
    }
    Ok(sup)
}

pub fn bound_2d_two_region(counts: impl Into<RegionCounts>, mass: &MassSpec, eta: f64) -> Result<BoundValue> {
    Ok(combine(&two_region_terms(counts, mass.alpha, eta, LEAD_2D)?))
}

pub fn bound_2d_three_region(counts: impl Into<RegionCounts>, mass: &MassSpec, epsilon: f64, eta: f64) -> Result<BoundValue> {
    Ok(combine(&three_region_terms(counts, mass.alpha, mass.beta, epsilon, eta, LEAD_2D)?))
}

pub fn eta_2d_two_region(counts: impl Into<RegionCounts>, mass: &MassSpec, delta: f64) -> Result<EtaSolution> {
    let c = counts.into();
    crate::censored::eta_for_confidence(
        |e| bound_2d_two_region(c, mass, e),
        delta,
        crate::censored::two_region_edge(c, mass.alpha),
    )
}

pub fn eta_2d_three_region(counts: impl Into<RegionCounts>, mass: &MassSpec, epsilon: f64, delta: f64) -> Result<EtaSolution> {
    let c = counts.into();
    crate::censored::eta_for_confidence(
        |e| bound_2d_three_region(c, mass, epsilon, e),
        delta,
        crate::censored::three_region_edge(c, mass.alpha, mass.beta, epsilon),
    )
}

/// A 2D sample with an optional label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: Point,
    pub label: Option<Label>,
}

/// Parses CSV with header `x1,x2` and an optional `label` column (0 or 1).
pub fn parse_points<R: Read>(reader: R) -> Result<Vec<LabeledPoint>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(i1), Some(i2)) = (col("x1"), col("x2")) else {
        return Err(Error::Parse {
            line: 1,
            reason: "header must contain `x1` and `x2` columns".into(),
        });
    };
    let il = col("label");
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    line,
                    reason: format!("invalid coordinate `{raw}`"),
                }),
            }
        };
        let label = match il.map(|i| record.get(i).unwrap_or("")) {
            None | Some("") => None,
            Some("0") => Some(Label::Zero),
            Some("1") => Some(Label::One),
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    reason: format!("label must be 0 or 1, got `{other}`"),
                })
            }
        };
        out.push(LabeledPoint {
            x: [num(i1)?, num(i2)?],
            label,
        });
    }
    Ok(out)
}

pub fn ingest_points(path: impl AsRef<Path>) -> Result<Vec<LabeledPoint>> {
    parse_points(std::fs::File::open(path)?)
}

/// Censored collection in the plane: `initial` points, then `arrivals`
/// admitted when on or above the boundary, or with probability `epsilon`
/// between the exploration line and the boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collection2D {
    pub initial: Vec<Point>,
    pub admitted: Vec<Point>,
    pub partition: RegionPartition,
}

impl Collection2D {
    pub fn pooled(&self) -> Vec<Point> {
        self.initial.iter().chain(&self.admitted).copied().collect()
    }

    /// Projected initial sample as a one-dimensional empirical CDF.
    pub fn projected_initial(&self, boundary: &Boundary2D) -> Result<EmpiricalCdf> {
        EmpiricalCdf::new(boundary.project_all(&self.initial))
    }
}

/// Draws initial points and arrivals from `population`; streams follow the
/// simulator's convention (0 initial, 1 arrivals, 2 coins).
pub fn collect_2d(
    population: &Gaussian2D,
    boundary: &Boundary2D,
    epsilon: f64,
    n: usize,
    arrivals: usize,
    seed: u64,
) -> Result<Collection2D> {
    let spec = boundary.region_spec(epsilon)?;
    let initial = population.sample(n, &mut SeededRng::new(seed, 0));
    let mut stream = SeededRng::new(seed, 1);
    let mut coins = SeededRng::new(seed, 2);
    let mut admitted = Vec::new();
    let (mut k1, mut k2) = (0, 0);
    for _ in 0..arrivals {
        let p = population.draw(&mut stream);
        match spec.region_of(boundary.project(&p)) {
            crate::censored::RegionKind::Disclosed => {
                k2 += 1;
                admitted.push(p);
            }
            crate::censored::RegionKind::Explore => {
                if coins.uniform() < epsilon {
                    k1 += 1;
                    admitted.push(p);
                }
            }
            crate::censored::RegionKind::Censored => {}
        }
    }
    let partition = crate::censored::partition(&boundary.project_all(&initial), k1, k2, &spec)?;
    Ok(Collection2D {
        initial,
        admitted,
        partition,
    })
}
