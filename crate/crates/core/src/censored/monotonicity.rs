//! Sweeps checking how the bounds move with the threshold and with the
//! exploration probability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bound_three_region, bound_two_region, MassSpec, RegionCounts, RegionPartition};
use crate::error::{invalid, Result};
use crate::stats::TheoreticalCdf;

const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    pub raw: f64,
    pub trivial: bool,
    /// Whether this point satisfies the sufficient condition of the property.
    pub precondition_met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub nondecreasing: bool,
    pub monotone: bool,
    /// Index `i` such that points `i` and `i + 1` break the direction.
    pub first_violation: Option<usize>,
    pub precondition_met: bool,
    pub points: Vec<SweepPoint>,
}

impl MonotonicityReport {
    fn build(points: Vec<SweepPoint>, nondecreasing: bool) -> Self {
        let first_violation = points.windows(2).position(|w| {
            if nondecreasing {
                w[1].raw < w[0].raw - SLACK
            } else {
                w[1].raw > w[0].raw + SLACK
            }
        });
        Self {
            nondecreasing,
            monotone: first_violation.is_none(),
            first_violation,
            precondition_met: points.iter().all(|p| p.precondition_met),
            points,
        }
    }
}

/// Threshold sweep with exact mass: `m = round(n F(theta))` and
/// `k = round(c (n - m))` new disclosed samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Config {
    pub n: u64,
    pub eta: f64,
    pub growth: f64,
    pub cdf: TheoreticalCdf,
    pub thetas: Vec<f64>,
}

/// Smallest growth factor for which the threshold monotonicity argument goes
/// through: `(n-m)(eta-u)^2 / (m (eta-2u)^2) - 1`.
pub fn prop1_min_growth(n: u64, m: u64, eta: f64, u: f64) -> f64 {
    if m == 0 || eta <= 2.0 * u {
        return f64::INFINITY;
    }
    let (nf, mf) = (n as f64, m as f64);
    (nf - mf) * (eta - u).powi(2) / (mf * (eta - 2.0 * u).powi(2)) - 1.0
}

pub fn check_prop1(config: &Prop1Config) -> Result<MonotonicityReport> {
    if config.n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(config.growth >= 0.0) {
        return Err(invalid("growth", "must be nonnegative"));
    }
    let mut thetas = config.thetas.clone();
    thetas.sort_by(f64::total_cmp);
    let points = thetas
        .par_iter()
        .map(|&theta| {
            let alpha = config.cdf.eval(theta);
            let n = config.n;
            let m = (n as f64 * alpha).round() as u64;
            let u = (alpha - m as f64 / n as f64).abs();
            let k = (config.growth * (n - m) as f64).round() as u64;
            let part = RegionPartition::two_region(n, m, k)?;
            let b = bound_two_region(&part, &MassSpec::theoretical(alpha, 0.0)?, config.eta)?;
            Ok(SweepPoint {
                x: theta,
                raw: b.raw,
                trivial: b.trivial,
                precondition_met: config.growth >= prop1_min_growth(n, m, config.eta, u),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityReport::build(points, true))
}

/// Exploration-probability sweep at a fixed partition, with
/// `k1 = round(eps * k1_max)` unless `hold_k1` pins it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop2Config {
    pub n: u64,
    pub m: u64,
    pub l: u64,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub k1_max: u64,
    pub k2: u64,
    pub eps_grid: Vec<f64>,
    #[serde(default)]
    pub hold_k1: Option<u64>,
}

pub fn check_prop2(config: &Prop2Config) -> Result<MonotonicityReport> {
    let mass = MassSpec::theoretical(config.alpha, config.beta)?;
    let mut grid = config.eps_grid.clone();
    grid.sort_by(f64::total_cmp);
    let points = grid
        .par_iter()
        .map(|&eps| {
            let k1 = config
                .hold_k1
                .unwrap_or_else(|| (eps * config.k1_max as f64).round() as u64);
            let part = RegionPartition::new(config.n, config.m, config.l, k1, config.k2)?;
            let b = bound_three_region(RegionCounts::from(&part), &mass, eps, config.eta)?;
            Ok(SweepPoint {
                x: eps,
                raw: b.raw,
                trivial: b.trivial,
                precondition_met: !b.trivial,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityReport::build(points, false))
}
