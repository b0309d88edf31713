//! Choosing an exploration policy: cost models and the grid search trading
//! bound improvement against exploration cost.

pub mod quadrature;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censored::{bound_three_region, bound_two_region, MassSpec, RegionCounts};
use crate::error::{invalid, require_positive, require_probability, Result};
use crate::stats::{Cdf, EmpiricalCdf, TheoreticalCdf};

fn unit() -> f64 {
    1.0
}

/// Cost `weight * eps * integral of exp((theta - x)/c) f0(x)` over the band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostFields")]
pub struct CostModel {
    pub c: f64,
    /// Distribution of label-0 (costly) scores.
    pub f0: TheoreticalCdf,
    /// Converts cost units into bound units.
    #[serde(default = "unit")]
    pub weight: f64,
}

#[derive(Deserialize)]
struct CostFields {
    c: f64,
    f0: TheoreticalCdf,
    #[serde(default = "unit")]
    weight: f64,
}

impl TryFrom<CostFields> for CostModel {
    type Error = crate::Error;

    fn try_from(f: CostFields) -> Result<Self> {
        Self::new(f.c, f.f0)?.with_weight(f.weight)
    }
}

impl CostModel {
    pub fn new(c: f64, f0: TheoreticalCdf) -> Result<Self> {
        require_positive("c", c)?;
        Ok(Self { c, f0, weight: 1.0 })
    }

    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(invalid("weight", format!("must be finite and nonnegative, got {weight}")));
        }
        self.weight = weight;
        Ok(self)
    }

    /// Unweighted integral over `[lo, hi)`, before the `eps` multiplier.
    pub fn band_integral(&self, lo: f64, hi: f64, theta: f64) -> Result<f64> {
        if lo > hi {
            return Err(invalid("lb", format!("{lo} exceeds the upper edge {hi}")));
        }
        let c = self.c;
        quadrature::integrate_split(
            |x| ((theta - x) / c).exp() * self.f0.density(x),
            lo,
            hi,
            &self.f0.breakpoints(),
        )
    }
}

pub fn cost_single(lb: f64, theta: f64, epsilon: f64, model: &CostModel) -> Result<f64> {
    require_probability("epsilon", epsilon)?;
    if lb > theta {
        return Err(invalid("lb", format!("{lb} exceeds theta {theta}")));
    }
    if epsilon == 0.0 || lb == theta {
        return Ok(0.0);
    }
    Ok(model.weight * epsilon * model.band_integral(lb, theta, theta)?)
}

/// Nested bands `[lb_i, lb_{i-1})` with `lb_0 = theta`, each with its own
/// exploration probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicyFields")]
pub struct MultiExplorePolicy {
    /// Lower edges ordered from the threshold outward (strictly decreasing).
    lower_edges: Vec<f64>,
    epsilons: Vec<f64>,
}

#[derive(Deserialize)]
struct PolicyFields {
    lower_edges: Vec<f64>,
    epsilons: Vec<f64>,
}

impl TryFrom<PolicyFields> for MultiExplorePolicy {
    type Error = crate::Error;

    fn try_from(f: PolicyFields) -> Result<Self> {
        Self::new(f.lower_edges, f.epsilons)
    }
}

impl MultiExplorePolicy {
    pub fn new(lower_edges: Vec<f64>, epsilons: Vec<f64>) -> Result<Self> {
        if lower_edges.is_empty() {
            return Err(invalid("lower_edges", "need at least one band"));
        }
        if lower_edges.len() != epsilons.len() {
            return Err(invalid("epsilons", "need one probability per band"));
        }
        if lower_edges.iter().any(|x| !x.is_finite()) || lower_edges.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("lower_edges", "must be finite and strictly decreasing"));
        }
        for &e in &epsilons {
            require_probability("epsilons", e)?;
        }
        Ok(Self { lower_edges, epsilons })
    }

    pub fn single(lb: f64, epsilon: f64) -> Result<Self> {
        Self::new(vec![lb], vec![epsilon])
    }

    pub fn bands(&self) -> usize {
        self.lower_edges.len()
    }

    /// `(lo, hi, eps)` per band, nearest the threshold first.
    pub fn intervals(&self, theta: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let uppers = std::iter::once(theta).chain(self.lower_edges.iter().copied());
        self.lower_edges
            .iter()
            .zip(uppers)
            .zip(&self.epsilons)
            .map(|((&lo, hi), &e)| (lo, hi, e))
    }
}

pub fn cost_multi(policy: &MultiExplorePolicy, theta: f64, model: &CostModel) -> Result<f64> {
    if policy.lower_edges[0] > theta {
        return Err(invalid("lower_edges", format!("first edge exceeds theta {theta}")));
    }
    policy
        .intervals(theta)
        .map(|(lo, hi, e)| {
            if e == 0.0 {
                Ok(0.0)
            } else {
                Ok(model.weight * e * model.band_integral(lo, hi, theta)?)
            }
        })
        .sum()
}

/// How the initial sample enters the bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSource {
    /// `m = round(n alpha)`, `l = round(n beta)`: no shifting error.
    ExactMass { n: u64 },
    /// Realized initial samples; bounds are averaged across them.
    Samples(Vec<EmpiricalCdf>),
}

/// How new labeled counts are obtained for a candidate policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalCounts {
    /// Planning mode: `k1 = eps T (alpha - beta)`, `k2 = T (1 - alpha)`.
    Expected { arrivals: u64 },
    /// Post-hoc mode on observed arrival scores: `k2` counts scores at or
    /// above the threshold, `k1 = eps` times the scores in the band.
    Realized { scores: Vec<f64> },
}

/// Fixed quantities of the optimization: population, threshold, accuracy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreContext {
    pub cdf: TheoreticalCdf,
    pub theta: f64,
    pub eta: f64,
    pub initial: InitialSource,
    pub counts: ArrivalCounts,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub lb: f64,
    pub epsilon: f64,
    /// Bound without exploration, threshold at theta.
    pub baseline: f64,
    /// Bound with exploration in `[lb, theta)`.
    pub explored: f64,
    pub cost: f64,
    pub objective: f64,
}

struct InitialCounts {
    n: f64,
    m: f64,
    l: f64,
}

impl ExploreContext {
    fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        require_positive("eta", self.eta)?;
        match &self.initial {
            InitialSource::ExactMass { n: 0 } => Err(invalid("n", "must be at least 1")),
            InitialSource::Samples(s) if s.is_empty() || s.iter().any(|e| e.is_empty()) => {
                Err(crate::Error::EmptySample)
            }
            _ => Ok(()),
        }
    }

    fn initial_counts(&self, alpha: f64, beta: f64, lb: f64) -> Vec<InitialCounts> {
        match &self.initial {
            InitialSource::ExactMass { n } => {
                let nf = *n as f64;
                vec![InitialCounts {
                    n: nf,
                    m: (nf * alpha).round(),
                    l: (nf * beta).round(),
                }]
            }
            InitialSource::Samples(samples) => samples
                .iter()
                .map(|e| InitialCounts {
                    n: e.len() as f64,
                    m: e.count_lt(self.theta) as f64,
                    l: e.count_lt(lb) as f64,
                })
                .collect(),
        }
    }

    /// `(band arrivals, disclosed arrivals)`; the band count is before the `eps` thinning.
    fn arrivals(&self, alpha: f64, beta: f64, lb: f64) -> (f64, f64) {
        match &self.counts {
            ArrivalCounts::Expected { arrivals } => {
                let t = *arrivals as f64;
                (t * (alpha - beta), t * (1.0 - alpha))
            }
            ArrivalCounts::Realized { scores } => {
                let band = scores.iter().filter(|&&x| x >= lb && x < self.theta).count();
                let above = scores.iter().filter(|&&x| x >= self.theta).count();
                (band as f64, above as f64)
            }
        }
    }

    /// Mean clamped bounds `(B(theta), B^e(lb, theta, eps))` over the initial samples.
    pub fn bounds(&self, lb: f64, epsilon: f64) -> Result<(f64, f64)> {
        self.validate()?;
        if lb >= self.theta {
            return Err(invalid("lb", format!("must be below theta {}", self.theta)));
        }
        require_probability("epsilon", epsilon)?;
        let alpha = self.cdf.eval(self.theta);
        let beta = self.cdf.eval(lb);
        let (band, above) = self.arrivals(alpha, beta, lb);
        let plain = MassSpec::theoretical(alpha, 0.0)?;
        let mass = MassSpec::theoretical(alpha, beta)?;
        let inits = self.initial_counts(alpha, beta, lb);
        let mut sums = (0.0, 0.0);
        for c in &inits {
            let two = RegionCounts {
                n: c.n,
                m: c.m,
                l: 0.0,
                k1: 0.0,
                k2: above,
            };
            let three = RegionCounts {
                l: c.l,
                k1: epsilon * band,
                ..two
            };
            sums.0 += bound_two_region(two, &plain, self.eta)?.probability;
            sums.1 += bound_three_region(three, &mass, epsilon, self.eta)?.probability;
        }
        let r = inits.len() as f64;
        Ok((sums.0 / r, sums.1 / r))
    }

    pub fn objective(&self, lb: f64, epsilon: f64, cost: &CostModel) -> Result<ObjectivePoint> {
        let (baseline, explored) = self.bounds(lb, epsilon)?;
        let cost = cost_single(lb, self.theta, epsilon, cost)?;
        Ok(ObjectivePoint {
            lb,
            epsilon,
            baseline,
            explored,
            cost,
            objective: baseline - explored - cost,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreOptimum {
    pub best: ObjectivePoint,
    /// Every grid point, `lb`-major in grid order.
    pub points: Vec<ObjectivePoint>,
}

/// Exhaustive grid search for the policy maximizing
/// `B(theta) - B^e(lb, theta, eps) - cost`. Ties go to the smaller `eps`,
/// then the larger `lb`.
pub fn optimize_exploration(
    ctx: &ExploreContext,
    cost: &CostModel,
    lb_grid: &[f64],
    eps_grid: &[f64],
) -> Result<ExploreOptimum> {
    if lb_grid.is_empty() || eps_grid.is_empty() {
        return Err(invalid("grid", "must be nonempty"));
    }
    ctx.validate()?;
    // The cost integral depends only on lb; eps enters linearly.
    let integrals = lb_grid
        .par_iter()
        .map(|&lb| cost_single(lb, ctx.theta, 1.0, cost))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, f64)> = lb_grid
        .iter()
        .enumerate()
        .flat_map(|(i, _)| eps_grid.iter().map(move |&e| (i, e)))
        .collect();
    let points = cells
        .par_iter()
        .map(|&(i, eps)| {
            let lb = lb_grid[i];
            let (baseline, explored) = ctx.bounds(lb, eps)?;
            let cost = eps * integrals[i];
            Ok(ObjectivePoint {
                lb,
                epsilon: eps,
                baseline,
                explored,
                cost,
                objective: baseline - explored - cost,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = *points
        .iter()
        .max_by(|a, b| {
            a.objective
                .total_cmp(&b.objective)
                .then(b.epsilon.total_cmp(&a.epsilon))
                .then(a.lb.total_cmp(&b.lb))
        })
        .expect("nonempty grid");
    Ok(ExploreOptimum { best, points })
}

/// `0, step, 2 step, ..., 1`.
pub fn default_eps_grid(step: f64) -> Result<Vec<f64>> {
    require_positive("step", step)?;
    let count = (1.0 / step).round() as usize;
    if (count as f64 * step - 1.0).abs() > 1e-9 {
        return Err(invalid("step", "must divide 1"));
    }
    Ok((0..=count).map(|i| (i as f64 * step).min(1.0)).collect())
}

/// Percentiles 1..=50 of the arrival distribution that lie below `theta`.
pub fn default_lb_grid(cdf: &TheoreticalCdf, theta: f64) -> Vec<f64> {
    (1..=50)
        .map(|p| cdf.quantile(p as f64 / 100.0))
        .filter(|&x| x < theta)
        .collect()
}
