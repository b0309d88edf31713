//! Monte Carlo checks of every bound: deviation frequencies, generalization
//! gaps and benchmark comparisons, each reported against the bound it tests.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censored::{
    bound_three_region, bound_two_region, eta_three_region, eta_two_region, MassSpec, RegionKind, RegionPartition,
    RegionSpec, ReweightedCdf,
};
use crate::classic::{Benchmark, BoundValue};
use crate::error::{invalid, require_probability, Result};
use crate::generalization::{empirical_risk_from_estimates, expected_risk, gen_bound, GenBound, RiskPair};
use crate::simulator::{finalize, run_stage1, Simulation, SimulationConfig, SimulationTrace, TraceDetail};
use crate::stats::{replication_seed, sup_deviation, Interval, Label, RestrictedCdf, SeededRng, TheoreticalCdf};

pub const MIN_REPLICATIONS: u64 = 100;
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundHolds,
    BoundViolatedWithinNoise,
    BoundViolated,
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::BoundViolated)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub replications: u64,
    pub seed: u64,
    /// The `eta` of the deviation event, or `delta` for generalization checks.
    pub threshold: f64,
    pub hits: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// Half-width of the 95% Wilson interval divided by 1.96.
    pub stderr: f64,
    pub bound: f64,
    /// Some replication's bound had a trivial term.
    pub trivial: bool,
    pub verdict: Verdict,
}

impl CoverageReport {
    pub fn new(replications: u64, seed: u64, threshold: f64, hits: u64, bound: f64, trivial: bool) -> Self {
        let frequency = hits as f64 / replications.max(1) as f64;
        let (lo, hi) = wilson_interval(hits, replications, Z95);
        let stderr = (hi - lo) / (2.0 * Z95);
        let verdict = if frequency <= bound {
            Verdict::BoundHolds
        } else if frequency <= bound + 3.0 * stderr {
            Verdict::BoundViolatedWithinNoise
        } else {
            Verdict::BoundViolated
        };
        Self {
            replications,
            seed,
            threshold,
            hits,
            frequency,
            wilson_low: lo,
            wilson_high: hi,
            stderr,
            bound,
            trivial,
            verdict,
        }
    }
}

fn check_replications(r: u64) -> Result<()> {
    if r < MIN_REPLICATIONS {
        return Err(invalid("replications", format!("need at least {MIN_REPLICATIONS}, got {r}")));
    }
    Ok(())
}

/// Data drawn conditionally on fixed region counts: `l` initial samples below
/// `lb`, `m - l` in `[lb, theta)`, `n - m` at or above `theta`, plus `k1` new
/// samples in the band and `k2` above the threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalScenario {
    pub cdf: TheoreticalCdf,
    pub theta: f64,
    #[serde(default)]
    pub lb: Option<f64>,
    #[serde(default)]
    pub epsilon: f64,
    pub n: u64,
    pub m: u64,
    #[serde(default)]
    pub l: u64,
    #[serde(default)]
    pub k1: u64,
    #[serde(default)]
    pub k2: u64,
}

impl ConditionalScenario {
    pub fn spec(&self) -> Result<RegionSpec> {
        RegionSpec::new(self.theta, self.lb, self.epsilon)
    }

    pub fn partition(&self) -> Result<RegionPartition> {
        let l = if self.lb.is_some() { self.l } else { 0 };
        if self.lb.is_none() && (self.l > 0 || self.k1 > 0) {
            return Err(invalid("l", "l and k1 require an exploration lower bound"));
        }
        RegionPartition::new(self.n, self.m, l, self.k1, self.k2)
    }

    pub fn mass(&self) -> Result<MassSpec> {
        MassSpec::theoretical(self.cdf.eval(self.theta), self.lb.map_or(0.0, |lb| self.cdf.eval(lb)))
    }

    pub fn bound(&self, eta: f64) -> Result<BoundValue> {
        let part = self.partition()?;
        let mass = self.mass()?;
        if self.lb.is_some() {
            bound_three_region(&part, &mass, self.epsilon, eta)
        } else {
            bound_two_region(&part, &mass, eta)
        }
    }

    /// Smallest `eta` whose bound is at most `delta`; `None` if unreachable.
    pub fn eta_for(&self, delta: f64) -> Result<Option<f64>> {
        let part = self.partition()?;
        let mass = self.mass()?;
        let sol = if self.lb.is_some() {
            eta_three_region(&part, &mass, self.epsilon, delta)?
        } else {
            eta_two_region(&part, &mass, delta)?
        };
        Ok(sol.eta())
    }

    fn regions(&self) -> Result<[Option<RestrictedCdf>; 3]> {
        let lb = self.lb.unwrap_or(f64::NEG_INFINITY);
        let make = |lo: f64, hi: f64, needed: bool| -> Result<Option<RestrictedCdf>> {
            if needed {
                Ok(Some(RestrictedCdf::new(self.cdf.clone(), lo, hi)?))
            } else {
                Ok(None)
            }
        };
        let p = self.partition()?;
        Ok([
            make(f64::NEG_INFINITY, lb, p.l > 0)?,
            make(lb, self.theta, p.m > p.l || p.k1 > 0)?,
            make(self.theta, f64::INFINITY, p.n > p.m || p.k2 > 0)?,
        ])
    }

    /// One draw of `(initial, admitted)` scores.
    pub fn draw(&self, rng: &mut SeededRng) -> Result<(Vec<f64>, Vec<f64>)> {
        let p = self.partition()?;
        let [below, band, above] = self.regions()?;
        let take = |r: &Option<RestrictedCdf>, count: u64, rng: &mut SeededRng, out: &mut Vec<f64>| {
            if let Some(r) = r {
                out.extend((0..count).map(|_| r.quantile(rng.open_uniform())));
            }
        };
        let mut initial = Vec::with_capacity(p.n as usize);
        take(&below, p.l, rng, &mut initial);
        take(&band, p.m - p.l, rng, &mut initial);
        take(&above, p.n - p.m, rng, &mut initial);
        let mut admitted = Vec::with_capacity((p.k1 + p.k2) as usize);
        take(&band, p.k1, rng, &mut admitted);
        take(&above, p.k2, rng, &mut admitted);
        Ok((initial, admitted))
    }

    /// Sup deviation of the reweighted estimate from the true CDF for one draw.
    pub fn deviation(&self, rng: &mut SeededRng) -> Result<f64> {
        let (initial, admitted) = self.draw(rng)?;
        let est = ReweightedCdf::new(&initial, &admitted, &self.spec()?)?;
        sup_deviation(&self.cdf, &est, Interval::full())
    }
}

/// Frequency of `sup |F - F_hat| >= eta` with counts held fixed; the bound is
/// the scenario's bound at `eta`.
pub fn mc_cdf_deviation_conditional(scenario: &ConditionalScenario, eta: f64, replications: u64, seed: u64) -> Result<CoverageReport> {
    check_replications(replications)?;
    let bound = if eta > 0.0 {
        scenario.bound(eta)?
    } else {
        BoundValue::trivial()
    };
    let hits = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::new(replication_seed(seed, i), 0);
            Ok(u64::from(scenario.deviation(&mut rng)? >= eta))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(CoverageReport::new(replications, seed, eta, hits, bound.probability, bound.trivial))
}

/// Outcome of one full-process replication for one label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessDeviation {
    pub deviation: f64,
    pub partition: RegionPartition,
    pub bound: BoundValue,
}

fn label_bound(part: &RegionPartition, spec: &RegionSpec, cdf: &TheoreticalCdf, eta: f64) -> Result<BoundValue> {
    let mass = MassSpec::from_cdf(cdf, spec);
    if spec.lb.is_some() {
        bound_three_region(part, &mass, spec.epsilon, eta)
    } else {
        bound_two_region(part, &mass, eta)
    }
}

fn process_deviation(trace: &SimulationTrace, label: Label, eta: f64) -> Result<ProcessDeviation> {
    let cdf = trace
        .config
        .population
        .cdf(label)
        .ok_or_else(|| invalid("label", format!("population has no label {label}")))?;
    let state = finalize(trace)?;
    let est = state
        .label(label)
        .ok_or_else(|| invalid("label", format!("no initial samples with label {label}")))?;
    let reweighted = est
        .reweighted
        .as_ref()
        .ok_or_else(|| invalid("trace", "admitted samples fell below the final threshold"))?;
    let spec = trace.final_spec()?;
    Ok(ProcessDeviation {
        deviation: sup_deviation(cdf, reweighted, Interval::full())?,
        partition: est.partition,
        bound: label_bound(&est.partition, &spec, cdf, eta)?,
    })
}

/// Full process: every replication draws stage 1 and all arrivals afresh.
/// Since the bound holds conditionally on the realized counts, the frequency
/// is compared against the mean per-replication bound.
pub fn mc_cdf_deviation(config: &SimulationConfig, label: Label, eta: f64, replications: u64, seed: u64) -> Result<CoverageReport> {
    check_replications(replications)?;
    config.validate()?;
    let outcomes = (0..replications)
        .into_par_iter()
        .map(|i| {
            let cfg = SimulationConfig {
                seed: replication_seed(seed, i),
                ..config.clone()
            };
            let trace = crate::simulator::simulate(&cfg, TraceDetail::Summary)?;
            if eta <= 0.0 {
                return Ok((true, BoundValue::trivial()));
            }
            let d = process_deviation(&trace, label, eta)?;
            Ok((d.deviation >= eta, d.bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = outcomes.iter().filter(|o| o.0).count() as u64;
    let bound = outcomes.iter().map(|o| o.1.probability).sum::<f64>() / replications as f64;
    let trivial = outcomes.iter().any(|o| o.1.trivial);
    Ok(CoverageReport::new(replications, seed, eta, hits, bound, trivial))
}

/// One replication of the generalization experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub theta: f64,
    pub risk: RiskPair,
    pub bound: GenBound,
    /// Per-label deviation levels used in the bound.
    pub etas: [f64; 2],
    /// Labeled sample size (initial plus admitted).
    pub labeled: u64,
}

impl GapSample {
    pub fn gap(&self) -> f64 {
        self.risk.gap()
    }

    pub fn exceeds(&self) -> bool {
        self.gap() > self.bound.total
    }
}

/// Risk gap and bound for a trace, with per-label deviations at `delta`.
pub fn gap_sample(trace: &SimulationTrace, delta: f64) -> Result<GapSample> {
    let model = trace
        .config
        .population
        .mixture()
        .ok_or_else(|| invalid("population", "generalization needs a two-label mixture"))?;
    let state = finalize(trace)?;
    let spec = trace.final_spec()?;
    let theta = state.theta;
    let n = [trace.initial.label0.len(), trace.initial.label1.len()];
    let mut etas = [0.0; 2];
    for label in Label::ALL {
        let Some(est) = state.label(label) else { continue };
        let mass = MassSpec::from_cdf(model.cdf(label), &spec);
        let sol = if spec.lb.is_some() {
            eta_three_region(&est.partition, &mass, spec.epsilon, delta)?
        } else {
            eta_two_region(&est.partition, &mass, delta)?
        };
        // A CDF deviation never exceeds 1.
        etas[label.index()] = sol.eta().unwrap_or(1.0);
    }
    let reweighted = |l: Label| -> Result<Option<&ReweightedCdf>> {
        match state.label(l) {
            None => Ok(None),
            Some(e) => e
                .reweighted
                .as_ref()
                .map(Some)
                .ok_or_else(|| invalid("trace", "admitted samples fell below the final threshold")),
        }
    };
    let empirical = empirical_risk_from_estimates(theta, n[0], n[1], reweighted(Label::Zero)?, reweighted(Label::One)?)?;
    let risk = RiskPair {
        expected: expected_risk(theta, model),
        empirical,
    };
    Ok(GapSample {
        theta,
        risk,
        bound: gen_bound(n[0], n[1], model, etas, delta)?,
        etas,
        labeled: (trace.initial.len() + trace.admitted.len()) as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Frequency of `gap > bound` against the allowed `2 delta`.
    pub coverage: CoverageReport,
    pub delta: f64,
    pub mean_gap: f64,
    /// The `1 - 2 delta` quantile of the gap.
    pub gap_quantile: f64,
    pub mean_bound: f64,
}

fn quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let idx = ((values.len() as f64 * q).ceil() as usize).clamp(1, values.len()) - 1;
    values[idx]
}

/// Coverage of the generalization bound over full process replications.
pub fn mc_gen_gap(config: &SimulationConfig, delta: f64, replications: u64, seed: u64) -> Result<GapReport> {
    check_replications(replications)?;
    require_probability("delta", delta)?;
    config.validate()?;
    let samples = (0..replications)
        .into_par_iter()
        .map(|i| {
            let cfg = SimulationConfig {
                seed: replication_seed(seed, i),
                ..config.clone()
            };
            gap_sample(&crate::simulator::simulate(&cfg, TraceDetail::Summary)?, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_gaps(&samples, delta, seed))
}

fn summarize_gaps(samples: &[GapSample], delta: f64, seed: u64) -> GapReport {
    let r = samples.len() as u64;
    let hits = samples.iter().filter(|s| s.exceeds()).count() as u64;
    let allowed = (2.0 * delta).min(1.0);
    let mut gaps: Vec<f64> = samples.iter().map(|s| s.gap()).collect();
    let mean_gap = gaps.iter().sum::<f64>() / r as f64;
    let mean_bound = samples.iter().map(|s| s.bound.total).sum::<f64>() / r as f64;
    GapReport {
        coverage: CoverageReport::new(r, seed, delta, hits, allowed, false),
        delta,
        mean_gap,
        gap_quantile: quantile(&mut gaps, (1.0 - 2.0 * delta).clamp(0.0, 1.0)),
        mean_bound,
    }
}

/// Shared grid for comparing our bound, the IID benchmarks and the MC gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub simulation: SimulationConfig,
    pub delta: f64,
    /// Arrival counts at which all quantities are evaluated.
    pub checkpoints: Vec<u64>,
    pub replications: u64,
    #[serde(default = "default_vc_dim")]
    pub vc_dim: u32,
}

fn default_vc_dim() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub arrivals: u64,
    pub mean_gap: f64,
    pub gap_quantile: f64,
    pub ours: f64,
    /// Frequency of the gap exceeding our bound.
    pub exceed_frequency: f64,
    pub hoeffding: f64,
    pub gc: f64,
    pub vc: f64,
}

impl CompareRow {
    pub const CSV_HEADER: [&'static str; 8] = [
        "arrivals",
        "mean_gap",
        "gap_quantile",
        "ours",
        "exceed_frequency",
        "hoeffding",
        "gc",
        "vc",
    ];

    /// Benchmarks (name, value) whose value falls below the gap quantile.
    pub fn benchmarks_below_truth(&self) -> Vec<&'static str> {
        [("hoeffding", self.hoeffding), ("gc", self.gc), ("vc", self.vc)]
            .into_iter()
            .filter(|(_, v)| *v < self.gap_quantile)
            .map(|(n, _)| n)
            .collect()
    }
}

/// Benchmarks are evaluated on the pooled labeled sample size at confidence
/// `1 - 2 delta`, matching the confidence of our bound.
pub fn compare_bounds(config: &CompareConfig, seed: u64) -> Result<Vec<CompareRow>> {
    if config.checkpoints.is_empty() {
        return Err(invalid("checkpoints", "must be nonempty"));
    }
    check_replications(config.replications)?;
    require_probability("delta", config.delta)?;
    let mut checkpoints = config.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let horizon = *checkpoints.last().expect("nonempty");
    let sim = SimulationConfig {
        arrivals: horizon,
        ..config.simulation.clone()
    };
    sim.validate()?;
    let per_rep = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let cfg = SimulationConfig {
                seed: replication_seed(seed, i),
                ..sim.clone()
            };
            let stage1 = run_stage1(&cfg)?;
            let mut run = Simulation::new(&cfg, stage1, TraceDetail::Summary)?;
            checkpoints
                .iter()
                .map(|&t| {
                    run.advance(t - run.processed());
                    gap_sample(&run.snapshot(), config.delta)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let benchmarks = [Benchmark::Hoeffding, Benchmark::Gc, Benchmark::Vc { d: config.vc_dim }];
    let confidence = (2.0 * config.delta).min(1.0);
    checkpoints
        .iter()
        .enumerate()
        .map(|(j, &arrivals)| {
            let column: Vec<GapSample> = per_rep.iter().map(|r| r[j]).collect();
            let summary = summarize_gaps(&column, config.delta, seed);
            let mut bench = [0.0; 3];
            for (slot, b) in bench.iter_mut().zip(&benchmarks) {
                let total: f64 = column
                    .iter()
                    .map(|s| b.eta(s.labeled, confidence))
                    .sum::<Result<f64>>()?;
                *slot = total / column.len() as f64;
            }
            Ok(CompareRow {
                arrivals,
                mean_gap: summary.mean_gap,
                gap_quantile: summary.gap_quantile,
                ours: summary.mean_bound,
                exceed_frequency: summary.coverage.frequency,
                hoeffding: bench[0],
                gc: bench[1],
                vc: bench[2],
            })
        })
        .collect()
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CompareRow::CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.arrivals.to_string(),
            r.mean_gap.to_string(),
            r.gap_quantile.to_string(),
            r.ours.to_string(),
            r.exceed_frequency.to_string(),
            r.hoeffding.to_string(),
            r.gc.to_string(),
            r.vc.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coverage_csv<W: Write>(reports: &[(String, CoverageReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "name",
        "replications",
        "seed",
        "threshold",
        "hits",
        "frequency",
        "wilson_low",
        "wilson_high",
        "bound",
        "verdict",
    ])?;
    for (name, r) in reports {
        let verdict = serde_json::to_value(r.verdict)?;
        w.write_record([
            name.clone(),
            r.replications.to_string(),
            r.seed.to_string(),
            r.threshold.to_string(),
            r.hits.to_string(),
            r.frequency.to_string(),
            r.wilson_low.to_string(),
            r.wilson_high.to_string(),
            r.bound.to_string(),
            verdict.as_str().unwrap_or_default().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Region counts of admitted arrivals in a trace, for reporting.
pub fn admitted_by_region(trace: &SimulationTrace) -> Result<[u64; 3]> {
    let spec = trace.final_spec()?;
    let mut out = [0u64; 3];
    for label in Label::ALL {
        for &x in trace.admitted.scores(label) {
            let i = match spec.region_of(x) {
                RegionKind::Censored => 0,
                RegionKind::Explore => 1,
                RegionKind::Disclosed => 2,
            };
            out[i] += 1;
        }
    }
    Ok(out)
}
