//! The censored data-collection process.
//!
//! Stage I draws an initial labeled sample and fixes a threshold. Stage II
//! processes arrivals one at a time: scores at or above the threshold are
//! admitted and their labels observed, scores in `[lb, theta)` are admitted
//! with probability `epsilon`, everything else is rejected unlabeled. Stage III
//! rebuilds per-label CDF estimates from what was observed.

mod ingest;

pub use ingest::{ingest_scores, parse_scores};

use serde::{Deserialize, Serialize};

use crate::censored::{RegionKind, RegionPartition, RegionSpec, ReweightedCdf};
use crate::error::{invalid, Result};
use crate::generalization::{optimal_threshold, LabeledDataset};
use crate::stats::{EmpiricalCdf, Label, LabeledScore, MixtureModel, SeededRng, TheoreticalCdf};

/// Random stream indices derived from the configured seed.
pub const STREAM_INITIAL: u64 = 0;
pub const STREAM_ARRIVALS: u64 = 1;
pub const STREAM_COINS: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// One distribution; every sample carries label 1.
    Single(TheoreticalCdf),
    Mixture(MixtureModel),
}

impl Population {
    pub fn draw(&self, rng: &mut SeededRng) -> LabeledScore {
        match self {
            Population::Single(cdf) => LabeledScore {
                score: cdf.quantile(rng.open_uniform()),
                label: Label::One,
            },
            Population::Mixture(m) => m.draw(rng),
        }
    }

    pub fn cdf(&self, label: Label) -> Option<&TheoreticalCdf> {
        match (self, label) {
            (Population::Single(cdf), Label::One) => Some(cdf),
            (Population::Single(_), Label::Zero) => None,
            (Population::Mixture(m), l) => Some(m.cdf(l)),
        }
    }

    pub fn mixture(&self) -> Option<&MixtureModel> {
        match self {
            Population::Mixture(m) => Some(m),
            Population::Single(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialCounts {
    PerLabel { n0: u64, n1: u64 },
    Total { n: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub population: Population,
    pub initial: InitialCounts,
    /// Fixed decision threshold; learned by empirical risk minimization when absent.
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub lb: Option<f64>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub arrivals: u64,
    /// Retrain the threshold after every this many arrivals.
    #[serde(default)]
    pub adaptive_batch: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(invalid("epsilon", format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        if self.adaptive_batch == Some(0) {
            return Err(invalid("adaptive_batch", "must be at least 1"));
        }
        if let Some(theta) = self.theta {
            if !theta.is_finite() {
                return Err(invalid("theta", "must be finite"));
            }
            if let Some(lb) = self.lb {
                RegionSpec::new(theta, Some(lb), self.epsilon)?;
            }
        }
        if self.lb.is_some_and(|lb| !lb.is_finite()) {
            return Err(invalid("lb", "must be finite"));
        }
        let [n0, n1] = self.initial_counts();
        if n0 + n1 == 0 {
            return Err(invalid("initial", "needs at least one initial sample"));
        }
        if matches!(self.population, Population::Single(_)) && n0 > 0 {
            return Err(invalid("initial", "a single population has no label-0 samples"));
        }
        Ok(())
    }

    /// Initial sample sizes `[n0, n1]`; a total is split by the priors.
    pub fn initial_counts(&self) -> [u64; 2] {
        match (self.initial, &self.population) {
            (InitialCounts::PerLabel { n0, n1 }, _) => [n0, n1],
            (InitialCounts::Total { n }, Population::Single(_)) => [0, n],
            (InitialCounts::Total { n }, Population::Mixture(m)) => {
                let n1 = (n as f64 * m.p1()).round() as u64;
                [n - n1, n1]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage1 {
    pub initial: LabeledDataset,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub theta: f64,
}

impl Stage1 {
    /// Uses an existing labeled sample; learns the threshold when `theta` is absent.
    pub fn from_data(initial: LabeledDataset, theta: Option<f64>) -> Result<Self> {
        let initial = LabeledDataset::new(initial.label0, initial.label1)?;
        if initial.is_empty() {
            return Err(invalid("initial", "needs at least one initial sample"));
        }
        let theta = match theta {
            Some(t) => t,
            None => optimal_threshold(&initial)?,
        };
        Ok(Self { initial, theta })
    }
}

/// Draws the initial sample (label 0 first, then label 1, from the initial
/// stream) and fixes the starting threshold.
pub fn run_stage1(config: &SimulationConfig) -> Result<Stage1> {
    config.validate()?;
    let [n0, n1] = config.initial_counts();
    let mut rng = SeededRng::new(config.seed, STREAM_INITIAL);
    let mut draw = |label: Label, count: u64| -> Vec<f64> {
        let cdf = config.population.cdf(label);
        (0..count)
            .map(|_| cdf.expect("validated label").quantile(rng.open_uniform()))
            .collect()
    };
    let label0 = draw(Label::Zero, n0);
    let label1 = draw(Label::One, n1);
    let initial = LabeledDataset::new(label0, label1)?;
    let theta = match config.theta {
        Some(t) => t,
        None => optimal_threshold(&initial)?,
    };
    if let Some(lb) = config.lb {
        if lb >= theta {
            return Err(invalid("lb", format!("must be below the stage-1 threshold {theta}")));
        }
    }
    Ok(Stage1 { initial, theta })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEpoch {
    /// Number of arrivals processed before this threshold took effect.
    pub from: u64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRecord {
    pub t: u64,
    pub score: f64,
    /// Observed only when admitted.
    pub label: Option<Label>,
    pub admitted: bool,
    pub region: RegionKind,
    /// Exploration coin, drawn only inside `[lb, theta)`.
    pub coin: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalTally {
    pub censored: u64,
    pub explore: u64,
    pub disclosed: u64,
    pub explore_admitted: u64,
    /// Admitted exploration samples per label.
    pub k1: [u64; 2],
    /// Admitted disclosed samples per label.
    pub k2: [u64; 2],
}

impl ArrivalTally {
    pub fn processed(&self) -> u64 {
        self.censored + self.explore + self.disclosed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceDetail {
    /// Keep one record per arrival.
    Full,
    /// Keep tallies and admitted samples only.
    Summary,
}

#[derive(Clone, Debug)]
enum Source {
    Synthetic(SeededRng),
    Replay { rows: Vec<LabeledScore>, pos: usize },
}

/// Stage-II state machine; advance with [`Simulation::step`].
#[derive(Clone, Debug)]
pub struct Simulation {
    config: SimulationConfig,
    initial: LabeledDataset,
    source: Source,
    coins: SeededRng,
    theta: f64,
    thresholds: Vec<ThresholdEpoch>,
    records: Vec<ArrivalRecord>,
    detail: TraceDetail,
    admitted: LabeledDataset,
    tally: ArrivalTally,
    t: u64,
    horizon: u64,
}

impl Simulation {
    /// Synthetic arrivals drawn from the configured population.
    pub fn new(config: &SimulationConfig, stage1: Stage1, detail: TraceDetail) -> Result<Self> {
        config.validate()?;
        let rng = SeededRng::new(config.seed, STREAM_ARRIVALS);
        Ok(Self::build(config, stage1, Source::Synthetic(rng), config.arrivals, detail))
    }

    /// Replays a fixed arrival sequence (e.g. from [`ingest_scores`]) in order.
    pub fn replay(config: &SimulationConfig, stage1: Stage1, rows: Vec<LabeledScore>, detail: TraceDetail) -> Result<Self> {
        config.validate()?;
        let horizon = rows.len() as u64;
        Ok(Self::build(config, stage1, Source::Replay { rows, pos: 0 }, horizon, detail))
    }

    fn build(config: &SimulationConfig, stage1: Stage1, source: Source, horizon: u64, detail: TraceDetail) -> Self {
        let capacity = if detail == TraceDetail::Full { horizon as usize } else { 0 };
        Self {
            config: config.clone(),
            source,
            coins: SeededRng::new(config.seed, STREAM_COINS),
            theta: stage1.theta,
            thresholds: vec![ThresholdEpoch {
                from: 0,
                theta: stage1.theta,
            }],
            initial: stage1.initial,
            records: Vec::with_capacity(capacity),
            detail,
            admitted: LabeledDataset::default(),
            tally: ArrivalTally::default(),
            t: 0,
            horizon,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn processed(&self) -> u64 {
        self.t
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn tally(&self) -> &ArrivalTally {
        &self.tally
    }

    pub fn initial(&self) -> &LabeledDataset {
        &self.initial
    }

    pub fn admitted(&self) -> &LabeledDataset {
        &self.admitted
    }

    fn next_arrival(&mut self) -> Option<LabeledScore> {
        if self.t >= self.horizon {
            return None;
        }
        match &mut self.source {
            Source::Synthetic(rng) => Some(self.config.population.draw(rng)),
            Source::Replay { rows, pos } => {
                let row = rows.get(*pos).copied();
                *pos += 1;
                row
            }
        }
    }

    /// Processes one arrival; `None` once the horizon is reached.
    pub fn step(&mut self) -> Option<ArrivalRecord> {
        let arrival = self.next_arrival()?;
        let region = region_at(arrival.score, self.theta, self.config.lb);
        let (admitted, coin) = match region {
            RegionKind::Disclosed => (true, None),
            RegionKind::Explore => {
                let c = self.coins.uniform();
                (c < self.config.epsilon, Some(c))
            }
            RegionKind::Censored => (false, None),
        };
        match region {
            RegionKind::Censored => self.tally.censored += 1,
            RegionKind::Explore => self.tally.explore += 1,
            RegionKind::Disclosed => self.tally.disclosed += 1,
        }
        if admitted {
            let y = arrival.label.index();
            if region == RegionKind::Explore {
                self.tally.explore_admitted += 1;
                self.tally.k1[y] += 1;
            } else {
                self.tally.k2[y] += 1;
            }
            self.admitted.push(arrival);
        }
        let record = ArrivalRecord {
            t: self.t,
            score: arrival.score,
            label: admitted.then_some(arrival.label),
            admitted,
            region,
            coin,
        };
        if self.detail == TraceDetail::Full {
            self.records.push(record);
        }
        self.t += 1;
        self.maybe_retrain();
        Some(record)
    }

    fn maybe_retrain(&mut self) {
        let Some(batch) = self.config.adaptive_batch else {
            return;
        };
        if self.t % batch != 0 || self.t >= self.horizon {
            return;
        }
        let mut all = self.initial.clone();
        all.label0.extend_from_slice(&self.admitted.label0);
        all.label1.extend_from_slice(&self.admitted.label1);
        if let Ok(theta) = optimal_threshold(&all) {
            self.theta = theta;
            self.thresholds.push(ThresholdEpoch { from: self.t, theta });
        }
    }

    /// Processes up to `count` further arrivals.
    pub fn advance(&mut self, count: u64) {
        for _ in 0..count {
            if self.step().is_none() {
                break;
            }
        }
    }

    pub fn run(mut self) -> SimulationTrace {
        while self.step().is_some() {}
        self.into_trace()
    }

    /// Trace of the arrivals processed so far.
    pub fn snapshot(&self) -> SimulationTrace {
        SimulationTrace {
            config: self.config.clone(),
            initial: self.initial.clone(),
            thresholds: self.thresholds.clone(),
            records: self.records.clone(),
            admitted: self.admitted.clone(),
            tally: self.tally,
            detail: self.detail,
        }
    }

    pub fn into_trace(self) -> SimulationTrace {
        SimulationTrace {
            config: self.config,
            initial: self.initial,
            thresholds: self.thresholds,
            records: self.records,
            admitted: self.admitted,
            tally: self.tally,
            detail: self.detail,
        }
    }
}

fn region_at(score: f64, theta: f64, lb: Option<f64>) -> RegionKind {
    if score >= theta {
        RegionKind::Disclosed
    } else if lb.is_some_and(|lb| score >= lb) {
        RegionKind::Explore
    } else {
        RegionKind::Censored
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub config: SimulationConfig,
    pub initial: LabeledDataset,
    pub thresholds: Vec<ThresholdEpoch>,
    pub records: Vec<ArrivalRecord>,
    pub admitted: LabeledDataset,
    pub tally: ArrivalTally,
    pub detail: TraceDetail,
}

impl SimulationTrace {
    pub fn final_theta(&self) -> f64 {
        self.thresholds.last().map_or(f64::NAN, |e| e.theta)
    }

    /// Threshold in force for arrival `t`.
    pub fn theta_at(&self, t: u64) -> f64 {
        let idx = self.thresholds.partition_point(|e| e.from <= t);
        self.thresholds[idx.saturating_sub(1)].theta
    }

    /// Region geometry at the final threshold. The exploration band is
    /// dropped if retraining moved `theta` to or below `lb`.
    pub fn final_spec(&self) -> Result<RegionSpec> {
        let theta = self.final_theta();
        let lb = self.config.lb.filter(|&lb| lb < theta);
        RegionSpec::new(theta, lb, self.config.epsilon)
    }
}

/// Runs stage 1 and all synthetic arrivals.
pub fn simulate(config: &SimulationConfig, detail: TraceDetail) -> Result<SimulationTrace> {
    let stage1 = run_stage1(config)?;
    Ok(Simulation::new(config, stage1, detail)?.run())
}

/// Stage II with full per-arrival records.
pub fn run_arrivals(stage1: Stage1, config: &SimulationConfig) -> Result<SimulationTrace> {
    Ok(Simulation::new(config, stage1, TraceDetail::Full)?.run())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelEstimate {
    pub label: Label,
    pub partition: RegionPartition,
    /// Admitted samples that fall below the final censoring edge (possible
    /// only after retraining); they are excluded from `partition`.
    pub stale: u64,
    /// Empirical CDF of the union of initial and admitted samples.
    pub pooled: EmpiricalCdf,
    /// Region-reweighted estimate; absent when stale samples exist.
    pub reweighted: Option<ReweightedCdf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub theta: f64,
    pub labels: Vec<LabelEstimate>,
}

impl FinalState {
    pub fn label(&self, label: Label) -> Option<&LabelEstimate> {
        self.labels.iter().find(|e| e.label == label)
    }
}

/// Stage III: per-label partitions and CDF estimates at the final threshold.
pub fn finalize(trace: &SimulationTrace) -> Result<FinalState> {
    let spec = trace.final_spec()?;
    let mut labels = Vec::new();
    for label in Label::ALL {
        let initial = trace.initial.scores(label);
        if initial.is_empty() {
            continue;
        }
        let admitted = trace.admitted.scores(label);
        let (mut k1, mut k2, mut stale) = (0, 0, 0);
        for &x in admitted {
            match spec.region_of(x) {
                RegionKind::Censored => stale += 1,
                RegionKind::Explore => k1 += 1,
                RegionKind::Disclosed => k2 += 1,
            }
        }
        let partition = crate::censored::partition(initial, k1, k2, &spec)?;
        let pooled = EmpiricalCdf::new(initial.iter().chain(admitted).copied().collect())?;
        let reweighted = if stale == 0 {
            Some(ReweightedCdf::new(initial, admitted, &spec)?)
        } else {
            None
        };
        labels.push(LabelEstimate {
            label,
            partition,
            stale,
            pooled,
            reweighted,
        });
    }
    Ok(FinalState {
        theta: spec.theta,
        labels,
    })
}

/// Replays a full trace against its threshold history and coins, checking
/// the admission rule, retraining, censorship of labels, and all tallies.
pub fn audit_trace(trace: &SimulationTrace) -> Result<()> {
    let fail = |msg: String| Err(invalid("trace", msg));
    if trace.detail != TraceDetail::Full {
        return fail("only full traces carry per-arrival records".into());
    }
    let cfg = &trace.config;
    let mut tally = ArrivalTally::default();
    let mut seen = trace.initial.clone();
    let mut admitted = LabeledDataset::default();
    let mut epochs = vec![ThresholdEpoch {
        from: 0,
        theta: trace.thresholds.first().map_or(f64::NAN, |e| e.theta),
    }];
    let horizon = trace.records.len() as u64;
    for (i, r) in trace.records.iter().enumerate() {
        if r.t != i as u64 {
            return fail(format!("record {i} has time {}", r.t));
        }
        let theta = epochs.last().expect("nonempty").theta;
        let region = region_at(r.score, theta, cfg.lb);
        if region != r.region {
            return fail(format!("arrival {i}: region {:?} recorded as {:?}", region, r.region));
        }
        let expect = match region {
            RegionKind::Disclosed => r.coin.is_none(),
            RegionKind::Explore => r.coin.is_some_and(|c| (c < cfg.epsilon) == r.admitted),
            RegionKind::Censored => r.coin.is_none() && !r.admitted,
        };
        if !expect || (region == RegionKind::Disclosed && !r.admitted) {
            return fail(format!("arrival {i}: decision does not follow the admission rule"));
        }
        if r.admitted != r.label.is_some() {
            return fail(format!("arrival {i}: label visibility does not match the decision"));
        }
        match region {
            RegionKind::Censored => tally.censored += 1,
            RegionKind::Explore => tally.explore += 1,
            RegionKind::Disclosed => tally.disclosed += 1,
        }
        if let Some(label) = r.label {
            let s = LabeledScore { score: r.score, label };
            admitted.push(s);
            seen.push(s);
            if region == RegionKind::Explore {
                tally.explore_admitted += 1;
                tally.k1[label.index()] += 1;
            } else {
                tally.k2[label.index()] += 1;
            }
        }
        let t = i as u64 + 1;
        if let Some(b) = cfg.adaptive_batch {
            if t % b == 0 && t < horizon {
                epochs.push(ThresholdEpoch {
                    from: t,
                    theta: optimal_threshold(&seen)?,
                });
            }
        }
    }
    if epochs != trace.thresholds {
        return fail("threshold history does not match retraining replay".into());
    }
    if admitted != trace.admitted {
        return fail("admitted samples do not match the records".into());
    }
    if tally != trace.tally {
        return fail("tallies do not match the records".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(theta: f64, lb: Option<f64>, epsilon: f64, arrivals: u64) -> SimulationConfig {
        SimulationConfig {
            population: Population::Single(TheoreticalCdf::gaussian(7.0, 1.0).unwrap()),
            initial: InitialCounts::Total { n: 50 },
            theta: Some(theta),
            lb,
            epsilon,
            arrivals,
            adaptive_batch: None,
            seed: 4,
        }
    }

    fn bench(arrivals: u64, batch: Option<u64>) -> SimulationConfig {
        SimulationConfig {
            population: Population::Mixture(
                MixtureModel::new(
                    0.5,
                    TheoreticalCdf::gaussian(9.0, 1.0).unwrap(),
                    TheoreticalCdf::gaussian(10.0, 1.0).unwrap(),
                )
                .unwrap(),
            ),
            initial: InitialCounts::PerLabel { n0: 50, n1: 50 },
            theta: None,
            lb: None,
            epsilon: 0.0,
            arrivals,
            adaptive_batch: batch,
            seed: 12,
        }
    }

    #[test]
    fn stage1_fixed_and_learned() {
        let s = run_stage1(&single(7.0, None, 0.0, 0)).unwrap();
        assert_eq!(s.theta, 7.0);
        assert_eq!(s.initial.label1.len(), 50);
        assert_eq!(run_stage1(&single(7.0, None, 0.0, 0)).unwrap(), s);
        let learned = run_stage1(&bench(0, None)).unwrap();
        assert!((learned.theta - 9.5).abs() < 1.0, "{}", learned.theta);
    }

    #[test]
    fn config_validation() {
        let mut c = single(7.0, Some(8.0), 0.1, 0);
        assert!(c.validate().is_err());
        c.lb = Some(6.0);
        c.epsilon = 2.0;
        assert!(c.validate().is_err());
        c.epsilon = 0.5;
        c.initial = InitialCounts::Total { n: 0 };
        assert!(run_stage1(&c).is_err());
        c.initial = InitialCounts::PerLabel { n0: 3, n1: 3 };
        assert!(c.validate().is_err());
        let json = r#"{"population": {"single": {"gaussian": {"mean": 7, "stddev": 1}}},
                       "initial": {"n": 50}, "theta": 7, "lb": 6, "epsilon": 0.5, "arrivals": 200}"#;
        let parsed: SimulationConfig = serde_json::from_str(json).unwrap();
        assert_eq!(parsed.initial_counts(), [0, 50]);
        let typo = json.replace("\"arrivals\"", "\"arrival\"");
        assert!(serde_json::from_str::<SimulationConfig>(&typo).is_err());
    }

    #[test]
    fn no_exploration_below_lb() {
        let mut c = single(100.0, Some(50.0), 0.0, 500);
        c.seed = 1;
        let trace = simulate(&c, TraceDetail::Full).unwrap();
        assert!(trace.admitted.is_empty());
        let f = finalize(&trace).unwrap();
        let p = f.label(Label::One).unwrap().partition;
        assert_eq!((p.k1, p.k2), (0, 0));
        audit_trace(&trace).unwrap();
    }

    #[test]
    fn full_exploration_admits_band() {
        let trace = simulate(&single(7.0, Some(6.0), 1.0, 2000), TraceDetail::Full).unwrap();
        let band = trace.records.iter().filter(|r| r.region == RegionKind::Explore).count() as u64;
        assert_eq!(trace.tally.k1[1], band);
        assert!(trace.records.iter().filter(|r| r.region == RegionKind::Explore).all(|r| r.admitted));
        audit_trace(&trace).unwrap();
    }

    #[test]
    fn finalize_bookkeeping() {
        let c = single(7.0, Some(6.0), 0.5, 200);
        let trace = simulate(&c, TraceDetail::Full).unwrap();
        let f = finalize(&trace).unwrap();
        let est = f.label(Label::One).unwrap();
        assert_eq!(est.partition.total() as usize, est.pooled.len());
        assert!(est.reweighted.is_some());
        let idle = simulate(&single(7.0, None, 0.0, 0), TraceDetail::Full).unwrap();
        let f0 = finalize(&idle).unwrap();
        let e = f0.label(Label::One).unwrap();
        assert_eq!(e.pooled, EmpiricalCdf::from_slice(&idle.initial.label1).unwrap());
    }

    #[test]
    fn adaptive_epochs_and_identity() {
        let plain = simulate(&bench(3000, None), TraceDetail::Full).unwrap();
        let wide = simulate(&bench(3000, Some(3000)), TraceDetail::Full).unwrap();
        assert_eq!(plain.records, wide.records);
        assert_eq!(plain.thresholds, wide.thresholds);
        let adaptive = simulate(&bench(3000, Some(1000)), TraceDetail::Full).unwrap();
        assert_eq!(adaptive.thresholds.len(), 3);
        audit_trace(&adaptive).unwrap();
        assert_eq!(adaptive.theta_at(999), adaptive.thresholds[0].theta);
        assert_eq!(adaptive.theta_at(1000), adaptive.thresholds[1].theta);
    }

    #[test]
    fn summary_matches_full() {
        let full = simulate(&bench(2000, Some(700)), TraceDetail::Full).unwrap();
        let summary = simulate(&bench(2000, Some(700)), TraceDetail::Summary).unwrap();
        assert!(summary.records.is_empty());
        assert_eq!(full.tally, summary.tally);
        assert_eq!(full.admitted, summary.admitted);
        assert!(audit_trace(&summary).is_err());
    }

    #[test]
    fn audit_catches_tampering() {
        let mut trace = simulate(&single(7.0, Some(6.0), 0.5, 300), TraceDetail::Full).unwrap();
        audit_trace(&trace).unwrap();
        let idx = trace.records.iter().position(|r| !r.admitted).unwrap();
        trace.records[idx].label = Some(Label::One);
        assert!(audit_trace(&trace).is_err());
    }

    #[test]
    fn fig3_band_counts_near_expectation() {
        let f = TheoreticalCdf::gaussian(7.0, 3.0).unwrap();
        let c = SimulationConfig {
            population: Population::Single(f.clone()),
            initial: InitialCounts::Total { n: 8000 },
            theta: Some(8.0),
            lb: Some(6.0),
            epsilon: 0.5,
            arrivals: 40_000,
            adaptive_batch: None,
            seed: 1,
        };
        let trace = simulate(&c, TraceDetail::Summary).unwrap();
        let (alpha, beta) = (f.eval(8.0), f.eval(6.0));
        let t = 40_000.0;
        let check = |got: u64, p: f64| {
            let sd = (t * p * (1.0 - p)).sqrt();
            assert!((got as f64 - t * p).abs() < 3.0 * sd, "{got} vs {}", t * p);
        };
        check(trace.tally.k1[1], 0.5 * (alpha - beta));
        check(trace.tally.k2[1], 1.0 - alpha);
    }

    #[test]
    fn trace_json_round_trip() {
        let trace = simulate(&bench(50, Some(20)), TraceDetail::Full).unwrap();
        let json = serde_json::to_string(&trace).unwrap();
        let back: SimulationTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trace);
    }
}
