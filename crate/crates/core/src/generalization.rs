//! Risk of threshold classifiers and the censored generalization bound.
//!
//! A sample with score `x` is admitted (predicted qualified) iff `x >= theta`,
//! so a label-1 sample is misclassified iff `x < theta` and a label-0 sample
//! iff `x >= theta`.

use serde::{Deserialize, Serialize};

use crate::classic::dkw_eta;
use crate::error::{invalid, Error, Result};
use crate::stats::{Label, LabeledScore, MixtureModel, StepCdf};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskPair {
    pub expected: f64,
    pub empirical: f64,
}

impl RiskPair {
    pub fn gap(&self) -> f64 {
        (self.expected - self.empirical).abs()
    }
}

/// Initial training scores split by label.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub label0: Vec<f64>,
    pub label1: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(label0: Vec<f64>, label1: Vec<f64>) -> Result<Self> {
        if label0.iter().chain(&label1).any(|x| !x.is_finite()) {
            return Err(invalid("scores", "must be finite"));
        }
        Ok(Self { label0, label1 })
    }

    pub fn from_labeled(samples: &[LabeledScore]) -> Result<Self> {
        let mut d = Self::default();
        for s in samples {
            d.push(*s);
        }
        Self::new(d.label0, d.label1)
    }

    pub fn push(&mut self, s: LabeledScore) {
        match s.label {
            Label::Zero => self.label0.push(s.score),
            Label::One => self.label1.push(s.score),
        }
    }

    pub fn scores(&self, label: Label) -> &[f64] {
        match label {
            Label::Zero => &self.label0,
            Label::One => &self.label1,
        }
    }

    pub fn count(&self, label: Label) -> usize {
        self.scores(label).len()
    }

    pub fn len(&self) -> usize {
        self.label0.len() + self.label1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `R(theta) = p1 F1(theta) + p0 (1 - F0(theta))`.
pub fn expected_risk(theta: f64, model: &MixtureModel) -> f64 {
    model.p1() * model.cdf(Label::One).eval(theta) + model.p0() * (1.0 - model.cdf(Label::Zero).eval(theta))
}

/// Training error of threshold `theta` by direct counting.
pub fn empirical_risk(theta: f64, data: &LabeledDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    let wrong1 = data.label1.iter().filter(|&&x| x < theta).count();
    let wrong0 = data.label0.iter().filter(|&&x| x >= theta).count();
    Ok((wrong0 + wrong1) as f64 / data.len() as f64)
}

/// `(n1/n) F1_hat(theta-) + (n0/n) (1 - F0_hat(theta-))` for arbitrary
/// per-label CDF estimates, weighted by the initial label counts.
pub fn empirical_risk_from_estimates<S0, S1>(theta: f64, n0: usize, n1: usize, est0: Option<&S0>, est1: Option<&S1>) -> Result<f64>
where
    S0: StepCdf + ?Sized,
    S1: StepCdf + ?Sized,
{
    let n = (n0 + n1) as f64;
    if n == 0.0 {
        return Err(Error::EmptySample);
    }
    let part1 = est1.map_or(0.0, |e| n1 as f64 / n * e.left_limit(theta));
    let part0 = est0.map_or(0.0, |e| n0 as f64 / n * (1.0 - e.left_limit(theta)));
    Ok(part0 + part1)
}

/// Threshold minimizing training error over midpoints between adjacent
/// distinct scores plus the `-inf`/`+inf` sentinels; ties go to the smallest.
pub fn optimal_threshold(data: &LabeledDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut all: Vec<(f64, Label)> = data
        .label0
        .iter()
        .map(|&x| (x, Label::Zero))
        .chain(data.label1.iter().map(|&x| (x, Label::One)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Errors at theta = -inf: every label-0 sample is admitted.
    let mut errors = data.label0.len() as i64;
    let mut best = (errors, f64::NEG_INFINITY);
    let mut i = 0;
    while i < all.len() {
        let x = all[i].0;
        while i < all.len() && all[i].0 == x {
            errors += match all[i].1 {
                Label::Zero => -1,
                Label::One => 1,
            };
            i += 1;
        }
        let candidate = if i < all.len() {
            0.5 * (x + all[i].0)
        } else {
            f64::INFINITY
        };
        if errors < best.0 {
            best = (errors, candidate);
        }
    }
    Ok(best.1)
}

/// Generalization bound assembled from per-label CDF deviation bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenBound {
    pub prior_term: f64,
    /// `min(p_y, n_y/n) * eta_y` for labels 0 and 1.
    pub contributions: [f64; 2],
    pub total: f64,
    pub confidence: f64,
}

/// `3 |p0 - n0/n| + sum_y min(p_y, n_y/n) eta_y`, holding with probability
/// `1 - 2 delta` when each `eta_y` holds with probability `1 - delta`.
pub fn gen_bound(n0: usize, n1: usize, model: &MixtureModel, sup_bounds: [f64; 2], delta: f64) -> Result<GenBound> {
    let n = (n0 + n1) as f64;
    if n == 0.0 {
        return Err(Error::EmptySample);
    }
    if sup_bounds.iter().any(|e| e.is_nan() || *e < 0.0) {
        return Err(invalid("sup_bounds", "must be nonnegative"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid("delta", format!("must lie in [0, 1], got {delta}")));
    }
    let frac = [n0 as f64 / n, n1 as f64 / n];
    let prior_term = 3.0 * (model.p0() - frac[0]).abs();
    let contributions = [
        model.p0().min(frac[0]) * sup_bounds[0],
        model.p1().min(frac[1]) * sup_bounds[1],
    ];
    Ok(GenBound {
        prior_term,
        contributions,
        total: prior_term + contributions[0] + contributions[1],
        confidence: (1.0 - 2.0 * delta).max(0.0),
    })
}

/// The bound with plain DKW deviations `sqrt(ln(2/delta) / (2 n_y))` per label.
pub fn gen_bound_dkw(n0: usize, n1: usize, model: &MixtureModel, delta: f64) -> Result<GenBound> {
    let eta = |c: usize| if c == 0 { Ok(0.0) } else { dkw_eta(c as u64, delta) };
    gen_bound(n0, n1, model, [eta(n0)?, eta(n1)?], delta)
}
