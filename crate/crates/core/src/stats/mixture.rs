//! Two-label populations and labeled sampling.

use serde::{Deserialize, Serialize};

use super::dist::TheoreticalCdf;
use super::rng::SeededRng;
use crate::error::{invalid, Error, Result};

/// Binary outcome label (1 = qualified).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Zero, Label::One];

    pub fn index(self) -> usize {
        match self {
            Label::Zero => 0,
            Label::One => 1,
        }
    }
}

impl TryFrom<u8> for Label {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Label::Zero),
            1 => Ok(Label::One),
            other => Err(invalid("label", format!("must be 0 or 1, got {other}"))),
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l.index() as u8
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub score: f64,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureFields")]
pub struct MixtureModel {
    p1: f64,
    cdf0: TheoreticalCdf,
    cdf1: TheoreticalCdf,
}

#[derive(Deserialize)]
struct MixtureFields {
    p1: f64,
    cdf0: TheoreticalCdf,
    cdf1: TheoreticalCdf,
}

impl TryFrom<MixtureFields> for MixtureModel {
    type Error = Error;

    fn try_from(f: MixtureFields) -> Result<Self> {
        MixtureModel::new(f.p1, f.cdf0, f.cdf1)
    }
}

impl MixtureModel {
    pub fn new(p1: f64, cdf0: TheoreticalCdf, cdf1: TheoreticalCdf) -> Result<Self> {
        if !(p1 > 0.0 && p1 < 1.0) {
            return Err(invalid("p1", format!("must lie in (0, 1), got {p1}")));
        }
        Ok(Self { p1, cdf0, cdf1 })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p0(&self) -> f64 {
        1.0 - self.p1
    }

    pub fn prior(&self, label: Label) -> f64 {
        match label {
            Label::Zero => self.p0(),
            Label::One => self.p1,
        }
    }

    pub fn cdf(&self, label: Label) -> &TheoreticalCdf {
        match label {
            Label::Zero => &self.cdf0,
            Label::One => &self.cdf1,
        }
    }

    /// One labeled draw: Bernoulli(p1) label, then an inverse-CDF score.
    pub fn draw(&self, rng: &mut SeededRng) -> LabeledScore {
        let label = if rng.uniform() < self.p1 {
            Label::One
        } else {
            Label::Zero
        };
        LabeledScore {
            score: self.cdf(label).quantile(rng.open_uniform()),
            label,
        }
    }
}

pub fn sample_labeled(model: &MixtureModel, count: usize, rng: &mut SeededRng) -> Vec<LabeledScore> {
    (0..count).map(|_| model.draw(rng)).collect()
}

/// IID inverse-CDF draws from a single distribution.
pub fn sample_scores(cdf: &TheoreticalCdf, count: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..count).map(|_| cdf.quantile(rng.open_uniform())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::dist::Cdf;
    use crate::stats::ecdf::{sup_deviation, EmpiricalCdf, Interval};

    fn model() -> MixtureModel {
        MixtureModel::new(
            0.5,
            TheoreticalCdf::gaussian(9.0, 1.0).unwrap(),
            TheoreticalCdf::gaussian(10.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_and_deterministic() {
        let m = model();
        assert!(sample_labeled(&m, 0, &mut SeededRng::new(1, 0)).is_empty());
        let a = sample_labeled(&m, 100, &mut SeededRng::new(5, 0));
        let b = sample_labeled(&m, 100, &mut SeededRng::new(5, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn label_fraction_within_three_sigma() {
        let draws = sample_labeled(&model(), 100_000, &mut SeededRng::new(9, 0));
        let ones = draws.iter().filter(|d| d.label == Label::One).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01, "{ones}");
    }

    #[test]
    fn rejects_bad_prior() {
        let c = TheoreticalCdf::gaussian(0.0, 1.0).unwrap();
        assert!(MixtureModel::new(0.0, c.clone(), c.clone()).is_err());
        assert!(MixtureModel::new(1.0, c.clone(), c).is_err());
        assert!(Label::try_from(2).is_err());
    }

    #[test]
    fn inverse_cdf_sampling_passes_ks() {
        // 1% critical value of the one-sample KS statistic for n = 10^4.
        let crit = 1.6276 / 100.0;
        let f = TheoreticalCdf::gaussian(3.0, 2.0).unwrap();
        let passed = (0..100u64)
            .filter(|&trial| {
                let draws = sample_scores(&f, 10_000, &mut SeededRng::new(trial, 17));
                let e = EmpiricalCdf::new(draws).unwrap();
                sup_deviation(&f, &e, Interval::full()).unwrap() < crit
            })
            .count();
        assert!(passed >= 98, "{passed}/100");
        assert!(f.left_limit(3.0) == 0.5);
    }
}
