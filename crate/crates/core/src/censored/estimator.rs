use serde::{Deserialize, Serialize};

use super::{region_masses, RegionCounts, RegionKind, RegionPartition, RegionSpec};
use crate::error::{invalid, Result};
use crate::stats::{StepCdf, WeightedStepCdf};

/// CDF estimate after censored collection.
///
/// Censored initial samples keep weight `1/n`. The exploration and disclosed
/// regions receive total masses `w` and `v` from [`region_masses`], spread
/// evenly over the samples (initial and admitted) that fall in them. With no
/// admissions this is the ordinary empirical CDF of the initial sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReweightedCdf {
    steps: WeightedStepCdf,
    partition: RegionPartition,
}

impl ReweightedCdf {
    /// `admitted` holds new labeled samples; all must lie at or above the
    /// exploration lower bound (or `theta` without exploration).
    pub fn new(initial: &[f64], admitted: &[f64], spec: &RegionSpec) -> Result<Self> {
        let mut k1 = 0u64;
        let mut k2 = 0u64;
        for &x in admitted {
            match spec.region_of(x) {
                RegionKind::Censored => {
                    return Err(invalid("admitted", format!("score {x} lies in the censored region")))
                }
                RegionKind::Explore => k1 += 1,
                RegionKind::Disclosed => k2 += 1,
            }
        }
        let partition = super::partition(initial, k1, k2, spec)?;
        // Without exploration the exploration region is empty and `l = m`.
        let counts = RegionCounts {
            l: if spec.lb.is_some() { partition.l as f64 } else { partition.m as f64 },
            ..RegionCounts::from(&partition)
        };
        let (w, v) = region_masses(&counts, spec.epsilon);
        let explore_count = counts.m - counts.l + counts.k1;
        let disclosed_count = counts.n - counts.m + counts.k2;
        let n = counts.n;
        let weight = |x: f64| match spec.region_of(x) {
            RegionKind::Censored => 1.0 / n,
            RegionKind::Explore => w / explore_count,
            RegionKind::Disclosed => v / disclosed_count,
        };
        let pairs = initial
            .iter()
            .chain(admitted)
            .map(|&x| (x, weight(x)))
            .collect();
        Ok(Self {
            steps: WeightedStepCdf::new(pairs)?,
            partition,
        })
    }

    pub fn partition(&self) -> &RegionPartition {
        &self.partition
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.steps.eval(x)
    }
}

impl StepCdf for ReweightedCdf {
    fn value(&self, x: f64) -> f64 {
        self.steps.value(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        self.steps.left_limit(x)
    }

    fn jumps(&self) -> &[f64] {
        self.steps.jumps()
    }
}
