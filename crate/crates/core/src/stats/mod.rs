//! Distributions, empirical CDFs, seeded sampling and sup-deviation.

pub mod dist;
pub mod ecdf;
pub mod mixture;
pub mod rng;

pub use dist::{gaussian_cdf, std_normal_cdf, std_normal_quantile, Cdf, Gaussian, PiecewiseTable, RestrictedCdf, TheoreticalCdf};
pub use ecdf::{sup_deviation, EmpiricalCdf, Interval, StepCdf, WeightedStepCdf};
pub use mixture::{sample_labeled, sample_scores, Label, LabeledScore, MixtureModel};
pub use rng::{replication_seed, splitmix64, SeededRng};
