//! CDF error bounds under censored feedback.
//!
//! When labels are only observed for samples admitted by a threshold rule,
//! the labeled data stop being IID and the classic DKW inequality no longer
//! applies. This crate computes region-decomposed DKW-type bounds for that
//! setting (with and without bounded exploration below the threshold), the
//! resulting generalization bounds for threshold classifiers, a simulator of
//! the censored data-collection process, an exploration-policy optimizer, and
//! a Monte Carlo harness that checks every bound empirically.

pub mod error;
pub mod stats;

pub use error::{Error, Result};
pub mod classic;
pub mod censored;
pub mod generalization;
pub mod serde_ext;
pub mod simulator;
pub mod explore;
pub mod multivariate;
pub mod verify;
pub mod reproduce;
