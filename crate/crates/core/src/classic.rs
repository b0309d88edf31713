//! Classical IID baselines: DKW and its inverse, Glivenko–Cantelli, VC,
//! Hoeffding and the multivariate DKW constant.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Output of a probability bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// Formula value; may exceed 1.
    pub raw: f64,
    /// `min(raw, 1)`.
    pub probability: f64,
    /// Some term's validity precondition failed and was replaced by 1.
    pub trivial: bool,
    /// Textbook stand-in for a benchmark whose exact constants are not pinned down.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate: bool,
}

impl BoundValue {
    pub fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            probability: raw.min(1.0),
            trivial: false,
            approximate: false,
        }
    }

    pub fn trivial() -> Self {
        Self {
            raw: 1.0,
            probability: 1.0,
            trivial: true,
            approximate: false,
        }
    }

    fn approximate(mut self) -> Self {
        self.approximate = true;
        self
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(invalid("n", "must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 {
        Ok(())
    } else {
        Err(invalid("eta", format!("must be positive, got {eta}")))
    }
}

/// `2 exp(-2 n eta^2)`.
pub fn dkw_bound(n: u64, eta: f64) -> Result<BoundValue> {
    check_n(n)?;
    check_eta(eta)?;
    Ok(BoundValue::from_raw((2f64.ln() - 2.0 * n as f64 * eta * eta).exp()))
}

/// Smallest `eta` with `dkw_bound(n, eta) <= delta`: `sqrt(ln(2/delta) / (2n))`.
pub fn dkw_eta(n: u64, delta: f64) -> Result<f64> {
    check_n(n)?;
    if !(delta > 0.0) {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    if delta >= 2.0 {
        return Ok(0.0);
    }
    Ok(((2.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

/// `8 (n+1) exp(-n eta^2 / 32)`.
pub fn gc_bound(n: u64, eta: f64) -> Result<BoundValue> {
    vc_bound(n, eta, 1)
}

/// `8 (n+1)^d exp(-n eta^2 / 32)`, evaluated in log space.
pub fn vc_bound(n: u64, eta: f64, d: u32) -> Result<BoundValue> {
    check_n(n)?;
    check_eta(eta)?;
    if d == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    let nf = n as f64;
    let log = 8f64.ln() + d as f64 * (nf + 1.0).ln() - nf * eta * eta / 32.0;
    Ok(BoundValue::from_raw(log.exp()))
}

/// Fixed-hypothesis Hoeffding form `2 exp(-2 n eta^2)`, marked approximate.
pub fn hoeffding_bound(n: u64, eta: f64) -> Result<BoundValue> {
    Ok(dkw_bound(n, eta)?.approximate())
}

/// `2 dim exp(-2 n eta^2)`.
pub fn multivariate_dkw_bound(n: u64, eta: f64, dim: u32) -> Result<BoundValue> {
    check_n(n)?;
    check_eta(eta)?;
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    let log = (2.0 * dim as f64).ln() - 2.0 * n as f64 * eta * eta;
    Ok(BoundValue::from_raw(log.exp()))
}

/// Benchmark uniform-deviation bounds used for generalization comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Gc,
    Vc { d: u32 },
    Hoeffding,
}

impl Benchmark {
    pub fn name(&self) -> String {
        match self {
            Benchmark::Gc => "gc".into(),
            Benchmark::Vc { d } => format!("vc_d{d}"),
            Benchmark::Hoeffding => "hoeffding".into(),
        }
    }

    pub fn bound(&self, n: u64, eta: f64) -> Result<BoundValue> {
        match *self {
            Benchmark::Gc => gc_bound(n, eta),
            Benchmark::Vc { d } => vc_bound(n, eta, d),
            Benchmark::Hoeffding => hoeffding_bound(n, eta),
        }
    }

    /// Closed-form inverse: smallest `eta` with `bound(n, eta).raw <= delta`.
    pub fn eta(&self, n: u64, delta: f64) -> Result<f64> {
        check_n(n)?;
        if !(delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        let nf = n as f64;
        let log_lead = match *self {
            Benchmark::Gc => 8f64.ln() + (nf + 1.0).ln(),
            Benchmark::Vc { d } => 8f64.ln() + d as f64 * (nf + 1.0).ln(),
            Benchmark::Hoeffding => return dkw_eta(n, delta),
        };
        Ok((32.0 * (log_lead - delta.ln()).max(0.0) / nf).sqrt())
    }
}
