//! CDF error bounds under censored feedback.
//!
//! The score axis is split at the decision threshold `theta` (and optionally
//! at an exploration lower bound `lb < theta`) into a censored region, an
//! exploration region `[lb, theta)` and a disclosed region `[theta, inf)`.
//! Each region contributes one DKW-type term whose exponent is shifted by the
//! estimation error of the region's mass and rescaled by that mass.

mod estimator;
mod monotonicity;

pub use estimator::ReweightedCdf;
pub use monotonicity::{check_prop1, check_prop2, prop1_min_growth, MonotonicityReport, Prop1Config, Prop2Config, SweepPoint};

use serde::{Deserialize, Serialize};

use crate::classic::BoundValue;
use crate::error::{invalid, Result};
use crate::stats::TheoreticalCdf;

/// Threshold geometry of one data-collection round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionSpecFields")]
pub struct RegionSpec {
    pub theta: f64,
    pub lb: Option<f64>,
    pub epsilon: f64,
}

#[derive(Deserialize)]
struct RegionSpecFields {
    theta: f64,
    #[serde(default)]
    lb: Option<f64>,
    #[serde(default)]
    epsilon: f64,
}

impl TryFrom<RegionSpecFields> for RegionSpec {
    type Error = crate::Error;

    fn try_from(f: RegionSpecFields) -> Result<Self> {
        RegionSpec::new(f.theta, f.lb, f.epsilon)
    }
}

impl RegionSpec {
    pub fn new(theta: f64, lb: Option<f64>, epsilon: f64) -> Result<Self> {
        if theta.is_nan() {
            return Err(invalid("theta", "must not be NaN"));
        }
        if let Some(lb) = lb {
            if lb.is_nan() || lb >= theta {
                return Err(invalid("lb", format!("must be below theta ({theta}), got {lb}")));
            }
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(invalid("epsilon", format!("must lie in [0, 1], got {epsilon}")));
        }
        Ok(Self { theta, lb, epsilon })
    }

    /// No exploration: admit iff `score >= theta`.
    pub fn threshold(theta: f64) -> Result<Self> {
        Self::new(theta, None, 0.0)
    }

    pub fn region_of(&self, score: f64) -> RegionKind {
        if score >= self.theta {
            RegionKind::Disclosed
        } else if self.lb.is_some_and(|lb| score >= lb) {
            RegionKind::Explore
        } else {
            RegionKind::Censored
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Censored,
    Explore,
    Disclosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassSource {
    TheoreticalGiven,
    PlugIn,
}

/// Region masses `alpha = F(theta)` and `beta = F(lb)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassSpec {
    pub alpha: f64,
    pub beta: f64,
    pub source: MassSource,
}

impl MassSpec {
    pub fn theoretical(alpha: f64, beta: f64) -> Result<Self> {
        let m = Self {
            alpha,
            beta,
            source: MassSource::TheoreticalGiven,
        };
        m.validate()?;
        Ok(m)
    }

    /// `alpha := m/n`, `beta := l/n`.
    pub fn plug_in(part: &RegionPartition) -> Self {
        let n = part.n as f64;
        Self {
            alpha: part.m as f64 / n,
            beta: part.l as f64 / n,
            source: MassSource::PlugIn,
        }
    }

    pub fn from_cdf(cdf: &TheoreticalCdf, spec: &RegionSpec) -> Self {
        Self {
            alpha: cdf.eval(spec.theta),
            beta: spec.lb.map_or(0.0, |lb| cdf.eval(lb)),
            source: MassSource::TheoreticalGiven,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid("alpha", format!("must lie in [0, 1], got {}", self.alpha)));
        }
        if !(0.0..=self.alpha).contains(&self.beta) {
            return Err(invalid("beta", format!("must lie in [0, alpha], got {}", self.beta)));
        }
        Ok(())
    }
}

/// Sample counts per region. `k2` is the number of new samples at or above
/// `theta`; the two-region formulas call it `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionPartition {
    pub n: u64,
    pub m: u64,
    pub l: u64,
    pub k1: u64,
    pub k2: u64,
}

impl RegionPartition {
    pub fn new(n: u64, m: u64, l: u64, k1: u64, k2: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if m > n || l > m {
            return Err(invalid("partition", format!("need l <= m <= n, got l={l}, m={m}, n={n}")));
        }
        Ok(Self { n, m, l, k1, k2 })
    }

    /// Two-region partition: no exploration, `k` new disclosed samples.
    pub fn two_region(n: u64, m: u64, k: u64) -> Result<Self> {
        Self::new(n, m, 0, 0, k)
    }

    pub fn k(&self) -> u64 {
        self.k2
    }

    /// Samples behind the final estimate: `n + k1 + k2`.
    pub fn total(&self) -> u64 {
        self.n + self.k1 + self.k2
    }
}

/// Real-valued counterpart of [`RegionPartition`], used when counts are
/// expectations rather than realizations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCounts {
    pub n: f64,
    pub m: f64,
    pub l: f64,
    pub k1: f64,
    pub k2: f64,
}

impl From<&RegionPartition> for RegionCounts {
    fn from(p: &RegionPartition) -> Self {
        Self {
            n: p.n as f64,
            m: p.m as f64,
            l: p.l as f64,
            k1: p.k1 as f64,
            k2: p.k2 as f64,
        }
    }
}

impl From<RegionPartition> for RegionCounts {
    fn from(p: RegionPartition) -> Self {
        (&p).into()
    }
}

impl RegionCounts {
    fn validate(&self) -> Result<()> {
        let all = [self.n, self.m, self.l, self.k1, self.k2];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("counts", "must be finite and nonnegative"));
        }
        if self.n <= 0.0 {
            return Err(invalid("n", "must be positive"));
        }
        if self.m > self.n || self.l > self.m {
            return Err(invalid("counts", "need l <= m <= n"));
        }
        Ok(())
    }
}

/// Counts initial samples by strict comparison (`x < theta` is censored).
pub fn partition(initial: &[f64], new_in_explore: u64, new_above: u64, spec: &RegionSpec) -> Result<RegionPartition> {
    if initial.is_empty() {
        return Err(crate::Error::EmptySample);
    }
    if spec.lb.is_none() && new_in_explore > 0 {
        return Err(invalid("new_in_explore", "requires an exploration lower bound"));
    }
    let m = initial.iter().filter(|&&x| x < spec.theta).count() as u64;
    let l = spec
        .lb
        .map_or(0, |lb| initial.iter().filter(|&&x| x < lb).count() as u64);
    RegionPartition::new(initial.len() as u64, m, l, new_in_explore, new_above)
}

/// One region's contribution to a bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub region: RegionKind,
    pub count: f64,
    pub shift: f64,
    pub scale: f64,
    pub value: f64,
    pub trivial: bool,
}

impl Term {
    /// `lead * exp(-2 count (eta - shift)^2 / scale^2)`, with the validity
    /// fallback (1 when `eta <= shift`) and the empty-region convention (0 when
    /// the region has zero scale).
    fn new(region: RegionKind, lead: f64, count: f64, shift: f64, scale: f64, eta: f64) -> Self {
        let gap = eta - shift;
        let (value, trivial) = if gap <= 0.0 {
            (1.0, true)
        } else if scale <= 0.0 {
            (0.0, false)
        } else {
            (lead * (-2.0 * count * gap * gap / (scale * scale)).exp(), false)
        };
        Self {
            region,
            count,
            shift,
            scale,
            value,
            trivial,
        }
    }

    pub fn to_bound(&self) -> BoundValue {
        if self.trivial {
            BoundValue::trivial()
        } else {
            BoundValue::from_raw(self.value)
        }
    }
}

pub fn combine(terms: &[Term]) -> BoundValue {
    let raw: f64 = terms.iter().map(|t| t.value).sum();
    BoundValue {
        raw,
        probability: raw.min(1.0),
        trivial: terms.iter().any(|t| t.trivial),
        approximate: false,
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 {
        Ok(())
    } else {
        Err(invalid("eta", format!("must be positive, got {eta}")))
    }
}

/// Censored and disclosed terms of the two-region bound with leading
/// constant `lead` (2 in one dimension).
pub fn two_region_terms(counts: impl Into<RegionCounts>, alpha: f64, eta: f64, lead: f64) -> Result<[Term; 2]> {
    let c = counts.into();
    c.validate()?;
    MassSpec::theoretical(alpha, 0.0)?;
    check_eta(eta)?;
    let frac = c.m / c.n;
    let u = (alpha - frac).abs();
    Ok([
        Term::new(RegionKind::Censored, lead, c.m, u, alpha.min(frac), eta),
        Term::new(
            RegionKind::Disclosed,
            lead,
            c.n - c.m + c.k2,
            2.0 * u,
            (1.0 - alpha).min((c.n - c.m) / c.n),
            eta,
        ),
    ])
}

/// Total mass the reweighted estimator assigns to the exploration and
/// disclosed regions: `((n-l)/n * (m-l+k1)/D, (n-l)/n * (n-m+eps k2)/D)` with
/// `D = n-l+k1+eps k2`.
pub fn region_masses(counts: &RegionCounts, epsilon: f64) -> (f64, f64) {
    let c = counts;
    let denom = c.n - c.l + c.k1 + epsilon * c.k2;
    if denom <= 0.0 {
        return (0.0, 0.0);
    }
    let outer = (c.n - c.l) / c.n;
    (
        outer * (c.m - c.l + c.k1) / denom,
        outer * (c.n - c.m + epsilon * c.k2) / denom,
    )
}

/// Censored, exploration and disclosed terms of the three-region bound.
pub fn three_region_terms(
    counts: impl Into<RegionCounts>,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    eta: f64,
    lead: f64,
) -> Result<[Term; 3]> {
    let c = counts.into();
    c.validate()?;
    MassSpec::theoretical(alpha, beta)?;
    check_eta(eta)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid("epsilon", format!("must lie in [0, 1], got {epsilon}")));
    }
    let (w, v) = region_masses(&c, epsilon);
    let below = c.l / c.n;
    let s1 = (beta - below).abs();
    Ok([
        Term::new(RegionKind::Censored, lead, c.l, s1, beta.min(below), eta),
        Term::new(
            RegionKind::Explore,
            lead,
            c.m - c.l + c.k1,
            s1 + (alpha - beta - w).abs(),
            (alpha - beta).min(w),
            eta,
        ),
        Term::new(
            RegionKind::Disclosed,
            lead,
            c.n - c.m + c.k2,
            2.0 * (alpha - below - w).abs(),
            (1.0 - alpha).min(v),
            eta,
        ),
    ])
}

/// Censored-region term: `2 exp(-2m (eta - |alpha - m/n|)^2 / min(alpha, m/n)^2)`.
pub fn censored_term(part: &RegionPartition, mass: &MassSpec, eta: f64) -> Result<BoundValue> {
    Ok(two_region_terms(part, mass.alpha, eta, 2.0)?[0].to_bound())
}

/// Disclosed-region term:
/// `2 exp(-2(n-m+k) (eta - 2|alpha - m/n|)^2 / min(1-alpha, (n-m)/n)^2)`.
pub fn disclosed_term(part: &RegionPartition, mass: &MassSpec, eta: f64) -> Result<BoundValue> {
    Ok(two_region_terms(part, mass.alpha, eta, 2.0)?[1].to_bound())
}

/// Two-region bound on `P(sup |F - F_{n+k}| >= eta)`.
pub fn bound_two_region(counts: impl Into<RegionCounts>, mass: &MassSpec, eta: f64) -> Result<BoundValue> {
    Ok(combine(&two_region_terms(counts, mass.alpha, eta, 2.0)?))
}

/// A-priori bound: the disclosed term averaged over `k ~ Binomial(T, 1-alpha)`.
/// The partition's `k` is ignored.
pub fn bound_two_region_apriori(part: &RegionPartition, mass: &MassSpec, eta: f64, wait: u64) -> Result<BoundValue> {
    let base = RegionCounts {
        k2: 0.0,
        ..RegionCounts::from(part)
    };
    let [censored, _] = two_region_terms(base, mass.alpha, eta, 2.0)?;
    let p = 1.0 - mass.alpha;
    let mut expected = 0.0;
    let mut trivial = false;
    for k in 0..=wait {
        let weight = binomial_pmf(wait, k, p);
        if weight < 1e-15 {
            continue;
        }
        let counts = RegionCounts { k2: k as f64, ..base };
        let [_, disclosed] = two_region_terms(counts, mass.alpha, eta, 2.0)?;
        trivial |= disclosed.trivial;
        expected += weight * disclosed.value;
    }
    let raw = censored.value + expected;
    Ok(BoundValue {
        raw,
        probability: raw.min(1.0),
        trivial: trivial || censored.trivial,
        approximate: false,
    })
}

/// `C(t, k) p^k (1-p)^(t-k)` evaluated in log space.
pub fn binomial_pmf(t: u64, k: u64, p: f64) -> f64 {
    if k > t {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == t { 1.0 } else { 0.0 };
    }
    let (tf, kf) = (t as f64, k as f64);
    let log_choose = libm::lgamma(tf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(tf - kf + 1.0);
    (log_choose + kf * p.ln() + (tf - kf) * (1.0 - p).ln()).exp()
}

/// Three-region bound with exploration probability `epsilon` below `theta`.
pub fn bound_three_region(counts: impl Into<RegionCounts>, mass: &MassSpec, epsilon: f64, eta: f64) -> Result<BoundValue> {
    Ok(combine(&three_region_terms(counts, mass.alpha, mass.beta, epsilon, eta, 2.0)?))
}

/// Largest shift among the two-region terms: below it the bound is trivial.
pub fn two_region_edge(counts: impl Into<RegionCounts>, alpha: f64) -> f64 {
    let c = counts.into();
    2.0 * (alpha - c.m / c.n).abs()
}

pub fn three_region_edge(counts: impl Into<RegionCounts>, alpha: f64, beta: f64, epsilon: f64) -> f64 {
    let c = counts.into();
    let (w, _) = region_masses(&c, epsilon);
    let below = c.l / c.n;
    let s1 = (beta - below).abs();
    s1.max(s1 + (alpha - beta - w).abs()).max(2.0 * (alpha - below - w).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum EtaSolution {
    Reached { eta: f64 },
    /// Even `eta = 1` leaves the bound above `delta`; `floor` is its value there.
    Unreachable { floor: f64 },
}

impl EtaSolution {
    pub fn eta(&self) -> Option<f64> {
        match *self {
            EtaSolution::Reached { eta } => Some(eta),
            EtaSolution::Unreachable { .. } => None,
        }
    }
}

/// Smallest `eta` in `(edge, 1]` with `bound(eta).probability <= delta`, by
/// bisection. `edge` is where the bound stops being trivial.
pub fn eta_for_confidence<F>(bound: F, delta: f64, edge: f64) -> Result<EtaSolution>
where
    F: Fn(f64) -> Result<BoundValue>,
{
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    let top = bound(1.0)?.probability;
    if top > delta {
        return Ok(EtaSolution::Unreachable { floor: top });
    }
    let mut lo = edge.clamp(0.0, 1.0);
    let mut hi = 1.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bound(mid)?.probability <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EtaSolution::Reached { eta: hi })
}

pub fn eta_two_region(counts: impl Into<RegionCounts>, mass: &MassSpec, delta: f64) -> Result<EtaSolution> {
    let c = counts.into();
    eta_for_confidence(|e| bound_two_region(c, mass, e), delta, two_region_edge(c, mass.alpha))
}

pub fn eta_three_region(counts: impl Into<RegionCounts>, mass: &MassSpec, epsilon: f64, delta: f64) -> Result<EtaSolution> {
    let c = counts.into();
    eta_for_confidence(
        |e| bound_three_region(c, mass, epsilon, e),
        delta,
        three_region_edge(c, mass.alpha, mass.beta, epsilon),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::{dkw_bound, dkw_eta};
    use proptest::prelude::*;

    fn mass(alpha: f64) -> MassSpec {
        MassSpec::theoretical(alpha, 0.0).unwrap()
    }

    #[test]
    fn partition_counts_strictly() {
        let spec = RegionSpec::new(7.0, Some(6.0), 0.5).unwrap();
        let p = partition(&[5.0, 6.0, 6.5, 7.0, 8.0], 3, 4, &spec).unwrap();
        assert_eq!(p, RegionPartition::new(5, 3, 1, 3, 4).unwrap());
        let none = partition(&[8.0, 9.0], 0, 0, &RegionSpec::threshold(7.0).unwrap()).unwrap();
        assert_eq!(none.m, 0);
        assert!(RegionSpec::new(7.0, Some(7.0), 0.0).is_err());
        assert!(RegionSpec::new(7.0, None, 1.5).is_err());
        assert!(partition(&[], 0, 0, &spec).is_err());
        assert!(partition(&[1.0], 2, 0, &RegionSpec::threshold(7.0).unwrap()).is_err());
    }

    #[test]
    fn censored_term_values() {
        let part = RegionPartition::two_region(50, 24, 0).unwrap();
        let t = censored_term(&part, &mass(0.5), 0.3).unwrap();
        // mpmath: 2 exp(-48 * 0.28^2 / 0.48^2)
        assert!((t.raw - 1.612_699_524_544_821_8e-7).abs() < 1e-20, "{}", t.raw);
        let empty = RegionPartition::two_region(50, 0, 0).unwrap();
        let zero = censored_term(&empty, &mass(0.0), 0.3).unwrap();
        assert_eq!(zero.raw, 0.0);
        assert!(!zero.trivial);
        let edge = censored_term(&part, &mass(0.5), 0.02).unwrap();
        assert!(edge.trivial);
        assert_eq!(edge.probability, 1.0);
    }

    #[test]
    fn disclosed_term_values() {
        let part = RegionPartition::two_region(50, 24, 0).unwrap();
        let t = disclosed_term(&part, &mass(0.5), 0.3).unwrap();
        // mpmath: 2 exp(-52 * 0.26^2 / 0.5^2)
        assert!((t.raw - 1.564_956_046_859_966_1e-6).abs() < 1e-18, "{}", t.raw);
        let exact = RegionPartition::two_region(50, 25, 10).unwrap();
        let z = disclosed_term(&exact, &mass(0.5), 0.2).unwrap();
        let want = 2.0 * (-2.0 * 35.0 * 0.04 / 0.25f64).exp();
        assert!((z.raw - want).abs() < 1e-15);
        let shifted = disclosed_term(&part, &mass(0.5), 0.04).unwrap();
        assert!(shifted.trivial);
    }

    #[test]
    fn dkw_recovery() {
        for (n, k, eta) in [(50u64, 0u64, 0.2), (10, 300, 0.05), (1, 1, 0.9)] {
            let part = RegionPartition::two_region(n, 0, k).unwrap();
            let b = bound_two_region(&part, &mass(0.0), eta).unwrap();
            let d = dkw_bound(n + k, eta).unwrap().raw;
            assert!((b.raw - d).abs() <= 1e-15 * d);
        }
    }

    #[test]
    fn trivial_when_shift_dominates() {
        let part = RegionPartition::two_region(50, 20, 5).unwrap();
        let b = bound_two_region(&part, &mass(0.5), 0.15).unwrap();
        assert!(b.trivial);
        assert_eq!(b.probability, 1.0);
    }

    fn enumerate_apriori(n: u64, m: u64, alpha: f64, eta: f64, t: u64) -> f64 {
        // Direct binomial coefficients by multiplication.
        let part = RegionPartition::two_region(n, m, 0).unwrap();
        let censored = censored_term(&part, &mass(alpha), eta).unwrap().raw;
        let mut total = 0.0;
        let mut choose = 1.0;
        for k in 0..=t {
            if k > 0 {
                choose = choose * (t - k + 1) as f64 / k as f64;
            }
            let w = choose * (1.0 - alpha).powi(k as i32) * alpha.powi((t - k) as i32);
            let p = RegionPartition::two_region(n, m, k).unwrap();
            total += w * disclosed_term(&p, &mass(alpha), eta).unwrap().raw;
        }
        censored + total
    }

    #[test]
    fn apriori_matches_enumeration() {
        let part = RegionPartition::two_region(50, 24, 0).unwrap();
        let got = bound_two_region_apriori(&part, &mass(0.5), 0.35, 10).unwrap().raw;
        assert!((got - enumerate_apriori(50, 24, 0.5, 0.35, 10)).abs() < 1e-12);
        let t0 = bound_two_region_apriori(&part, &mass(0.5), 0.35, 0).unwrap();
        assert_eq!(t0, bound_two_region(&part, &mass(0.5), 0.35).unwrap());
        for t in [0u64, 3, 17, 20] {
            let sum: f64 = (0..=t).map(|k| binomial_pmf(t, k, 0.37)).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn three_region_reductions() {
        let part = RegionPartition::new(100, 0, 0, 30, 20).unwrap();
        let terms = three_region_terms(&part, 0.0, 0.0, 0.4, 0.2, 2.0).unwrap();
        assert_eq!(terms[0].value, 0.0);
        // l = m, beta = alpha, k1 = 0 reproduces the two-region terms.
        let three = RegionPartition::new(80, 30, 30, 0, 40).unwrap();
        let two = RegionPartition::two_region(80, 30, 40).unwrap();
        let alpha = 0.4;
        let b3 = bound_three_region(&three, &MassSpec::theoretical(alpha, alpha).unwrap(), 0.7, 0.3).unwrap();
        let b2 = bound_two_region(&two, &mass(alpha), 0.3).unwrap();
        assert!((b3.raw - b2.raw).abs() < 1e-12);
    }

    #[test]
    fn eta_inversion() {
        let dkw = eta_for_confidence(|e| dkw_bound(50, e), 0.05, 0.0).unwrap();
        assert!((dkw.eta().unwrap() - dkw_eta(50, 0.05).unwrap()).abs() < 1e-9);
        // A sizeable censored region cannot be pushed below a tiny delta.
        let part = RegionPartition::two_region(50, 1, 0).unwrap();
        let floor = eta_two_region(&part, &mass(0.02), 0.5).unwrap();
        assert!(floor.eta().is_some());
        let part = RegionPartition::two_region(3, 1, 0).unwrap();
        let unreachable = eta_two_region(&part, &mass(0.9), 1e-9).unwrap();
        assert!(matches!(unreachable, EtaSolution::Unreachable { .. }));
        assert!(eta_for_confidence(|e| dkw_bound(50, e), 1.5, 0.0).is_err());
    }

    #[test]
    fn eta_inversion_matches_grid_scan() {
        let part = RegionPartition::new(50, 25, 8, 12, 95).unwrap();
        let m = MassSpec::theoretical(0.5, 0.158_655_253_931_457_05).unwrap();
        let eta = eta_three_region(&part, &m, 0.5, 0.015).unwrap().eta().unwrap();
        let grid = (1..=1_000_000)
            .map(|i| i as f64 * 1e-6)
            .find(|&e| bound_three_region(&part, &m, 0.5, e).unwrap().probability <= 0.015)
            .unwrap();
        assert!(eta <= grid && grid - eta <= 1e-6 + 1e-12, "{eta} vs {grid}");
    }

    #[test]
    fn fig3_exploration_saturates() {
        // Exact-mass partition, expected arrival counts.
        let f = TheoreticalCdf::gaussian(7.0, 3.0).unwrap();
        let spec = RegionSpec::new(8.0, Some(6.0), 0.2).unwrap();
        let m = MassSpec::from_cdf(&f, &spec);
        let (n, t) = (8000.0, 40_000.0);
        let counts = RegionCounts {
            n,
            m: (n * m.alpha).round(),
            l: (n * m.beta).round(),
            k1: 0.2 * t * (m.alpha - m.beta),
            k2: t * (1.0 - m.alpha),
        };
        let explore = bound_three_region(counts, &m, 0.2, 0.015).unwrap().probability;
        let at_lb = RegionCounts {
            m: counts.l,
            l: 0.0,
            k1: 0.0,
            k2: t * (1.0 - m.beta),
            ..counts
        };
        let lb_bound = bound_two_region(at_lb, &MassSpec::theoretical(m.beta, 0.0).unwrap(), 0.015)
            .unwrap()
            .probability;
        assert!((explore - lb_bound).abs() < 0.02, "{explore} vs {lb_bound}");
    }

    fn arb_counts() -> impl Strategy<Value = (u64, u64, u64, f64)> {
        (1u64..5000).prop_flat_map(|n| (Just(n), 0..=n, 0u64..20_000, 0.0f64..=1.0))
    }

    proptest! {
        #[test]
        fn dkw_recovery_random((n, _m, k, _a) in arb_counts(), eta in 1e-3f64..1.0) {
            let part = RegionPartition::two_region(n, 0, k).unwrap();
            let b = bound_two_region(&part, &mass(0.0), eta).unwrap();
            let d = dkw_bound(n + k, eta).unwrap();
            prop_assert!((b.raw - d.raw).abs() <= 1e-12);
        }

        #[test]
        fn three_reduces_to_two((n, m, k, alpha) in arb_counts(), eta in 1e-3f64..1.0, eps in 0.0f64..=1.0) {
            let three = RegionPartition::new(n, m, m, 0, k).unwrap();
            let two = RegionPartition::two_region(n, m, k).unwrap();
            let b3 = bound_three_region(&three, &MassSpec::theoretical(alpha, alpha).unwrap(), eps, eta).unwrap();
            let b2 = bound_two_region(&two, &mass(alpha), eta).unwrap();
            prop_assert_eq!(b3.probability == 1.0, b2.probability == 1.0);
            if !b2.trivial {
                prop_assert!((b3.raw - b2.raw).abs() <= 1e-12);
            }
        }

        #[test]
        fn nonincreasing_in_eta((n, m, k, alpha) in arb_counts(), eta in 1e-3f64..1.0, step in 0.0f64..0.5, l_frac in 0.0f64..=1.0, k1 in 0u64..5000, eps in 0.0f64..=1.0) {
            // Probabilities are monotone everywhere; raw values only past the
            // plateau, since a trivial term counts 1 while a valid one starts at 2.
            let two = RegionPartition::two_region(n, m, k).unwrap();
            let lo = bound_two_region(&two, &mass(alpha), eta).unwrap();
            let hi = bound_two_region(&two, &mass(alpha), eta + step).unwrap();
            prop_assert!(hi.probability <= lo.probability);
            if !lo.trivial {
                prop_assert!(hi.raw <= lo.raw);
            }
            let l = (l_frac * m as f64).floor() as u64;
            let three = RegionPartition::new(n, m, l, k1, k).unwrap();
            let ms = MassSpec::theoretical(alpha, alpha * l_frac).unwrap();
            let lo = bound_three_region(&three, &ms, eps, eta).unwrap();
            let hi = bound_three_region(&three, &ms, eps, eta + step).unwrap();
            prop_assert!(hi.probability <= lo.probability);
            if !lo.trivial {
                prop_assert!(hi.raw <= lo.raw);
            }
        }

        #[test]
        fn disclosed_nonincreasing_in_k((n, m, k, alpha) in arb_counts(), dk in 0u64..1000, eta in 1e-3f64..1.0) {
            let a = RegionPartition::two_region(n, m, k).unwrap();
            let b = RegionPartition::two_region(n, m, k + dk).unwrap();
            prop_assert!(disclosed_term(&b, &mass(alpha), eta).unwrap().raw
                <= disclosed_term(&a, &mass(alpha), eta).unwrap().raw);
        }

        #[test]
        fn trivial_flag_tracks_shift((n, m, k, alpha) in arb_counts(), eta in 1e-3f64..1.0) {
            let part = RegionPartition::two_region(n, m, k).unwrap();
            let u = (alpha - m as f64 / n as f64).abs();
            let c = censored_term(&part, &mass(alpha), eta).unwrap();
            let d = disclosed_term(&part, &mass(alpha), eta).unwrap();
            prop_assert_eq!(c.trivial, eta - u <= 0.0);
            prop_assert_eq!(d.trivial, eta - 2.0 * u <= 0.0);
        }

        #[test]
        fn apriori_matches_enumeration_small((n, m, _k, alpha) in arb_counts(), eta in 1e-3f64..1.0, t in 0u64..=20) {
            let part = RegionPartition::two_region(n, m, 0).unwrap();
            let got = bound_two_region_apriori(&part, &mass(alpha), eta, t).unwrap().raw;
            let want = enumerate_apriori(n, m, alpha, eta, t);
            // Skipped pmf mass below 1e-15 is within this tolerance.
            prop_assert!((got - want).abs() <= 1e-10, "{} vs {}", got, want);
        }
    }
}
