use crate::error::{Error, Result};

const NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

pub const MAX_NODES: usize = 1 << 20;
pub const REL_TOL: f64 = 1e-8;

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            sum += w * (f(mid - half * x) + f(mid + half * x));
        }
    }
    sum * 0.5 * h
}

/// Composite 8-point Gauss-Legendre on `[a, b]`, doubling the panel count
/// until successive estimates agree to [`REL_TOL`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 1;
    let mut prev = composite(&f, a, b, panels);
    loop {
        panels *= 2;
        let nodes = 8 * panels;
        if nodes > MAX_NODES {
            return Err(Error::QuadratureLimit { nodes: MAX_NODES });
        }
        let next = composite(&f, a, b, panels);
        if !next.is_finite() {
            return Err(crate::error::invalid("integrand", "produced a non-finite value"));
        }
        if (next - prev).abs() <= REL_TOL * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
}

/// Integrates piecewise, splitting at `breaks` that fall inside `(a, b)`.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64]) -> Result<f64> {
    let mut edges = vec![a];
    edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.windows(2).map(|w| integrate(&f, w[0], w[1])).sum()
}
