//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per criterion.
//!
//! Failing criteria are reported but do not fail the run unless
//! `ACCEPTANCE_STRICT=1` is set; a few targets depend on experimental
//! settings that are not fully pinned down, and their failures are expected.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use censor_dkw::censored::{
    bound_three_region, bound_two_region, bound_two_region_apriori, check_prop1, check_prop2, partition,
    prop1_min_growth, MassSpec, Prop1Config, Prop2Config, RegionCounts, RegionPartition, ReweightedCdf,
};
use censor_dkw::classic::{dkw_bound, multivariate_dkw_bound};
use censor_dkw::multivariate::{
    adjusted_cdf_empirical, bound_2d_three_region, bound_2d_two_region, collect_2d, eta_2d_three_region,
    partition_2d, Boundary2D, Gaussian2D,
};
use censor_dkw::reproduce::{bench, classifier_config, fig3, fig4, ExploreSummary, ReproduceOptions};
use censor_dkw::stats::{
    gaussian_cdf, replication_seed, std_normal_quantile, sup_deviation, EmpiricalCdf, Interval, SeededRng,
    TheoreticalCdf,
};
use censor_dkw::verify::{mc_cdf_deviation_conditional, mc_gen_gap, ConditionalScenario, CoverageReport, Verdict};
use censor_dkw::Result;

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

struct Runner {
    failed: Vec<u32>,
}

impl Runner {
    fn check(&mut self, id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = limit {
            if elapsed > limit {
                pass = false;
                detail.push_str(&format!("; over the {:.0?} budget", limit));
            }
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:>2} [{name}] ({:.2}s): {detail}", elapsed.as_secs_f64());
        if !pass {
            self.failed.push(id);
        }
    }
}

fn within_noise(r: &CoverageReport) -> bool {
    r.verdict != Verdict::BoundViolated
}

fn coverage_line(r: &CoverageReport) -> String {
    format!(
        "freq {:.5} vs bound {:.5} (+3se {:.5}, {:?})",
        r.frequency,
        r.bound,
        r.bound + 3.0 * r.stderr,
        r.verdict
    )
}

fn dkw_recovery() -> Result<Outcome> {
    let mut rng = SeededRng::new(SEED, 0);
    let none = MassSpec::theoretical(0.0, 0.0)?;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = 1 + (rng.uniform() * 5000.0) as u64;
        let k = (rng.uniform() * 5000.0) as u64;
        let eta = 0.001 + 0.5 * rng.uniform();
        let ours = bound_two_region(RegionPartition::two_region(n, 0, k)?, &none, eta)?;
        let dkw = dkw_bound(n + k, eta)?;
        worst = worst.max((ours.raw - dkw.raw).abs());
    }
    outcome(worst <= 1e-12, format!("max |diff| = {worst:.3e} over 1000 draws"))
}

fn three_to_two() -> Result<Outcome> {
    let mut rng = SeededRng::new(SEED, 1);
    let (mut worst, mut flags_agree, mut nontrivial) = (0.0f64, true, 0);
    for _ in 0..1000 {
        let n = 1 + (rng.uniform() * 2000.0) as u64;
        let m = (rng.uniform() * (n + 1) as f64) as u64;
        let k = (rng.uniform() * 5000.0) as u64;
        let alpha = rng.uniform();
        let eps = rng.uniform();
        let eta = 0.001 + 0.6 * rng.uniform();
        let three = bound_three_region(
            RegionPartition::new(n, m, m, 0, k)?,
            &MassSpec::theoretical(alpha, alpha)?,
            eps,
            eta,
        )?;
        let two = bound_two_region(RegionPartition::two_region(n, m, k)?, &MassSpec::theoretical(alpha, 0.0)?, eta)?;
        flags_agree &= three.trivial == two.trivial;
        worst = worst.max((three.probability - two.probability).abs());
        if !two.trivial {
            nontrivial += 1;
            worst = worst.max((three.raw - two.raw).abs());
        }
    }
    outcome(
        worst <= 1e-12 && flags_agree,
        format!("max |diff| = {worst:.3e}; {nontrivial}/1000 non-trivial configs compared on raw value"),
    )
}

fn fig3_masses() -> Result<(f64, f64)> {
    let f = TheoreticalCdf::gaussian(7.0, 3.0)?;
    Ok((f.eval(8.0), f.eval(6.0)))
}

fn prop2() -> Result<Outcome> {
    let (alpha, beta) = fig3_masses()?;
    let n = 8000u64;
    let cfg = Prop2Config {
        n,
        m: (n as f64 * alpha).round() as u64,
        l: (n as f64 * beta).round() as u64,
        alpha,
        beta,
        eta: 0.015,
        k1_max: (40_000.0 * (alpha - beta)).round() as u64,
        k2: (40_000.0 * (1.0 - alpha)).round() as u64,
        eps_grid: (0..=20).map(|i| i as f64 * 0.05).collect(),
        hold_k1: None,
    };
    let r = check_prop2(&cfg)?;
    let (first, last) = (r.points[0].raw, r.points[r.points.len() - 1].raw);
    outcome(
        r.monotone,
        format!(
            "B^e {first:.4e} at eps=0 to {last:.4e} at eps=1; first violation {:?}",
            r.first_violation
        ),
    )
}

fn prop1() -> Result<Outcome> {
    let cdf = TheoreticalCdf::gaussian(7.0, 3.0)?;
    let (lo, hi) = (7.0 + 3.0 * std_normal_quantile(0.25), 7.0 + 3.0 * std_normal_quantile(0.75));
    let thetas: Vec<f64> = (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect();
    let (n, eta) = (8000u64, 0.015);
    let growth = thetas
        .iter()
        .map(|&t| {
            let alpha = cdf.eval(t);
            let m = (n as f64 * alpha).round() as u64;
            prop1_min_growth(n, m, eta, (alpha - m as f64 / n as f64).abs())
        })
        .fold(0.0f64, f64::max);
    let r = check_prop1(&Prop1Config {
        n,
        eta,
        growth,
        cdf,
        thetas,
    })?;
    let (first, last) = (r.points[0].raw, r.points[r.points.len() - 1].raw);
    outcome(
        r.monotone && r.precondition_met,
        format!(
            "theta in [{lo:.3}, {hi:.3}], c = {growth:.4}; B {first:.4e} to {last:.4e}; precondition {}; first violation {:?}",
            r.precondition_met, r.first_violation
        ),
    )
}

fn fig3_shape(s: &ExploreSummary) -> Result<Outcome> {
    let crossing_ok = s.crossing_epsilon.is_some_and(|e| (0.05..=0.20).contains(&e));
    let gap = s.explored_at_quarter - s.lb_bound;
    outcome(
        crossing_ok && gap.abs() <= 0.02,
        format!(
            "crossing eps {:?} (want [0.05, 0.20]); B^e(0.25) = {:.4}, B(LB) = {:.4}, diff {gap:+.4} (want |diff| <= 0.02); B(theta) = {:.4}",
            s.crossing_epsilon, s.explored_at_quarter, s.lb_bound, s.threshold_bound
        ),
    )
}

fn optimizer(s: &ExploreSummary) -> Result<Outcome> {
    let e = s.optimum.epsilon;
    outcome(
        (e - 0.1175).abs() <= 0.025 + 1e-12,
        format!("eps* = {e:.4} (want 0.1175 +/- 0.025), objective {:.4}", s.optimum.objective),
    )
}

/// Independent oracle: censored term plus the disclosed term summed against
/// binomial weights built by repeated multiplication.
fn apriori_oracle(n: u64, m: u64, alpha: f64, eta: f64, t: u64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let u = (alpha - mf / nf).abs();
    let term = |count: f64, shift: f64, scale: f64| {
        if eta <= shift {
            1.0
        } else if scale <= 0.0 {
            0.0
        } else {
            2.0 * (-2.0 * count * (eta - shift).powi(2) / (scale * scale)).exp()
        }
    };
    let censored = term(mf, u, alpha.min(mf / nf));
    let scale = (1.0 - alpha).min((nf - mf) / nf);
    let mut choose = 1.0;
    let mut expected = 0.0;
    for k in 0..=t {
        if k > 0 {
            choose *= (t - k + 1) as f64 / k as f64;
        }
        let w = choose * (1.0 - alpha).powi(k as i32) * alpha.powi((t - k) as i32);
        expected += w * term(nf - mf + k as f64, 2.0 * u, scale);
    }
    censored + expected
}

fn apriori() -> Result<Outcome> {
    let cases = [(50u64, 24u64, 0.5, 0.35), (200, 90, 0.47, 0.2), (1000, 600, 0.58, 0.08), (30, 3, 0.1, 0.5)];
    let mut worst = 0.0f64;
    for &(n, m, alpha, eta) in &cases {
        let part = RegionPartition::two_region(n, m, 0)?;
        let mass = MassSpec::theoretical(alpha, 0.0)?;
        for t in 0..=20 {
            let got = bound_two_region_apriori(&part, &mass, eta, t)?.raw;
            worst = worst.max((got - apriori_oracle(n, m, alpha, eta, t)).abs());
        }
    }
    let (alpha, _) = fig3_masses()?;
    let n = 8000u64;
    let m = (n as f64 * alpha).round() as u64;
    let part = RegionPartition::two_region(n, m, 0)?;
    let mass = MassSpec::theoretical(alpha, 0.0)?;
    let big = bound_two_region_apriori(&part, &mass, 0.015, 40_000)?.raw;
    let start = bound_two_region(&part, &mass, 0.015)?.raw;
    let floor = censor_dkw::censored::censored_term(&part, &mass, 0.015)?.raw;
    let ordered = big.is_finite() && floor <= big + 1e-12 && big <= start + 1e-12;
    outcome(
        worst <= 1e-10 && ordered,
        format!("T<=20 max |diff| = {worst:.3e}; T=40000: floor {floor:.4} <= {big:.4} <= T=0 bound {start:.4}"),
    )
}

fn cdf_soundness() -> Result<Outcome> {
    let cdf = TheoreticalCdf::gaussian(7.0, 1.0)?;
    let fig1 = ConditionalScenario {
        cdf: cdf.clone(),
        theta: 7.0,
        lb: None,
        epsilon: 0.0,
        n: 50,
        m: 24,
        l: 0,
        k1: 0,
        k2: 0,
    };
    let fig2 = ConditionalScenario {
        lb: Some(6.0),
        m: 27,
        l: 7,
        ..fig1.clone()
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for (name, scenario) in [("fig1", &fig1), ("fig2", &fig2)] {
        for delta in [0.05, 0.1] {
            let Some(eta) = scenario.eta_for(delta)? else {
                pass = false;
                lines.push(format!("{name} delta={delta}: unreachable"));
                continue;
            };
            let r = mc_cdf_deviation_conditional(scenario, eta, 100_000, SEED)?;
            pass &= within_noise(&r);
            lines.push(format!("{name} delta={delta} eta={eta:.4}: {}", coverage_line(&r)));
        }
    }
    outcome(pass, lines.join("; "))
}

fn gen_soundness() -> Result<Outcome> {
    let r = mc_gen_gap(&classifier_config(50_000, SEED), 0.05, 10_000, SEED)?;
    outcome(
        within_noise(&r.coverage),
        format!(
            "exceed freq {:.5} vs 2delta {:.3} (+3se {:.5}); mean gap {:.4}, mean bound {:.4}",
            r.coverage.frequency,
            r.coverage.bound,
            r.coverage.bound + 3.0 * r.coverage.stderr,
            r.mean_gap,
            r.mean_bound
        ),
    )
}

fn benchmarks() -> Result<Outcome> {
    let out = bench(SEED, &ReproduceOptions::default())?;
    let s = &out.summary;
    let all = ["gc", "vc", "hoeffding"].iter().all(|b| s.benchmarks_below_truth.iter().any(|x| x == b));
    let last = s.rows.last().expect("checkpoints");
    outcome(
        all && !s.ours_below_truth,
        format!(
            "below truth: {:?}; ours below: {}; at {} arrivals truth {:.4}, ours {:.4}, hoeffding {:.4}, gc {:.4}, vc {:.4}",
            s.benchmarks_below_truth, s.ours_below_truth, last.arrivals, last.gap_quantile, last.ours, last.hoeffding, last.gc, last.vc
        ),
    )
}

fn bands() -> Result<Outcome> {
    let out = fig4(SEED)?;
    let b = &out.summary.bands;
    let enclose = b.iter().all(|x| x.encloses);
    let widths: Vec<f64> = b.iter().map(|x| x.mean_width_explore).collect();
    let shrinking = widths.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let etas: Vec<String> = b.iter().map(|x| format!("{:.3}", x.eta)).collect();
    let devs: Vec<String> = b.iter().map(|x| format!("{:.3}", x.sup_deviation)).collect();
    let ws: Vec<String> = widths.iter().map(|w| format!("{w:.3}")).collect();
    outcome(
        enclose && shrinking,
        format!("eta [{}], sup dev [{}], explore widths [{}]", etas.join(", "), devs.join(", "), ws.join(", ")),
    )
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn projection_identities() -> Result<(bool, usize)> {
    let mut rng = SeededRng::new(SEED, 7);
    let mut ok = true;
    let mut compared = 0;
    for i in 0..200 {
        let rho = 1.6 * rng.uniform() - 0.8;
        let g = Gaussian2D::new([7.0, 6.0], [[1.0, rho], [rho, 1.5]])?;
        let w = [3.0 * rng.uniform() - 1.5, 0.1 + 1.9 * rng.uniform()];
        let center = w[0] * 7.0 + w[1] * 6.0;
        let b = center + rng.uniform() - 0.5;
        let lb = b - 0.1 - 1.5 * rng.uniform();
        let eta = 0.05 + 0.4 * rng.uniform();
        let eps = rng.uniform();
        let bd = Boundary2D::new(w, b, Some(lb))?;
        let c = collect_2d(&g, &bd, eps, 40 + i % 60, 200, replication_seed(SEED, i as u64))?;

        let proj = bd.project_all(&c.initial);
        let spec = bd.region_spec(0.0)?;
        ok &= partition_2d(&c.initial, &bd)? == partition(&proj, 0, 0, &spec)?;
        let e = EmpiricalCdf::from_slice(&proj)?;
        for bp in [lb, b, center, b + 1.0] {
            ok &= adjusted_cdf_empirical(&c.initial, w, bp)? == e.eval(bp);
        }
        let adj = g.adjusted(w)?;
        let var = w[0] * w[0] + 2.0 * w[0] * w[1] * rho + 1.5 * w[1] * w[1];
        for bp in [lb, b] {
            ok &= rel_close(adj.eval(bp), gaussian_cdf(bp, center, var.sqrt())?);
        }

        let p = c.partition;
        let mass = MassSpec::theoretical(adj.eval(b), adj.eval(lb))?;
        let two_1d = bound_two_region(RegionPartition::two_region(p.n, p.m, p.k2)?, &mass, eta)?;
        let two_2d = bound_2d_two_region(RegionPartition::two_region(p.n, p.m, p.k2)?, &mass, eta)?;
        let three_1d = bound_three_region(&p, &mass, eps, eta)?;
        let three_2d = bound_2d_three_region(&p, &mass, eps, eta)?;
        if !two_1d.trivial {
            ok &= rel_close(two_2d.raw, 2.0 * two_1d.raw);
            compared += 1;
        }
        if !three_1d.trivial {
            ok &= rel_close(three_2d.raw, 2.0 * three_1d.raw);
            compared += 1;
        }
        // Exploration edge on the boundary.
        let flat = RegionPartition::new(p.n, p.m, p.m, 0, p.k2)?;
        let same = MassSpec::theoretical(mass.alpha, mass.alpha)?;
        ok &= rel_close(
            bound_2d_three_region(&flat, &same, eps, eta)?.probability,
            bound_2d_two_region(&flat, &same, eta)?.probability,
        );
        // Boundary beyond the data: the multivariate DKW bound.
        let open = RegionPartition::two_region(p.n, 0, p.k1 + p.k2)?;
        ok &= rel_close(
            bound_2d_two_region(&open, &MassSpec::theoretical(0.0, 0.0)?, eta)?.raw,
            multivariate_dkw_bound(p.n + p.k1 + p.k2, eta, 2)?.raw,
        );
    }
    Ok((ok, compared))
}

fn soundness_2d() -> Result<Outcome> {
    let (ids_ok, compared) = projection_identities()?;

    let g = Gaussian2D::new([7.0, 7.0], [[1.0, 0.3], [0.3, 1.0]])?;
    let w = [1.0, 1.0];
    let bd = Boundary2D::new(w, 14.0, Some(13.0))?;
    let adj = g.adjusted(w)?;
    let mass = MassSpec::theoretical(adj.eval(14.0), adj.eval(13.0))?;
    let (eps, n, arrivals) = (0.5, 400usize, 1600usize);
    let expected = RegionCounts {
        n: n as f64,
        m: n as f64 * mass.alpha,
        l: n as f64 * mass.beta,
        k1: arrivals as f64 * (mass.alpha - mass.beta) * eps,
        k2: arrivals as f64 * (1.0 - mass.alpha),
    };
    let eta = eta_2d_three_region(expected, &mass, eps, 0.01)?
        .eta()
        .ok_or_else(|| censor_dkw::Error::InvalidParameter {
            name: "eta",
            reason: "unreachable at the expected counts".into(),
        })?;
    let spec = bd.region_spec(eps)?;
    let replications = 10_000u64;
    let draws = (0..replications)
        .into_par_iter()
        .map(|i| {
            let c = collect_2d(&g, &bd, eps, n, arrivals, replication_seed(SEED, i))?;
            let est = ReweightedCdf::new(&bd.project_all(&c.initial), &bd.project_all(&c.admitted), &spec)?;
            let dev = sup_deviation(&adj.projection, &est, Interval::full())?;
            let b = bound_2d_three_region(&c.partition, &mass, eps, eta)?;
            Ok((dev >= eta, b.probability, b.trivial))
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = draws.iter().filter(|d| d.0).count() as u64;
    let mean_bound = draws.iter().map(|d| d.1).sum::<f64>() / replications as f64;
    let trivial = draws.iter().filter(|d| d.2).count();
    let r = CoverageReport::new(replications, SEED, eta, hits, mean_bound, trivial > 0);
    outcome(
        ids_ok && within_noise(&r) && mean_bound < 1.0,
        format!(
            "identities {} ({compared} bound pairs); eta {eta:.4}: {}; {trivial} trivial bounds",
            if ids_ok { "hold" } else { "BROKEN" },
            coverage_line(&r)
        ),
    )
}

fn main() -> ExitCode {
    let mut runner = Runner { failed: Vec::new() };
    let secs = Duration::from_secs;
    runner.check(1, "dkw recovery", Some(secs(1)), dkw_recovery);
    runner.check(2, "three-to-two reduction", Some(secs(1)), three_to_two);
    runner.check(3, "exploration monotonicity", None, prop2);
    runner.check(4, "threshold monotonicity", None, prop1);

    let start = Instant::now();
    let explore = fig3(SEED, &ReproduceOptions::default());
    let fig3_time = start.elapsed();
    match explore {
        Ok(out) => {
            let s = out.summary;
            let budget = Some(secs(120).saturating_sub(fig3_time));
            let timed = |o: Result<Outcome>| {
                o.map(|mut o| {
                    o.detail.push_str(&format!("; curves computed in {:.2}s", fig3_time.as_secs_f64()));
                    o
                })
            };
            runner.check(5, "exploration curves", budget, || timed(fig3_shape(&s)));
            runner.check(6, "exploration optimizer", budget, || timed(optimizer(&s)));
        }
        Err(e) => {
            let msg = format!("error: {e}");
            runner.check(5, "exploration curves", None, || outcome(false, msg.clone()));
            runner.check(6, "exploration optimizer", None, || outcome(false, msg));
        }
    }

    runner.check(7, "a-priori bound", None, apriori);
    runner.check(8, "cdf bound soundness", Some(secs(300)), cdf_soundness);
    runner.check(9, "generalization soundness", Some(secs(600)), gen_soundness);
    runner.check(10, "benchmark ordering", None, benchmarks);
    runner.check(11, "confidence bands", None, bands);
    runner.check(12, "2d soundness", None, soundness_2d);

    println!(
        "acceptance: {} of 12 criteria pass{}",
        12 - runner.failed.len(),
        if runner.failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {:?}", runner.failed)
        }
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && !runner.failed.is_empty() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
