use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use censor_dkw::censored::{
    bound_three_region, bound_two_region, bound_two_region_apriori, MassSpec, RegionPartition,
};
use censor_dkw::classic::{dkw_bound, gc_bound, hoeffding_bound, multivariate_dkw_bound, vc_bound, BoundValue};
use censor_dkw::explore::{default_eps_grid, default_lb_grid, optimize_exploration, CostModel, ExploreContext};
use censor_dkw::generalization::{gen_bound, gen_bound_dkw, GenBound};
use censor_dkw::multivariate::{bound_2d_three_region, bound_2d_two_region};
use censor_dkw::reproduce::{large_cost, large_explore_context, reproduce, Figure, ReproduceOptions};
use censor_dkw::simulator::{finalize, ingest_scores, run_stage1, Simulation, SimulationConfig, TraceDetail};
use censor_dkw::stats::{Label, MixtureModel, TheoreticalCdf};
use censor_dkw::verify::{
    mc_cdf_deviation, mc_cdf_deviation_conditional, mc_gen_gap, write_coverage_csv, ConditionalScenario,
    CoverageReport,
};
use censor_dkw::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "censor-dkw", version, about = "CDF error bounds under censored feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a bound.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Run the censored collection process and write its trace.
    Simulate(SimulateArgs),
    /// Write plot-ready data for a standard experiment.
    Reproduce(ReproduceArgs),
    /// Grid-search the exploration policy.
    Optimize(OptimizeArgs),
    /// Monte Carlo checks of the bounds.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
struct Output {
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Classic {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    eta: f64,
}

#[derive(Args)]
struct TwoRegionArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 0)]
    k: u64,
    /// Mass below the threshold; plug-in m/n when omitted.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: f64,
}

#[derive(Args)]
struct ThreeRegionArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    l: u64,
    #[arg(long, default_value_t = 0)]
    k1: u64,
    #[arg(long, default_value_t = 0)]
    k2: u64,
    /// Mass below the threshold; plug-in when omitted together with beta.
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    /// Mass below the exploration lower bound.
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    eta: f64,
}

impl TwoRegionArgs {
    fn parts(&self) -> censor_dkw::Result<(RegionPartition, MassSpec)> {
        let p = RegionPartition::two_region(self.n, self.m, self.k)?;
        let mass = match self.alpha {
            Some(a) => MassSpec::theoretical(a, 0.0)?,
            None => MassSpec::plug_in(&p),
        };
        Ok((p, mass))
    }
}

impl ThreeRegionArgs {
    fn parts(&self) -> censor_dkw::Result<(RegionPartition, MassSpec)> {
        let p = RegionPartition::new(self.n, self.m, self.l, self.k1, self.k2)?;
        let mass = match (self.alpha, self.beta) {
            (Some(a), Some(b)) => MassSpec::theoretical(a, b)?,
            _ => MassSpec::plug_in(&p),
        };
        Ok((p, mass))
    }
}

#[derive(Subcommand)]
enum BoundCmd {
    /// DKW bound for an IID sample.
    Dkw {
        #[command(flatten)]
        args: Classic,
        #[command(flatten)]
        out: Output,
    },
    /// Glivenko-Cantelli benchmark.
    Gc {
        #[command(flatten)]
        args: Classic,
        #[command(flatten)]
        out: Output,
    },
    /// VC benchmark with polynomial growth of degree `d`.
    Vc {
        #[command(flatten)]
        args: Classic,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Hoeffding benchmark for a single fixed threshold.
    Hoeffding {
        #[command(flatten)]
        args: Classic,
        #[command(flatten)]
        out: Output,
    },
    /// Multivariate DKW.
    Mdkw {
        #[command(flatten)]
        args: Classic,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Censored bound with one threshold.
    TwoRegion {
        #[command(flatten)]
        args: TwoRegionArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Two-region bound averaged over the disclosed count after `wait` arrivals.
    Apriori {
        #[command(flatten)]
        args: TwoRegionArgs,
        #[arg(long)]
        wait: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Censored bound with an exploration band below the threshold.
    ThreeRegion {
        #[command(flatten)]
        args: ThreeRegionArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Two-region bound for a linear boundary in two dimensions.
    #[command(name = "two-region-2d")]
    TwoRegion2d {
        #[command(flatten)]
        args: TwoRegionArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Three-region bound for a linear boundary in two dimensions.
    #[command(name = "three-region-2d")]
    ThreeRegion2d {
        #[command(flatten)]
        args: ThreeRegionArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Generalization bound of a threshold classifier.
    Gen(GenArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n0: usize,
    #[arg(long)]
    n1: usize,
    /// Prior of label 1.
    #[arg(long)]
    p1: f64,
    #[arg(long)]
    delta: f64,
    /// Per-label sup-deviation bounds `eta0,eta1`; plain DKW when omitted.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    sup: Option<Vec<f64>>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Trace JSON path; the summary and manifest go next to it.
    #[arg(long)]
    out: PathBuf,
    /// Replay arrivals from a `score,label` CSV instead of drawing them.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Keep only tallies and admitted samples in the trace.
    #[arg(long)]
    summary_only: bool,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    arrivals: Option<u64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    lb: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Bench,
    #[value(name = "appendixJ", alias = "appendixj")]
    AppendixJ,
    All,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    figure: FigureArg,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    outdir: PathBuf,
    /// JSON file with reproduction options.
    #[arg(long)]
    options: Option<PathBuf>,
    #[arg(long)]
    bench_replications: Option<u64>,
}

/// Optimization problem as read from `--config`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeConfig {
    context: ExploreContext,
    cost: CostModel,
    #[serde(default)]
    lb_grid: Option<Vec<f64>>,
    #[serde(default)]
    eps_step: Option<f64>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Problem file; defaults to the large Gaussian setting built from `--seed`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cost scale.
    #[arg(long)]
    c: Option<f64>,
    /// Fix the exploration lower bound instead of searching percentiles.
    #[arg(long)]
    lb: Option<f64>,
    #[arg(long)]
    eps_step: Option<f64>,
    /// Multiplier converting cost into bound units.
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long)]
    outdir: PathBuf,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Frequency of `sup |F - F_hat| >= eta` against the bound.
    Cdf(VerifyCdfArgs),
    /// Frequency of the generalization gap exceeding its bound.
    Gen(VerifyGenArgs),
}

#[derive(Args)]
struct VerifyCdfArgs {
    /// A conditional scenario or a simulation config.
    #[arg(long)]
    config: PathBuf,
    /// A number, or `auto` to invert the bound at `--delta`.
    #[arg(long, default_value = "auto")]
    eta: String,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(short = 'R', long = "replications")]
    replications: u64,
    #[arg(long)]
    seed: u64,
    /// Label checked for simulation configs.
    #[arg(long, default_value_t = 1)]
    label: u8,
    #[arg(long)]
    outdir: PathBuf,
}

#[derive(Args)]
struct VerifyGenArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(short = 'R', long = "replications")]
    replications: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    outdir: PathBuf,
}

/// Record of one run: enough to rerun it and find its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Parse { .. } | Error::Json(_) | Error::EmptySample => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult = std::result::Result<bool, Failure>;

pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> ExitCode {
    let args: Vec<OsString> = args.into_iter().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let line = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let result = match cli.command {
        Command::Bound(cmd) => cmd_bound(cmd),
        Command::Simulate(a) => cmd_simulate(a, &line),
        Command::Reproduce(a) => cmd_reproduce(a, &line),
        Command::Optimize(a) => cmd_optimize(a, &line),
        Command::Verify(VerifyCmd::Cdf(a)) => cmd_verify_cdf(a, &line),
        Command::Verify(VerifyCmd::Gen(a)) => cmd_verify_gen(a, &line),
    };
    if let Err(Failure::Usage(msg) | Failure::Runtime(msg)) = &result {
        eprintln!("error: {msg}");
    }
    ExitCode::from(status(&result))
}

fn status(result: &CliResult) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => EXIT_VIOLATION,
        Err(Failure::Usage(_)) => EXIT_USAGE,
        Err(Failure::Runtime(_)) => EXIT_RUNTIME,
    }
}

fn print_bound(b: &BoundValue, out: &Output) -> CliResult {
    if out.json {
        println!("{}", serde_json::to_string(b)?);
    } else {
        println!("raw         {}", b.raw);
        println!("probability {}", b.probability);
        println!("trivial     {}", b.trivial);
        if b.approximate {
            println!("approximate true");
        }
    }
    Ok(true)
}

fn print_gen(g: &GenBound, out: &Output) -> CliResult {
    if out.json {
        println!("{}", serde_json::to_string(g)?);
    } else {
        println!("prior_term   {}", g.prior_term);
        println!("label0_term  {}", g.contributions[0]);
        println!("label1_term  {}", g.contributions[1]);
        println!("total        {}", g.total);
        println!("confidence   {}", g.confidence);
    }
    Ok(true)
}

fn cmd_bound(cmd: BoundCmd) -> CliResult {
    match cmd {
        BoundCmd::Dkw { args, out } => print_bound(&dkw_bound(args.n, args.eta)?, &out),
        BoundCmd::Gc { args, out } => print_bound(&gc_bound(args.n, args.eta)?, &out),
        BoundCmd::Vc { args, d, out } => print_bound(&vc_bound(args.n, args.eta, d)?, &out),
        BoundCmd::Hoeffding { args, out } => print_bound(&hoeffding_bound(args.n, args.eta)?, &out),
        BoundCmd::Mdkw { args, dim, out } => print_bound(&multivariate_dkw_bound(args.n, args.eta, dim)?, &out),
        BoundCmd::TwoRegion { args, out } => {
            let (p, mass) = args.parts()?;
            print_bound(&bound_two_region(&p, &mass, args.eta)?, &out)
        }
        BoundCmd::Apriori { args, wait, out } => {
            let (p, mass) = args.parts()?;
            print_bound(&bound_two_region_apriori(&p, &mass, args.eta, wait)?, &out)
        }
        BoundCmd::ThreeRegion { args, out } => {
            let (p, mass) = args.parts()?;
            print_bound(&bound_three_region(&p, &mass, args.epsilon, args.eta)?, &out)
        }
        BoundCmd::TwoRegion2d { args, out } => {
            let (p, mass) = args.parts()?;
            print_bound(&bound_2d_two_region(&p, &mass, args.eta)?, &out)
        }
        BoundCmd::ThreeRegion2d { args, out } => {
            let (p, mass) = args.parts()?;
            print_bound(&bound_2d_three_region(&p, &mass, args.epsilon, args.eta)?, &out)
        }
        BoundCmd::Gen(a) => {
            // Only the priors enter the bound; the class CDFs are placeholders.
            let placeholder = TheoreticalCdf::gaussian(0.0, 1.0)?;
            let model = MixtureModel::new(a.p1, placeholder.clone(), placeholder)?;
            let g = match &a.sup {
                Some(s) => gen_bound(a.n0, a.n1, &model, [s[0], s[1]], a.delta)?,
                None => gen_bound_dkw(a.n0, a.n1, &model, a.delta)?,
            };
            print_gen(&g, &a.out)
        }
    }
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_config<T: serde::de::DeserializeOwned>(path: &Path, value: Value) -> std::result::Result<T, Failure> {
    serde_json::from_value(value).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn finish_manifest<T: Serialize>(
    path: &Path,
    command: &str,
    config: &T,
    seed: Option<u64>,
    mut outputs: Vec<PathBuf>,
    started: Instant,
) -> std::result::Result<(), Failure> {
    outputs.push(path.to_path_buf());
    let manifest = RunManifest {
        command: command.into(),
        config: serde_json::to_value(config)?,
        seed,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs,
        duration_secs: started.elapsed().as_secs_f64(),
    };
    write_json(path, &manifest)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

#[derive(Serialize)]
struct SimulationSummary {
    processed: u64,
    thresholds: Vec<censor_dkw::simulator::ThresholdEpoch>,
    tally: censor_dkw::simulator::ArrivalTally,
    final_theta: f64,
    labels: Vec<LabelSummary>,
}

#[derive(Serialize)]
struct LabelSummary {
    label: Label,
    partition: RegionPartition,
    stale: u64,
}

fn cmd_simulate(a: SimulateArgs, line: &str) -> CliResult {
    let started = Instant::now();
    let mut config: SimulationConfig = parse_config(&a.config, read_json(&a.config)?)?;
    config.seed = a.seed;
    if let Some(e) = a.epsilon {
        config.epsilon = e;
    }
    if let Some(t) = a.arrivals {
        config.arrivals = t;
    }
    if a.theta.is_some() {
        config.theta = a.theta;
    }
    if a.lb.is_some() {
        config.lb = a.lb;
    }
    config.validate()?;
    let detail = if a.summary_only { TraceDetail::Summary } else { TraceDetail::Full };
    let stage1 = run_stage1(&config)?;
    let sim = match &a.scores {
        Some(path) => {
            let rows = ingest_scores(path)?;
            config.arrivals = rows.len() as u64;
            Simulation::replay(&config, stage1, rows, detail)?
        }
        None => Simulation::new(&config, stage1, detail)?,
    };
    let trace = sim.run();
    let state = finalize(&trace)?;
    let summary = SimulationSummary {
        processed: trace.tally.processed(),
        thresholds: trace.thresholds.clone(),
        tally: trace.tally,
        final_theta: state.theta,
        labels: state
            .labels
            .iter()
            .map(|e| LabelSummary {
                label: e.label,
                partition: e.partition,
                stale: e.stale,
            })
            .collect(),
    };
    write_json(&a.out, &trace)?;
    let summary_path = sibling(&a.out, "summary");
    write_json(&summary_path, &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    finish_manifest(
        &sibling(&a.out, "manifest"),
        line,
        &config,
        Some(a.seed),
        vec![a.out.clone(), summary_path],
        started,
    )?;
    Ok(true)
}

fn cmd_reproduce(a: ReproduceArgs, line: &str) -> CliResult {
    let mut opts = match &a.options {
        Some(p) => parse_config(p, read_json(p)?)?,
        None => ReproduceOptions::default(),
    };
    if let Some(r) = a.bench_replications {
        opts.bench_replications = r;
    }
    let figures: Vec<Figure> = match a.figure {
        FigureArg::Fig1 => vec![Figure::Fig1],
        FigureArg::Fig2 => vec![Figure::Fig2],
        FigureArg::Fig3 => vec![Figure::Fig3],
        FigureArg::Fig4 => vec![Figure::Fig4],
        FigureArg::Bench => vec![Figure::Bench],
        FigureArg::AppendixJ => vec![Figure::AppendixJ],
        FigureArg::All => Figure::ALL.to_vec(),
    };
    for fig in figures {
        let started = Instant::now();
        let rep = reproduce(fig, a.seed, &opts)?;
        let outputs = rep.write(&a.outdir)?;
        for p in &outputs {
            println!("{}", p.display());
        }
        #[derive(Serialize)]
        struct Resolved<'a> {
            figure: Figure,
            options: &'a ReproduceOptions,
        }
        finish_manifest(
            &a.outdir.join(format!("{fig}_manifest.json")),
            line,
            &Resolved {
                figure: fig,
                options: &opts,
            },
            Some(a.seed),
            outputs,
            started,
        )?;
    }
    Ok(true)
}

fn cmd_optimize(a: OptimizeArgs, line: &str) -> CliResult {
    let started = Instant::now();
    let mut problem = match &a.config {
        Some(p) => parse_config::<OptimizeConfig>(p, read_json(p)?)?,
        None => {
            let seed = a
                .seed
                .ok_or_else(|| Failure::Usage("the built-in problem is randomized; pass --seed".into()))?;
            OptimizeConfig {
                context: large_explore_context(seed, censor_dkw::reproduce::LARGE_RUNS)?,
                cost: large_cost(),
                lb_grid: None,
                eps_step: None,
            }
        }
    };
    if let Some(c) = a.c {
        problem.cost = CostModel::new(c, problem.cost.f0.clone())?.with_weight(problem.cost.weight)?;
    }
    if let Some(w) = a.weight {
        problem.cost = problem.cost.clone().with_weight(w)?;
    }
    if let Some(lb) = a.lb {
        problem.lb_grid = Some(vec![lb]);
    }
    if let Some(s) = a.eps_step {
        problem.eps_step = Some(s);
    }
    let lb_grid = problem
        .lb_grid
        .clone()
        .unwrap_or_else(|| default_lb_grid(&problem.context.cdf, problem.context.theta));
    let eps_grid = default_eps_grid(problem.eps_step.unwrap_or(0.0025))?;
    let opt = optimize_exploration(&problem.context, &problem.cost, &lb_grid, &eps_grid)?;

    std::fs::create_dir_all(&a.outdir)?;
    let points = a.outdir.join("optimize_points.csv");
    let mut w = csv::Writer::from_path(&points).map_err(Error::from)?;
    for p in &opt.points {
        w.serialize(p).map_err(Error::from)?;
    }
    w.flush()?;
    let best = a.outdir.join("optimize_best.json");
    write_json(&best, &opt.best)?;
    println!(
        "lb {}  epsilon {}  objective {}  (baseline {}, explored {}, cost {})",
        opt.best.lb, opt.best.epsilon, opt.best.objective, opt.best.baseline, opt.best.explored, opt.best.cost
    );
    finish_manifest(
        &a.outdir.join("optimize_manifest.json"),
        line,
        &problem,
        a.seed,
        vec![points, best],
        started,
    )?;
    Ok(true)
}

/// `verify cdf` accepts either config kind; simulation configs carry a
/// `population` key.
#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum CdfTarget {
    Scenario(ConditionalScenario),
    Simulation(SimulationConfig),
}

fn cmd_verify_cdf(a: VerifyCdfArgs, line: &str) -> CliResult {
    let started = Instant::now();
    let value = read_json(&a.config)?;
    let target = if value.get("population").is_some() {
        let mut cfg: SimulationConfig = parse_config(&a.config, value)?;
        cfg.seed = a.seed;
        CdfTarget::Simulation(cfg)
    } else {
        CdfTarget::Scenario(parse_config(&a.config, value)?)
    };
    let eta = if a.eta == "auto" {
        let delta = a.delta.ok_or_else(|| Failure::Usage("--eta auto needs --delta".into()))?;
        match &target {
            CdfTarget::Scenario(s) => s
                .eta_for(delta)?
                .ok_or_else(|| Failure::Usage(format!("confidence {delta} is unreachable for this scenario")))?,
            CdfTarget::Simulation(_) => {
                return Err(Failure::Usage(
                    "--eta auto needs fixed region counts; pass a numeric --eta for simulation configs".into(),
                ))
            }
        }
    } else {
        a.eta
            .parse::<f64>()
            .map_err(|_| Failure::Usage(format!("--eta must be a number or `auto`, got `{}`", a.eta)))?
    };
    let report: CoverageReport = match &target {
        CdfTarget::Scenario(s) => mc_cdf_deviation_conditional(s, eta, a.replications, a.seed)?,
        CdfTarget::Simulation(cfg) => {
            let label = Label::try_from(a.label).map_err(Failure::from)?;
            mc_cdf_deviation(cfg, label, eta, a.replications, a.seed)?
        }
    };
    std::fs::create_dir_all(&a.outdir)?;
    let json = a.outdir.join("verify_cdf.json");
    write_json(&json, &report)?;
    let csv_path = a.outdir.join("verify_cdf.csv");
    write_coverage_csv(&[("cdf".to_string(), report.clone())], std::fs::File::create(&csv_path)?)?;
    println!(
        "eta {eta}  frequency {}  bound {}  stderr {}  verdict {}",
        report.frequency,
        report.bound,
        report.stderr,
        serde_json::to_value(report.verdict)?.as_str().unwrap_or("")
    );
    #[derive(Serialize)]
    struct Resolved<'a> {
        target: &'a CdfTarget,
        eta: f64,
        delta: Option<f64>,
        replications: u64,
    }
    finish_manifest(
        &a.outdir.join("verify_cdf_manifest.json"),
        line,
        &Resolved {
            target: &target,
            eta,
            delta: a.delta,
            replications: a.replications,
        },
        Some(a.seed),
        vec![json, csv_path],
        started,
    )?;
    Ok(!report.verdict.is_violation())
}

fn cmd_verify_gen(a: VerifyGenArgs, line: &str) -> CliResult {
    let started = Instant::now();
    let mut config: SimulationConfig = parse_config(&a.config, read_json(&a.config)?)?;
    config.seed = a.seed;
    let report = mc_gen_gap(&config, a.delta, a.replications, a.seed)?;
    std::fs::create_dir_all(&a.outdir)?;
    let json = a.outdir.join("verify_gen.json");
    write_json(&json, &report)?;
    let csv_path = a.outdir.join("verify_gen.csv");
    write_coverage_csv(&[("gen".to_string(), report.coverage.clone())], std::fs::File::create(&csv_path)?)?;
    println!(
        "exceedance {}  allowed {}  stderr {}  mean_gap {}  mean_bound {}  verdict {}",
        report.coverage.frequency,
        report.coverage.bound,
        report.coverage.stderr,
        report.mean_gap,
        report.mean_bound,
        serde_json::to_value(report.coverage.verdict)?.as_str().unwrap_or("")
    );
    #[derive(Serialize)]
    struct Resolved<'a> {
        simulation: &'a SimulationConfig,
        delta: f64,
        replications: u64,
    }
    finish_manifest(
        &a.outdir.join("verify_gen_manifest.json"),
        line,
        &Resolved {
            simulation: &config,
            delta: a.delta,
            replications: a.replications,
        },
        Some(a.seed),
        vec![json, csv_path],
        started,
    )?;
    Ok(!report.coverage.verdict.is_violation())
}
