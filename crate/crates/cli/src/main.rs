//! `pufcal`: calibrate, inspect and verify Laplace noise for pufferfish
//! privacy on summation queries.

mod io;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pufcal::calibrate::{self as cal, BinaryRelaxContext, CalibrationResult, PrivacyBudget};
use pufcal::ingest::{extract_conditional, CategoryCodec, ConditionalQuery};
use pufcal::mechanism::{answer_query, sample_many};
use pufcal::{
    kantorovich_plan, max_plan_distance, verify_pair, DiscreteDistribution, Execution,
    LaplaceNoise, SecretPair, SystemConfig, UserId,
};
use serde::Serialize;

use crate::io::{load_json, num, CliError, CliResult, RunManifest, Sink};

#[derive(Debug, Parser)]
#[command(
    name = "pufcal",
    version,
    about = "Laplace noise calibration for pufferfish privacy on sums"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance on θ for root solving.
    #[arg(long, global = true, default_value_t = cal::DEFAULT_THETA_TOL)]
    tol: f64,
    /// Suppress informational messages.
    #[arg(long, global = true)]
    quiet: bool,
    /// Write the result here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Smallest θ for a set of secret pairs.
    Calibrate(CalibrateArgs),
    /// Optimal transport plan between two laws, as CSV.
    Plan(PlanArgs),
    /// Exact worst-case log-likelihood ratio of one pair at a given θ.
    Verify(VerifyArgs),
    /// Empirical conditional distribution from a CSV table.
    Ingest(IngestArgs),
    /// θ over an evenly spaced grid of budgets, as CSV.
    Sweep(SweepArgs),
    /// Laplace draws, or one noisy answer to the summation query.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Sab,
    Saperp,
    SpperpMax,
    SpperpMgf,
    SpperpBernoulli,
    Spq,
    SpqBernoulli,
    SpqBernoulliRelaxed,
    Generic,
}

#[derive(Debug, Args, Serialize)]
struct CalibratorInputs {
    #[arg(long, value_enum)]
    method: MethodArg,
    /// System config (inline JSON or path).
    #[arg(long)]
    config: Option<String>,
    /// Secret pairs: JSON array (inline or path).
    #[arg(long)]
    pairs: Option<String>,
    /// Value distribution(s) for the spperp methods (inline JSON or path).
    #[arg(long)]
    dist: Vec<String>,
    /// Bernoulli parameter of the first law.
    #[arg(long)]
    p: Option<f64>,
    /// Bernoulli parameter of the second law.
    #[arg(long)]
    q: Option<f64>,
    /// Law of everyone else's sum, for spq-bernoulli-relaxed.
    #[arg(long)]
    background: Option<String>,
    /// User whose background is taken from --config.
    #[arg(long)]
    user: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct CalibrateArgs {
    #[command(flatten)]
    inputs: CalibratorInputs,
    #[arg(long)]
    epsilon: f64,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    inputs: CalibratorInputs,
    #[arg(long)]
    epsilon_min: f64,
    #[arg(long)]
    epsilon_max: f64,
    #[arg(long)]
    steps: usize,
}

#[derive(Debug, Args, Serialize)]
struct PlanArgs {
    /// Source law (inline JSON or path).
    #[arg(long, requires = "q", conflicts_with_all = ["config", "pair"])]
    p: Option<String>,
    /// Target law (inline JSON or path).
    #[arg(long)]
    q: Option<String>,
    /// Build both laws as conditional priors of --pair in this config.
    #[arg(long, requires = "pair")]
    config: Option<String>,
    #[arg(long, requires = "config")]
    pair: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    config: String,
    /// One secret pair object (inline JSON or path).
    #[arg(long)]
    pair: String,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    epsilon: f64,
}

#[derive(Debug, Args, Serialize)]
struct IngestArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    target: String,
    /// `col=val[,col=val...]`
    #[arg(long, default_value = "")]
    filter: String,
    /// Codes file `{"column": ..., "codes": {...}}`.
    #[arg(long)]
    codes: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    theta: f64,
    /// Number of pure noise draws.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// With --realized: answer the query for this config.
    #[arg(long, requires = "realized")]
    config: Option<String>,
    /// `{"user": value-or-null, ...}`
    #[arg(long, requires = "config")]
    realized: Option<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Calibrate(_) => "calibrate",
            Command::Plan(_) => "plan",
            Command::Verify(_) => "verify",
            Command::Ingest(_) => "ingest",
            Command::Sweep(_) => "sweep",
            Command::Sample(_) => "sample",
        }
    }
}

fn budget(e: f64) -> CliResult<PrivacyBudget> {
    Ok(PrivacyBudget::new(e)?)
}

fn missing(flag: &str, method: MethodArg) -> CliError {
    CliError::input(
        "usage",
        format!("--{flag} is required for method {method:?}"),
    )
}

/// A calibrator with its inputs resolved, callable at any budget.
enum Prepared {
    Pairs(MethodArg, Vec<SecretPair>),
    Dists(MethodArg, Vec<DiscreteDistribution>, f64),
    Bernoulli(f64),
    SpqBernoulli,
    Relaxed(BinaryRelaxContext),
    Generic(SystemConfig, Vec<SecretPair>),
}

fn family<T>(
    pairs: &[SecretPair],
    pick: fn(&SecretPair) -> Option<T>,
    method: MethodArg,
) -> CliResult<Vec<T>> {
    pairs
        .iter()
        .map(|p| {
            pick(p).ok_or_else(|| {
                CliError::input(
                    "usage",
                    format!("{} does not fit method {method:?}", p.describe()),
                )
            })
        })
        .collect()
}

impl CalibratorInputs {
    fn prepare(&self, tol: f64) -> CliResult<Prepared> {
        let m = self.method;
        let pairs = || -> CliResult<Vec<SecretPair>> {
            let arg = self.pairs.as_deref().ok_or_else(|| missing("pairs", m))?;
            load_json(arg, "pairs")
        };
        let config = || -> CliResult<SystemConfig> {
            let arg = self.config.as_deref().ok_or_else(|| missing("config", m))?;
            load_json(arg, "config")
        };
        Ok(match m {
            MethodArg::Sab | MethodArg::Saperp | MethodArg::Spq => Prepared::Pairs(m, pairs()?),
            MethodArg::SpperpMax | MethodArg::SpperpMgf => {
                let mut dists = self
                    .dist
                    .iter()
                    .map(|d| load_json(d, "dist"))
                    .collect::<CliResult<Vec<DiscreteDistribution>>>()?;
                if self.pairs.is_some() {
                    dists.extend(family(
                        &pairs()?,
                        |p| match p {
                            SecretPair::DistAbsent(v) => Some(v.p.clone()),
                            _ => None,
                        },
                        m,
                    )?);
                }
                if dists.is_empty() {
                    return Err(missing("dist", m));
                }
                Prepared::Dists(m, dists, tol)
            }
            MethodArg::SpperpBernoulli => {
                Prepared::Bernoulli(self.p.ok_or_else(|| missing("p", m))?)
            }
            MethodArg::SpqBernoulli => Prepared::SpqBernoulli,
            MethodArg::SpqBernoulliRelaxed => {
                let p = self.p.ok_or_else(|| missing("p", m))?;
                let q = self.q.ok_or_else(|| missing("q", m))?;
                let background = match (&self.background, &self.user) {
                    (Some(b), _) => load_json(b, "background")?,
                    (None, Some(u)) => config()?.background_sum(&UserId::from(u.as_str()))?,
                    (None, None) => return Err(missing("background", m)),
                };
                Prepared::Relaxed(BinaryRelaxContext::new(p, q, background)?)
            }
            MethodArg::Generic => Prepared::Generic(config()?, pairs()?),
        })
    }
}

impl Prepared {
    fn run(&self, eps: PrivacyBudget, exec: Execution) -> pufcal::Result<CalibrationResult> {
        Ok(match self {
            Prepared::Pairs(MethodArg::Sab, pairs) => {
                cal::calibrate_sab(&cal::value_pairs(pairs), eps)
            }
            Prepared::Pairs(MethodArg::Saperp, pairs) => {
                cal::calibrate_saperp(&cal::value_absent_pairs(pairs), eps)
            }
            Prepared::Pairs(_, pairs) => cal::calibrate_spq(&cal::dist_pairs(pairs), eps),
            Prepared::Dists(MethodArg::SpperpMax, d, _) => cal::calibrate_spperp_max(d, eps),
            Prepared::Dists(_, d, tol) => cal::calibrate_spperp_mgf(d, eps, *tol)?,
            Prepared::Bernoulli(p) => cal::calibrate_spperp_bernoulli(*p, eps)?,
            Prepared::SpqBernoulli => cal::calibrate_spq_bernoulli(eps),
            Prepared::Relaxed(ctx) => cal::calibrate_spq_bernoulli_relaxed(ctx, eps),
            Prepared::Generic(config, pairs) => {
                cal::calibrate_generic_with(config, pairs, eps, exec)?
            }
        })
    }

    /// Rejects pairs of the wrong family for the pair-list methods.
    fn check_families(&self) -> CliResult<()> {
        let Prepared::Pairs(m, pairs) = self else {
            return Ok(());
        };
        let fits = |p: &SecretPair| {
            matches!(
                (m, p),
                (MethodArg::Sab, SecretPair::ValuePair(_))
                    | (MethodArg::Saperp, SecretPair::ValueAbsent(_))
                    | (MethodArg::Spq, SecretPair::DistPair(_))
            )
        };
        match pairs.iter().find(|p| !fits(p)) {
            Some(p) => Err(CliError::input(
                "usage",
                format!("{} does not fit method {m:?}", p.describe()),
            )),
            None => Ok(()),
        }
    }
}

fn calibrate(cli: &Cli, args: &CalibrateArgs, sink: &Sink) -> CliResult<u8> {
    let eps = budget(args.epsilon)?;
    let prepared = args.inputs.prepare(cli.tol)?;
    prepared.check_families()?;
    let result = prepared.run(eps, Execution::default())?;
    let mut value = serde_json::to_value(&result).expect("serializable result");
    value["epsilon"] = serde_json::json!(args.epsilon);
    sink.emit_json(&value)?;
    Ok(0)
}

fn sweep(cli: &Cli, args: &SweepArgs, sink: &Sink) -> CliResult<u8> {
    let grid = cal::epsilon_grid(args.epsilon_min, args.epsilon_max, args.steps)?;
    let prepared = args.inputs.prepare(cli.tol)?;
    prepared.check_families()?;
    let curve = cal::sweep(&grid, Execution::default(), |e| {
        prepared.run(e, Execution::Sequential)
    })?;
    let mut body = String::from("epsilon,theta\n");
    for (e, r) in grid.iter().zip(curve) {
        body.push_str(&format!("{},{}\n", num(e.epsilon()), num(r.theta)));
    }
    sink.emit(&body)?;
    Ok(0)
}

fn plan(cli: &Cli, args: &PlanArgs, sink: &Sink) -> CliResult<u8> {
    let (p, q) = match (&args.p, &args.q, &args.config, &args.pair) {
        (Some(p), Some(q), _, _) => (load_json(p, "p")?, load_json(q, "q")?),
        (_, _, Some(c), Some(pair)) => {
            let config: SystemConfig = load_json(c, "config")?;
            let pair: SecretPair = load_json(pair, "pair")?;
            let user = pair.require_user()?;
            let (left, right) = pair.arms();
            (
                config.conditional_prior(user, &left)?,
                config.conditional_prior(user, &right)?,
            )
        }
        _ => {
            return Err(CliError::input(
                "usage",
                "give --p and --q, or --config and --pair",
            ))
        }
    };
    let plan = kantorovich_plan(&p, &q);
    let mut body = String::from("x,x_prime,mass\n");
    for e in plan.entries() {
        body.push_str(&format!(
            "{},{},{}\n",
            num(e.x),
            num(e.x_prime),
            num(e.mass)
        ));
    }
    sink.emit(&body)?;
    if !cli.quiet {
        eprintln!(
            "max |x - x'| = {}, cost = {}",
            max_plan_distance(&plan),
            plan.cost()
        );
    }
    Ok(0)
}

fn verify(args: &VerifyArgs, sink: &Sink) -> CliResult<u8> {
    let config: SystemConfig = load_json(&args.config, "config")?;
    let pair: SecretPair = load_json(&args.pair, "pair")?;
    let report = verify_pair(&config, &pair, args.theta, budget(args.epsilon)?)?;
    sink.emit_json(&report)?;
    Ok(if report.satisfied { 0 } else { 1 })
}

fn ingest(cli: &Cli, args: &IngestArgs, sink: &Sink) -> CliResult<u8> {
    let query = ConditionalQuery::new(
        args.target.clone(),
        ConditionalQuery::parse_filters(&args.filter)?,
    )?;
    let mut codec = match &args.codes {
        Some(path) => CategoryCodec::from_path(path)?,
        None => CategoryCodec::learning(args.target.clone()),
    };
    let out = extract_conditional(&args.csv, &query, &mut codec)?;
    sink.emit_json(&out.distribution)?;
    if !cli.quiet {
        let note = serde_json::json!({ "diagnostics": out.diagnostics, "codes": codec.codes });
        eprintln!("{note}");
    }
    Ok(0)
}

fn sample(cli: &Cli, args: &SampleArgs, sink: &Sink) -> CliResult<u8> {
    let noise = LaplaceNoise::new(args.theta)?;
    if let (Some(c), Some(r)) = (&args.config, &args.realized) {
        let config: SystemConfig = load_json(c, "config")?;
        let realized: BTreeMap<String, Option<f64>> = load_json(r, "realized")?;
        let y = answer_query(&config, &realized, noise, cli.seed)?;
        sink.emit_json(&serde_json::json!({ "value": y, "theta": args.theta, "seed": cli.seed }))?;
        return Ok(0);
    }
    let mut body = String::from("value\n");
    for z in sample_many(noise, cli.seed, args.n, Execution::default()) {
        body.push_str(&num(z));
        body.push('\n');
    }
    sink.emit(&body)?;
    Ok(0)
}

fn run(cli: &Cli) -> CliResult<u8> {
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Err(CliError::input(
            "usage",
            format!("--tol must be > 0, got {}", cli.tol),
        ));
    }
    let sink = Sink {
        out: cli.out.clone(),
    };
    let code = match &cli.command {
        Command::Calibrate(a) => calibrate(cli, a, &sink)?,
        Command::Plan(a) => plan(cli, a, &sink)?,
        Command::Verify(a) => verify(a, &sink)?,
        Command::Ingest(a) => ingest(cli, a, &sink)?,
        Command::Sweep(a) => sweep(cli, a, &sink)?,
        Command::Sample(a) => sample(cli, a, &sink)?,
    };
    sink.manifest(&RunManifest {
        tool: "pufcal",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        argv: std::env::args().skip(1).collect(),
        seed: cli.seed,
        tolerance: cli.tol,
        inputs: serde_json::to_value(&cli.command).expect("serializable arguments"),
    })?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                CliError::input("usage", e.render().to_string().trim_end()).to_json()
            );
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
