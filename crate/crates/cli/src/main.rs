use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dcbm::harness::{self, Method, ScenarioConfig};
use dcbm::info::{info_report, ExponentInputs};
use dcbm::io;
use dcbm::loss::misclassification;
use dcbm::model::{sample_adjacency_with, ParamFile, ProbabilityPolicy};
use dcbm::oracles::{mle_search, MleProblem};
use dcbm::refine::{detect_practical, detect_provable};
use dcbm::spectral::{initialize, InitConfig, Threshold, DEFAULT_C1};
use dcbm::testing::{error_bound, simulate_errors, TestKind, TestingInstance};
use dcbm::{Error, LabelVector};

/// Community detection in degree-corrected block models.
#[derive(Parser)]
#[command(name = "dcbm", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from a JSON parameter file.
    Generate(GenerateArgs),
    /// Estimate communities of a graph.
    Detect(DetectArgs),
    /// Run a simulation scenario and write per-run losses.
    Simulate(SimulateArgs),
    /// Monte-Carlo error of the two-point tests.
    Testlab(TestlabArgs),
    /// Error exponents for a parameter file.
    Info(InfoArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    params: PathBuf,
    /// Edge-list output.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth labels output.
    #[arg(long)]
    labels_out: Option<PathBuf>,
    /// Degree parameters output, one per line.
    #[arg(long)]
    theta_out: Option<PathBuf>,
    /// Overrides the seed of the parameter file.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap edge probabilities above 1 instead of failing.
    #[arg(long)]
    clamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectMethod {
    Init,
    Refine,
    Refine10,
    Provable,
    Score,
    Mle,
}

#[derive(Args)]
struct DetectArgs {
    /// Edge-list input.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "refine10")]
    method: DetectMethod,
    /// Fixed trimming threshold; overrides --c1.
    #[arg(long)]
    tau: Option<f64>,
    /// Trimming threshold as a multiple of the average degree.
    #[arg(long, default_value_t = DEFAULT_C1)]
    c1: f64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ground-truth labels; the loss is reported when given.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Label output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Degree parameters for the likelihood, one per line (default: all 1).
    #[arg(long)]
    theta_file: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario configuration (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: scenario1 or scenario2.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of init,refine1,refine10,provable,score.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Record wall-clock times (output is then not reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Per-method summary output (JSON).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct TestlabArgs {
    #[arg(long)]
    m: usize,
    /// Size of the second group (default: m).
    #[arg(long)]
    m1: Option<usize>,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    theta0: f64,
    #[arg(long, default_value_t = 10000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "counting")]
    test: String,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    params: PathBuf,
    /// Overrides the smallest diagonal entry of B.
    #[arg(long)]
    p: Option<f64>,
    /// Overrides the largest off-diagonal entry of B.
    #[arg(long)]
    q: Option<f64>,
    /// Overrides the parameter file's beta (default 1).
    #[arg(long)]
    beta: Option<f64>,
}

fn read(path: &Path) -> dcbm::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn generate(args: GenerateArgs) -> dcbm::Result<()> {
    let mut file = ParamFile::from_json(&read(&args.params)?)?;
    if let Some(seed) = args.seed {
        file.seed = seed;
    }
    let params = file.resolve()?;
    let policy = if args.clamp { ProbabilityPolicy::Clamp } else { ProbabilityPolicy::Strict };
    let a = sample_adjacency_with(&params, file.graph_seed(), policy)?;
    io::write_edge_list(&args.out, &a)?;
    if let Some(path) = &args.labels_out {
        io::write_labels(path, params.z())?;
    }
    if let Some(path) = &args.theta_out {
        let text: String = params.theta().iter().map(|t| format!("{t}\n")).collect();
        std::fs::write(path, text)?;
    }
    log::info!("sampled {} edges on {} nodes", a.edge_count(), a.n());
    Ok(())
}

fn detect(args: DetectArgs) -> dcbm::Result<()> {
    let a = io::read_edge_list(&args.graph)?;
    let threshold = match args.tau {
        Some(t) => Threshold::Fixed(t),
        None => Threshold::AverageDegree(args.c1),
    };
    let config = InitConfig { threshold, restarts: args.restarts, max_iters: args.max_iters, seed: args.seed };
    let k = args.k;
    let z = match args.method {
        DetectMethod::Init => initialize(&a, k, &config)?,
        DetectMethod::Refine => detect_practical(&a, k, &config, 1)?,
        DetectMethod::Refine10 => detect_practical(&a, k, &config, 10)?,
        DetectMethod::Provable => detect_provable(&a, k, &config)?,
        DetectMethod::Score => harness::score_baseline(&a, k, args.seed)?,
        DetectMethod::Mle => {
            let (p, q) = match (args.p, args.q) {
                (Some(p), Some(q)) => (p, q),
                _ => return Err(Error::Config("--method mle needs --p and --q".into())),
            };
            let theta = match &args.theta_file {
                Some(path) => io::parse_reals(&read(path)?)?,
                None => vec![1.0; a.n()],
            };
            mle_search(&MleProblem { a: a.clone(), theta, p, q, k, beta: args.beta, delta: args.delta })?
        }
    };
    let loss = match &args.truth {
        Some(path) => {
            let truth: LabelVector = io::read_labels(path, None)?;
            Some(misclassification(&z, &truth)?.value)
        }
        None => None,
    };
    match &args.out {
        Some(path) => {
            io::write_labels(path, &z)?;
            println!("{}", json!({ "n": a.n(), "k": k, "loss": loss }));
        }
        None => {
            print!("{}", io::format_labels(&z));
            if let Some(l) = loss {
                eprintln!("loss {l}");
            }
        }
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> dcbm::Result<()> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => ScenarioConfig::from_json(&read(path)?)?,
        (None, Some(name)) => ScenarioConfig::preset(name)?,
        _ => return Err(Error::Config("give exactly one of --config and --preset".into())),
    };
    if let Some(reps) = args.reps {
        config.repetitions = reps;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(methods) = &args.methods {
        config.methods = methods.iter().map(|m| m.parse::<Method>()).collect::<dcbm::Result<_>>()?;
    }
    config.timings |= args.timings;
    let results = harness::run_scenario(&config)?;
    let file = std::fs::File::create(&args.out)?;
    harness::write_csv(std::io::BufWriter::new(file), &results)?;
    let failed = results.iter().filter(|r| r.loss.is_none()).count();
    if failed > 0 {
        log::warn!("{failed} of {} runs failed", results.len());
    }
    if args.svg.is_some() || args.summary.is_some() {
        let summaries = harness::summarize(&results)?;
        if let Some(path) = &args.svg {
            harness::emit_boxplot_svg(&summaries, path)?;
        }
        if let Some(path) = &args.summary {
            std::fs::write(path, serde_json::to_string_pretty(&summaries)? + "\n")?;
        }
    }
    Ok(())
}

fn testlab(args: TestlabArgs) -> dcbm::Result<()> {
    let test: TestKind = args.test.parse()?;
    let m1 = args.m1.unwrap_or(args.m);
    let inst = TestingInstance::homogeneous(args.theta0, args.m, m1, args.p, args.q)?;
    let est = simulate_errors(&inst, test, args.reps, args.seed)?;
    let bound = error_bound(args.theta0, args.m.min(m1), args.p, args.q);
    println!("{}", json!({ "error": est.error, "se": est.se, "bound": bound }));
    Ok(())
}

fn info(args: InfoArgs) -> dcbm::Result<()> {
    let file = ParamFile::from_json(&read(&args.params)?)?;
    let params = file.resolve()?;
    let (p_b, q_b) = params.p_q();
    let inputs = ExponentInputs {
        theta: params.theta().to_vec(),
        p: args.p.unwrap_or(p_b),
        q: args.q.unwrap_or(q_b),
        k: params.k(),
        beta: args.beta.or(file.beta).unwrap_or(1.0),
        sizes: Some(params.z().community_sizes()),
    };
    let report = info_report(&inputs)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

/// 2 for configuration and input errors, 3 for failures while computing.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. }
        | Error::DegenerateSpectrum(_)
        | Error::EmptyInput
        | Error::NoCommunities
        | Error::DegenerateReference
        | Error::DegenerateProbability(_)
        | Error::EmptyResults
        | Error::Infeasible => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Detect(a) => detect(a),
        Command::Simulate(a) => simulate(a),
        Command::Testlab(a) => testlab(a),
        Command::Info(a) => info(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
