//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error. Data goes to
//! stdout or files; diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::degree_sequences::{self, DegreeSequence};
use crate::error::Error;
use crate::experiments::{self, ExperimentConfig, ModelKind};
use crate::graph::{self, Graph};
use crate::oracle;
use crate::par::{self, Exec};
use crate::samplers;
use crate::theory::{self, ModelParams, TheoryReport};

#[derive(Debug, Parser)]
#[command(name = "trigraph", version, about = "Triangles and clustering in power-law random graphs")]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a power-law degree sequence.
    GenerateDegrees(GenerateArgs),
    /// Sample a graph on a degree sequence.
    Sample(SampleArgs),
    /// Count triangles of an edge-list file.
    Triangles(GraphArgs),
    /// Clustering curve c(k) of an edge-list file as CSV.
    Ck(GraphArgs),
    /// Limit constants as JSON; with --k-list also the c(k) predictions.
    Theory(TheoryArgs),
    /// Exact queries on the ensemble of all graphs with given degrees.
    Oracle(OracleArgs),
    /// Replicate sweep writing CSV and JSON output.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    c_const: f64,
    /// Seed for i.i.d. degrees; without it the deterministic quantile
    /// construction is used.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// uniform, ecm or grg.
    #[arg(long)]
    model: ModelKind,
    /// Degree file, or inline comma-separated degrees.
    #[arg(long)]
    degrees: String,
    /// Switches of the uniform chain (default: κ m ln m).
    #[arg(long)]
    switches: Option<u64>,
    #[arg(long, default_value_t = samplers::DEFAULT_KAPPA)]
    kappa: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list output; switch statistics go to `<out>.stats.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Edge-list file.
    graph: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    c_const: f64,
    /// Graph size for c(k) predictions; also sets μ to the quantile
    /// sequence's L_n/n when --mu is absent.
    #[arg(long)]
    n: Option<u64>,
    /// Mean degree μ (default: L_n/n of the quantile sequence at --n, else 1).
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    /// Degrees to predict c(k) for (requires --n).
    #[arg(long, value_delimiter = ',')]
    k_list: Vec<u64>,
    /// Prediction CSV output (default: stdout after the JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Degree file, or inline comma-separated degrees.
    #[arg(long)]
    degrees: String,
    /// Pair `u,v` whose edge probability to report.
    #[arg(long)]
    edge: Option<String>,
    /// Conditioning edges `u,v;u,v;...` assumed present.
    #[arg(long)]
    given: Option<String>,
    /// Output file for the ensemble dump (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    c_const: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<u64>,
    /// Models, comma-separated.
    #[arg(long, value_delimiter = ',')]
    model: Vec<ModelKind>,
    #[arg(long)]
    replicates: Option<u32>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    k_list: Vec<u64>,
    /// Also report the √(μn) window share of triangles at this ε.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads;
    let outcome = match threads {
        Some(0) => usage("--threads must be at least 1"),
        Some(t) => par::with_threads(t, move || dispatch(cli.command)),
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error [{}]: {e}", e.code());
            2
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::GenerateDegrees(a) => generate(a),
        Command::Sample(a) => sample(a),
        Command::Triangles(a) => triangles(a),
        Command::Ck(a) => ck(a),
        Command::Theory(a) => theory_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e).into())
        }
    }
}

fn load_degrees(arg: &str) -> CliResult<DegreeSequence> {
    let path = Path::new(arg);
    if path.is_file() {
        Ok(DegreeSequence::read(path)?)
    } else if arg.contains(',') || arg.trim().parse::<u32>().is_ok() {
        Ok(DegreeSequence::parse_inline(arg)?)
    } else {
        usage(format!("--degrees: '{arg}' is neither a file nor an inline list"))
    }
}

fn parse_pair(text: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [u, v] => match (u.parse(), v.parse()) {
            (Ok(u), Ok(v)) => Ok((u, v)),
            _ => usage(format!("bad vertex pair '{text}'")),
        },
        _ => usage(format!("expected a pair 'u,v', got '{text}'")),
    }
}

fn generate(a: GenerateArgs) -> CliResult<()> {
    let ds = match a.seed {
        Some(seed) => degree_sequences::sample_iid(a.n, a.tau, a.c_const, seed)?,
        None => degree_sequences::generate_quantile(a.n, a.tau, a.c_const)?,
    };
    emit(a.out.as_deref(), &ds.to_text())
}

fn sample(a: SampleArgs) -> CliResult<()> {
    if a.switches.is_some() && a.model != ModelKind::Uniform {
        return usage("--switches applies to the uniform model only");
    }
    let ds = load_degrees(&a.degrees)?;
    let (g, stats) = match a.model {
        ModelKind::Uniform => {
            let switches = a.switches.unwrap_or_else(|| samplers::default_burn_in(&ds, a.kappa));
            let (g, stats) = samplers::uniform_sample_mcmc(&ds, switches, a.seed)?;
            (g, Some(stats))
        }
        other => {
            let (g, _, _) = experiments::sample_model(other, &ds, a.seed, a.kappa, 0)?;
            (g, None)
        }
    };
    g.write(&a.out)?;
    if let Some(stats) = stats {
        let mut path = a.out.clone().into_os_string();
        path.push(".stats.json");
        let path = PathBuf::from(path);
        std::fs::write(&path, stats.to_json() + "\n").map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    Ok(Graph::read(path)?)
}

fn triangles(a: GraphArgs) -> CliResult<()> {
    let g = read_graph(&a.graph)?;
    let t = graph::count_triangles(&g, Exec::Parallel);
    emit(a.out.as_deref(), &format!("{t}\n"))
}

fn ck(a: GraphArgs) -> CliResult<()> {
    let g = read_graph(&a.graph)?;
    let curve = graph::clustering_curve(&g, Exec::Parallel);
    emit(a.out.as_deref(), &curve.to_csv())
}

fn theory_cmd(a: TheoryArgs) -> CliResult<()> {
    if !a.k_list.is_empty() && a.n.is_none() {
        return usage("--k-list requires --n");
    }
    let mu = match (a.mu, a.n) {
        (Some(mu), _) => mu,
        (None, Some(n)) => {
            let n = usize::try_from(n).map_err(|_| Failure::Usage("--n too large".into()))?;
            degree_sequences::generate_quantile(n, a.tau, a.c_const)?.mean()
        }
        (None, None) => 1.0,
    };
    let params = ModelParams::new(a.n.unwrap_or(1), a.tau, a.c_const, mu)?;
    let report = TheoryReport::compute(&params, a.rel_tol, Exec::Parallel)?;
    let preds = a
        .k_list
        .iter()
        .map(|&k| theory::predict_ck_with(&params, k, theory::DEFAULT_BAND, a.rel_tol))
        .collect::<Result<Vec<_>, _>>()?;
    let json = json_17(&serde_json::to_value(&report).expect("report serializes"));
    emit(None, &(json + "\n"))?;
    if !preds.is_empty() {
        emit(a.out.as_deref(), &theory::predictions_to_csv(&preds))?;
    }
    Ok(())
}

/// JSON text with every float printed to 17 significant digits.
fn json_17(value: &serde_json::Value) -> String {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            let fields: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{}: {}", Value::String(k.clone()), json_17(v)))
                .collect();
            format!("{{{}}}", fields.join(", "))
        }
        Value::Array(items) => format!("[{}]", items.iter().map(json_17).collect::<Vec<_>>().join(", ")),
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            format!("{x:.16e}")
        }
        other => other.to_string(),
    }
}

fn reduce(num: u64, den: u64) -> (u64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}

fn oracle_cmd(a: OracleArgs) -> CliResult<()> {
    let ds = load_degrees(&a.degrees)?;
    let given = match &a.given {
        Some(text) => text
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(parse_pair)
            .collect::<CliResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    let edge = a.edge.as_deref().map(parse_pair).transpose()?;
    if edge.is_none() && !given.is_empty() {
        return usage("--given requires --edge");
    }
    let ensemble = oracle::enumerate_graphs(&ds, Exec::Parallel)?;
    match edge {
        Some((u, v)) => {
            let (num, den) = ensemble.edge_probability_counts(u, v, &given)?;
            let (p, q) = reduce(num, den);
            emit(None, &format!("{:.6}\n{p}/{q}\n", num as f64 / den as f64))
        }
        None => emit(a.out.as_deref(), &ensemble.to_dump()),
    }
}

fn experiment(a: ExperimentArgs) -> CliResult<()> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::read(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = a.tau {
        cfg.tau = v;
    }
    if let Some(v) = a.c_const {
        cfg.c_const = v;
    }
    if !a.n_grid.is_empty() {
        cfg.n_grid = a.n_grid.clone();
    }
    if !a.model.is_empty() {
        cfg.models = a.model.clone();
    }
    if let Some(v) = a.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = a.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = a.kappa {
        cfg.burn_in_kappa = v;
    }
    if !a.k_list.is_empty() {
        cfg.k_list = a.k_list.clone();
    }
    if let Some(v) = a.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = &a.out {
        cfg.output_dir = v.clone();
    }
    if let Some(eps) = a.epsilon {
        if !(eps > 0.0 && eps < 1.0) {
            return usage("--epsilon must lie in (0, 1)");
        }
    }
    if let Err(e) = cfg.validate() {
        return usage(e.to_string());
    }
    let exec = Exec::Parallel;
    let dir = cfg.output_dir.clone();
    let (sweep, rows) = if cfg.k_list.is_empty() {
        (experiments::run_triangle_sweep(&cfg, exec)?, None)
    } else {
        let ck = experiments::run_ck_sweep(&cfg, &cfg.k_list, exec)?;
        (ck.triangles, Some(ck.rows))
    };
    let files = experiments::write_outputs(&cfg, &sweep, rows.as_deref(), &dir)?;
    if let Some(eps) = a.epsilon {
        let shares = experiments::run_sweep_with(&cfg, exec, |g, r| {
            experiments::contribution_diagnostics(g, eps, r.mu, cfg.tau, &cfg.k_list, Exec::Sequential)
                .map(|d| (r.model, r.n, r.replicate_index, d))
        })?
        .1
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let mut csv = String::from("model,n,replicate,epsilon,share\n");
        for (m, n, r, d) in shares {
            csv.push_str(&format!("{},{n},{r},{},{:.16e}\n", m.name(), d.epsilon, d.share));
        }
        let path = dir.join("window_share.csv");
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    }
    eprintln!("wrote {}", files.triangles_csv.display());
    if let Some(p) = &files.ck_csv {
        eprintln!("wrote {}", p.display());
    }
    eprintln!("wrote {}", files.summary_json.display());
    Ok(())
}
