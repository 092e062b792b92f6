//! Command-line laboratory for random k-out subgraphs: host generation,
//! sampling, structural analysis, and Monte Carlo experiments.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kout::analysis::{connected_components, isolated_vertices, vertex_connectivity};
use kout::graph::{
    complete_graph, random_min_degree_host, random_sdg, read_edge_list, two_cliques_plus_matching,
    write_edge_list, Graph,
};
use kout::harness::{
    records_csv, records_jsonl, run_experiment, summary_json, ExperimentConfig, ExperimentKind,
    HarnessError, HostSpec,
};
use kout::sample::{sample_colored, ColorSpec, Mode};

#[derive(Parser)]
#[command(
    name = "kout",
    version,
    about = "Random k-out subgraph laboratory",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a host graph and write it as an edge list
    Generate(GenerateArgs),
    /// Draw a k-out sample over a host graph and write it as JSON
    Sample(SampleArgs),
    /// Structural report (components, degrees, connectivity) for a graph file
    Analyze(AnalyzeArgs),
    /// Run a seeded Monte Carlo experiment
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HostKind {
    Complete,
    TwoCliques,
    Sdg,
    MinDegree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    WithReplacement,
    WithoutReplacement,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::WithReplacement => Mode::WithReplacement,
            ModeArg::WithoutReplacement => Mode::WithoutReplacement,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Jsonl,
}

#[derive(Args)]
struct GenerateArgs {
    /// Host family
    #[arg(long, value_enum)]
    host: HostKind,
    /// Vertex count
    #[arg(long)]
    n: usize,
    /// Minimum degree (min-degree host)
    #[arg(long)]
    m: Option<usize>,
    /// Degree-floor margin (sdg host)
    #[arg(long, default_value_t = 0.1)]
    host_eps: f64,
    /// Edge removal probability (sdg host)
    #[arg(long, default_value_t = 0.3)]
    removal_p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Host graph as an edge-list file
    #[arg(long)]
    host_file: PathBuf,
    /// Choices per vertex per color
    #[arg(long)]
    k: usize,
    /// Number of independent colors
    #[arg(long, default_value_t = 1)]
    colors: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::WithoutReplacement)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    host_file: PathBuf,
    /// Also compute vertex connectivity (max-flow; slow on large graphs)
    #[arg(long)]
    connectivity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: connectivity, hamiltonicity, longpath, longcycle,
    /// counterexample, expansion
    name: ExperimentKind,
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    host: Option<HostKind>,
    /// Edge-list file as the host (alternative to --host)
    #[arg(long)]
    host_file: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Minimum degree (min-degree host)
    #[arg(long)]
    m: Option<usize>,
    /// Degree-floor margin (sdg host)
    #[arg(long)]
    host_eps: Option<f64>,
    /// Edge removal probability (sdg host)
    #[arg(long)]
    removal_p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rotation budget for the Hamilton cycle search
    #[arg(long)]
    rotation_budget: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    factor: Option<f64>,
    /// Random subsets per expansion trial instead of exhaustion
    #[arg(long)]
    expansion_subsets: Option<usize>,
    /// Output base path (writes .jsonl, .csv and .summary.json)
    #[arg(long)]
    out: Option<PathBuf>,
    /// What to print on stdout
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

fn config_error(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        field: "cli".into(),
        msg: msg.into(),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_host(path: &PathBuf) -> Result<Graph, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    read_edge_list(&text).map_err(|e| HarnessError::Config {
        field: "host_file".into(),
        msg: e.to_string(),
    })
}

fn generate(args: GenerateArgs) -> Result<(), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let g = match args.host {
        HostKind::Complete => complete_graph(args.n),
        HostKind::TwoCliques => {
            two_cliques_plus_matching(args.n).map_err(|e| config_error(e.to_string()))?
        }
        HostKind::Sdg => random_sdg(args.n, args.host_eps, args.removal_p, &mut rng)
            .map_err(|e| config_error(e.to_string()))?,
        HostKind::MinDegree => {
            let m = args
                .m
                .ok_or_else(|| config_error("min-degree host needs --m"))?;
            random_min_degree_host(args.n, m, &mut rng).map_err(|e| config_error(e.to_string()))?
        }
    };
    emit(&args.out, &write_edge_list(&g))
}

fn draw_sample(args: SampleArgs) -> Result<(), HarnessError> {
    let g = Arc::new(load_host(&args.host_file)?);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let spec = ColorSpec::uniform(args.colors, args.k);
    let s = sample_colored(&g, &spec, args.mode.into(), &mut rng)
        .map_err(|e| config_error(e.to_string()))?;
    emit(&args.out, &(s.to_json() + "\n"))
}

fn analyze(args: AnalyzeArgs) -> Result<(), HarnessError> {
    let g = load_host(&args.host_file)?;
    let parts = connected_components(&g);
    let mut sizes = parts.sizes().to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut doc = serde_json::json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "min_degree": g.min_degree(),
        "components": sizes,
        "isolated": isolated_vertices(&g),
    });
    if args.connectivity {
        doc["vertex_connectivity"] = serde_json::json!(vertex_connectivity(&g));
    }
    emit(
        &args.out,
        &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"),
    )
}

fn experiment(args: ExperimentArgs) -> Result<(), HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| HarnessError::Config {
                    field: "config".into(),
                    msg: e.to_string(),
                })?;
            cfg
        }
        None => {
            let host = build_host_spec(&args, None)?;
            ExperimentConfig::new(args.name, host)
        }
    };
    // flags override file values
    cfg.experiment = args.name;
    if args.host.is_some() || args.host_file.is_some() {
        cfg.host = build_host_spec(&args, Some(&cfg))?;
    } else if let Some(n) = args.n {
        cfg.host = with_order(&cfg.host, n);
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(eps) = args.eps {
        cfg.eps = eps;
    }
    if let Some(mode) = args.mode {
        cfg.mode = Some(mode.into());
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(b) = args.rotation_budget {
        cfg.rotation_budget = b;
    }
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    if let Some(f) = args.factor {
        cfg.factor = f;
    }
    if let Some(s) = args.expansion_subsets {
        cfg.expansion_subsets = Some(s);
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }

    let output = run_experiment(&cfg)?;
    let text = match args.format {
        FormatArg::Csv => records_csv(&output.records),
        FormatArg::Jsonl => records_jsonl(&output.records),
        FormatArg::Json => summary_json(&output) + "\n",
    };
    print!("{text}");
    Ok(())
}

fn build_host_spec(
    args: &ExperimentArgs,
    base: Option<&ExperimentConfig>,
) -> Result<HostSpec, HarnessError> {
    if let Some(path) = &args.host_file {
        return Ok(HostSpec::EdgeList { path: path.clone() });
    }
    let kind = match (args.host, args.name) {
        (Some(k), _) => k,
        // the counterexample host is forced
        (None, ExperimentKind::Counterexample) => HostKind::TwoCliques,
        (None, _) => {
            return Err(config_error(
                "need --host, --host-file, or a --config with a host",
            ))
        }
    };
    let n = args
        .n
        .or_else(|| base.and_then(|c| c.host.clone().order_or_none()))
        .ok_or_else(|| config_error("need --n for a generated host"))?;
    Ok(match kind {
        HostKind::Complete => HostSpec::Complete { n },
        HostKind::TwoCliques => HostSpec::TwoCliques { n },
        HostKind::Sdg => HostSpec::Sdg {
            n,
            eps: args.host_eps.unwrap_or(0.1),
            removal_p: args.removal_p.unwrap_or(0.3),
        },
        HostKind::MinDegree => HostSpec::MinDegree {
            n,
            m: args
                .m
                .ok_or_else(|| config_error("min-degree host needs --m"))?,
        },
    })
}

fn with_order(host: &HostSpec, n: usize) -> HostSpec {
    match *host {
        HostSpec::Complete { .. } => HostSpec::Complete { n },
        HostSpec::TwoCliques { .. } => HostSpec::TwoCliques { n },
        HostSpec::Sdg { eps, removal_p, .. } => HostSpec::Sdg { n, eps, removal_p },
        HostSpec::MinDegree { m, .. } => HostSpec::MinDegree { n, m },
        HostSpec::EdgeList { ref path } => HostSpec::EdgeList { path: path.clone() },
    }
}

trait OrderOrNone {
    fn order_or_none(self) -> Option<usize>;
}

impl OrderOrNone for HostSpec {
    fn order_or_none(self) -> Option<usize> {
        match self {
            HostSpec::Complete { n }
            | HostSpec::TwoCliques { n }
            | HostSpec::Sdg { n, .. }
            | HostSpec::MinDegree { n, .. } => Some(n),
            HostSpec::EdgeList { .. } => None,
        }
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes early (e.g. `kout ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Sample(args) => draw_sample(args),
        Command::Analyze(args) => analyze(args),
        Command::Experiment(args) => experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Config { .. } => ExitCode::from(2),
                HarnessError::Io(_) => ExitCode::from(3),
            }
        }
    }
}
