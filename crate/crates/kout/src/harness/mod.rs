//! Experiment orchestration: configuration, deterministic per-trial seeding,
//! parallel trial execution, and result serialization (JSONL records, JSON
//! summary, CSV metrics).

pub mod stats;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{common_neighbor_cover, expansion_check, is_k_connected, SearchMode};
use crate::dfs::long_path_trial;
use crate::epochs::long_cycle;
use crate::graph::{
    complete_graph, random_min_degree_host, random_sdg, read_edge_list, two_cliques_plus_matching,
    Graph,
};
use crate::posa::hamiltonicity_search;
use crate::sample::{sample, Mode};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at {field}: {msg}")]
    Config { field: String, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn config_err(field: &str, msg: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        field: field.to_string(),
        msg: msg.into(),
    }
}

/// Host graph family plus parameters, or a path to an edge-list file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HostSpec {
    Complete { n: usize },
    TwoCliques { n: usize },
    Sdg { n: usize, eps: f64, removal_p: f64 },
    MinDegree { n: usize, m: usize },
    EdgeList { path: PathBuf },
}

impl HostSpec {
    fn validate(&self) -> Result<(), HarnessError> {
        match *self {
            HostSpec::Complete { n } => {
                if n < 1 {
                    return Err(config_err("host.n", "need at least one vertex"));
                }
            }
            HostSpec::TwoCliques { n } => {
                if n % 2 != 0 || n < 4 {
                    return Err(config_err("host.n", "order must be even and at least 4"));
                }
            }
            HostSpec::Sdg { n, eps, removal_p } => {
                if !(0.0..0.5).contains(&eps) || eps == 0.0 {
                    return Err(config_err("host.eps", "eps must lie in (0, 1/2)"));
                }
                if !(0.0..=1.0).contains(&removal_p) {
                    return Err(config_err("host.removal_p", "must be a probability"));
                }
                let floor = ((0.5 + eps) * n as f64).ceil() as usize;
                if n == 0 || floor > n - 1 {
                    return Err(config_err("host.n", "degree floor exceeds n-1"));
                }
            }
            HostSpec::MinDegree { n, m } => {
                if n == 0 || m > n - 1 {
                    return Err(config_err("host.m", "minimum degree above n-1"));
                }
            }
            HostSpec::EdgeList { .. } => {}
        }
        Ok(())
    }

    /// Vertex count, when it is known without reading a file.
    fn order(&self) -> Option<usize> {
        match *self {
            HostSpec::Complete { n }
            | HostSpec::TwoCliques { n }
            | HostSpec::Sdg { n, .. }
            | HostSpec::MinDegree { n, .. } => Some(n),
            HostSpec::EdgeList { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Connectivity,
    Hamiltonicity,
    Longpath,
    Longcycle,
    Counterexample,
    Expansion,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Connectivity => "connectivity",
            ExperimentKind::Hamiltonicity => "hamiltonicity",
            ExperimentKind::Longpath => "longpath",
            ExperimentKind::Longcycle => "longcycle",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::Expansion => "expansion",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "connectivity" => Ok(ExperimentKind::Connectivity),
            "hamiltonicity" => Ok(ExperimentKind::Hamiltonicity),
            "longpath" => Ok(ExperimentKind::Longpath),
            "longcycle" => Ok(ExperimentKind::Longcycle),
            "counterexample" => Ok(ExperimentKind::Counterexample),
            "expansion" => Ok(ExperimentKind::Expansion),
            other => Err(format!("unknown experiment {other:?}")),
        }
    }
}

fn default_trials() -> usize {
    100
}
fn default_k() -> usize {
    3
}
fn default_eps() -> f64 {
    0.25
}
fn default_rotation_budget() -> usize {
    100_000
}
fn default_cover_p() -> f64 {
    0.3
}
fn default_cover_threshold() -> usize {
    2
}
fn default_cover_retries() -> usize {
    10
}
fn default_alpha() -> f64 {
    0.2
}
fn default_factor() -> f64 {
    3.0
}

/// Full description of one experiment run. Unset fields take the documented
/// defaults; the per-trial seed is derived from `seed` and the trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub host: HostSpec,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Choice mode; defaults per experiment (see [`ExperimentConfig::mode_in_effect`]).
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Rotation budget of the Hamilton cycle search.
    #[serde(default = "default_rotation_budget")]
    pub rotation_budget: usize,
    /// Inclusion probability of the common-neighbor cover attempts.
    #[serde(default = "default_cover_p")]
    pub cover_p: f64,
    /// Required common neighbors inside the cover for every outside pair.
    #[serde(default = "default_cover_threshold")]
    pub cover_threshold: usize,
    #[serde(default = "default_cover_retries")]
    pub cover_retries: usize,
    /// Expansion check: maximum set fraction and required growth factor.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_factor")]
    pub factor: f64,
    /// Expansion check: random subsets per trial instead of exhaustion.
    #[serde(default)]
    pub expansion_subsets: Option<usize>,
    /// Output base path: writes `<out>.jsonl`, `<out>.csv`, `<out>.summary.json`.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, host: HostSpec) -> Self {
        ExperimentConfig {
            experiment,
            host,
            k: default_k(),
            eps: default_eps(),
            mode: None,
            trials: default_trials(),
            seed: 0,
            rotation_budget: default_rotation_budget(),
            cover_p: default_cover_p(),
            cover_threshold: default_cover_threshold(),
            cover_retries: default_cover_retries(),
            alpha: default_alpha(),
            factor: default_factor(),
            expansion_subsets: None,
            out: None,
        }
    }

    /// Without-replacement everywhere a degree floor on the sampled subgraph
    /// matters (k-connectivity requires minimum degree k, which repeated
    /// choices break at finite sizes); the path and cycle searches reveal
    /// their choices with replacement internally.
    pub fn mode_in_effect(&self) -> Mode {
        self.mode.unwrap_or(match self.experiment {
            ExperimentKind::Connectivity
            | ExperimentKind::Hamiltonicity
            | ExperimentKind::Expansion
            | ExperimentKind::Counterexample => Mode::WithoutReplacement,
            ExperimentKind::Longpath | ExperimentKind::Longcycle => Mode::WithReplacement,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.host.validate()?;
        if self.trials < 1 {
            return Err(config_err("trials", "need at least one trial"));
        }
        if self.k < 1 {
            return Err(config_err("k", "k must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.eps) || self.eps == 0.0 {
            return Err(config_err("eps", "eps must lie in (0, 1)"));
        }
        match self.experiment {
            ExperimentKind::Counterexample => {
                let HostSpec::TwoCliques { n } = self.host else {
                    return Err(config_err(
                        "host.kind",
                        "counterexample runs on the two-cliques host",
                    ));
                };
                if self.k > n / 2 {
                    return Err(config_err("k", "need k at most n/2"));
                }
                if self.mode_in_effect() != Mode::WithoutReplacement {
                    return Err(config_err(
                        "mode",
                        "the closed-form probability assumes without-replacement choices",
                    ));
                }
            }
            ExperimentKind::Expansion => {
                if !(0.0..=1.0).contains(&self.alpha) {
                    return Err(config_err("alpha", "alpha must lie in [0, 1]"));
                }
                if self.expansion_subsets.is_none() {
                    if let Some(n) = self.host.order() {
                        let max = (self.alpha * n as f64).floor() as u64;
                        let mut total: u64 = 0;
                        for l in 1..=max {
                            let mut acc: u64 = 1;
                            for i in 0..l.min(n as u64 - l) {
                                acc = acc.saturating_mul(n as u64 - i) / (i + 1);
                            }
                            total = total.saturating_add(acc);
                        }
                        if total > 1_000_000 {
                            return Err(config_err(
                                "expansion_subsets",
                                "exhaustive subset scan too large; set expansion_subsets",
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
        if self.mode_in_effect() == Mode::WithoutReplacement {
            // degree floors per host family; edge-list hosts are checked when
            // the sampler runs
            let enough = match self.host {
                HostSpec::Complete { n } => self.k < n,
                HostSpec::TwoCliques { n } => self.k <= n / 2,
                HostSpec::Sdg { n, eps, .. } => self.k <= ((0.5 + eps) * n as f64).ceil() as usize,
                HostSpec::MinDegree { m, .. } => self.k <= m,
                HostSpec::EdgeList { .. } => true,
            };
            if !enough {
                return Err(config_err(
                    "k",
                    "k exceeds the host minimum degree for without-replacement choices",
                ));
            }
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: an odd-multiplier index mix xored into the root, pushed
/// through a splitmix64 finalizer. Injective in the trial index for any fixed
/// root seed (every stage is a bijection on u64).
pub fn trial_seed(root: u64, index: u64) -> u64 {
    splitmix64(root ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// One trial's record: derived seed, success flag, and named metrics. The
/// success flag is always recomputable from the metrics (see each
/// experiment's `success` rule in [`run_experiment`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub experiment: String,
    pub trials: usize,
    pub successes: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub metric_means: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub summary: SummaryStats,
    pub records: Vec<TrialRecord>,
}

fn build_host(spec: &HostSpec, rng: &mut ChaCha8Rng) -> Graph {
    match *spec {
        HostSpec::Complete { n } => complete_graph(n),
        HostSpec::TwoCliques { n } => two_cliques_plus_matching(n).expect("validated"),
        HostSpec::Sdg { n, eps, removal_p } => {
            random_sdg(n, eps, removal_p, rng).expect("validated")
        }
        HostSpec::MinDegree { n, m } => random_min_degree_host(n, m, rng).expect("validated"),
        HostSpec::EdgeList { .. } => unreachable!("edge-list hosts are prebuilt"),
    }
}

fn metrics(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// True iff some vertex chose its matched partner (`i ↔ i + n/2`).
pub(crate) fn has_matching_edge(s: &crate::sample::KOutSample) -> bool {
    let n = s.host().n();
    let half = n / 2;
    s.arcs().any(|(v, w, _)| w == (v + half) % n)
}

fn run_one_trial(
    cfg: &ExperimentConfig,
    fixed_host: Option<&Arc<Graph>>,
    trial: usize,
) -> TrialRecord {
    let seed = trial_seed(cfg.seed, trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let host = match fixed_host {
        Some(g) => Arc::clone(g),
        None => Arc::new(build_host(&cfg.host, &mut rng)),
    };
    let mode = cfg.mode_in_effect();
    let (success, m) = match cfg.experiment {
        ExperimentKind::Connectivity => {
            let s = sample(&host, cfg.k, mode, &mut rng).expect("validated degrees");
            let gk = s.underlying_graph(None);
            let connected = is_k_connected(&gk, cfg.k);
            let cover = common_neighbor_cover(
                &host,
                cfg.cover_threshold,
                cfg.cover_p,
                cfg.cover_retries,
                &mut rng,
            );
            let (cover_found, cover_size, isolated_outside) = match cover {
                Ok(l) => {
                    let mut in_l = vec![false; host.n()];
                    for &v in &l {
                        in_l[v] = true;
                    }
                    let isolated = host
                        .vertices()
                        .filter(|&v| !in_l[v])
                        .filter(|&v| gk.neighbors(v).iter().all(|&w| in_l[w]))
                        .count();
                    (1.0, l.len() as f64, isolated as f64)
                }
                Err(_) => (0.0, 0.0, -1.0),
            };
            (
                connected,
                metrics(&[
                    ("k_connected", connected as u64 as f64),
                    ("min_degree_gk", gk.min_degree() as f64),
                    ("cover_found", cover_found),
                    ("cover_size", cover_size),
                    ("isolated_outside_cover", isolated_outside),
                ]),
            )
        }
        ExperimentKind::Hamiltonicity => {
            let s = sample(&host, cfg.k, mode, &mut rng).expect("validated degrees");
            let gk = s.underlying_graph(None);
            let cycle = hamiltonicity_search(&gk, cfg.rotation_budget, &mut rng);
            let found = cycle.is_some();
            (
                found,
                metrics(&[
                    ("found", found as u64 as f64),
                    ("cycle_len", cycle.map_or(0.0, |c| c.len() as f64)),
                    ("edges_gk", gk.edge_count() as f64),
                ]),
            )
        }
        ExperimentKind::Longpath => {
            let (trial_out, run) = long_path_trial(&host, cfg.k, cfg.eps, &mut rng);
            (
                trial_out.success,
                metrics(&[
                    ("achieved", trial_out.achieved as f64),
                    ("target", trial_out.target),
                    ("budget", trial_out.budget as f64),
                    ("hits", run.hits as f64),
                    ("restarts", run.restarts as f64),
                    ("k_sufficient", trial_out.k_sufficient as u64 as f64),
                    ("min_degree", trial_out.min_degree as f64),
                ]),
            )
        }
        ExperimentKind::Longcycle => {
            let run = long_cycle(&host, cfg.k, cfg.eps, &mut rng);
            let found = run.result.cycle.is_some();
            let success = found && run.result.length as f64 >= run.result.target;
            (
                success,
                metrics(&[
                    ("found", found as u64 as f64),
                    ("cycle_len", run.result.length as f64),
                    ("target", run.result.target),
                    ("epochs", run.epochs.len() as f64),
                    ("interrupted", run.interrupted.is_some() as u64 as f64),
                ]),
            )
        }
        ExperimentKind::Counterexample => {
            let s = sample(&host, cfg.k, mode, &mut rng).expect("validated degrees");
            let clean = !has_matching_edge(&s);
            (clean, metrics(&[("no_matching_edge", clean as u64 as f64)]))
        }
        ExperimentKind::Expansion => {
            let s = sample(&host, cfg.k, mode, &mut rng).expect("validated degrees");
            let search = match cfg.expansion_subsets {
                None => SearchMode::Exhaustive,
                Some(t) => SearchMode::Randomized(t),
            };
            let report = expansion_check(&s, cfg.alpha, cfg.factor, search, &mut rng)
                .expect("feasibility validated");
            let violated = report.witness.is_some();
            (
                !violated,
                metrics(&[
                    ("violated", violated as u64 as f64),
                    ("checked", report.checked as f64),
                    (
                        "witness_size",
                        report.witness.as_ref().map_or(0.0, |w| w.len() as f64),
                    ),
                ]),
            )
        }
    };
    TrialRecord {
        trial,
        seed,
        success,
        metrics: m,
    }
}

fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KOUT_THREADS") {
        if let Ok(t) = v.parse::<usize>() {
            builder = builder.num_threads(t.max(1));
        }
    }
    builder.build().expect("thread pool")
}

/// Runs every trial of `cfg` (in parallel, capped by `KOUT_THREADS`), and
/// reduces the records into summary statistics. Identical configs produce
/// identical outputs; records come back sorted by trial index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let fixed_host = match &cfg.host {
        HostSpec::EdgeList { path } => {
            let text = std::fs::read_to_string(path)?;
            let g = read_edge_list(&text).map_err(|e| config_err("host.path", e.to_string()))?;
            Some(Arc::new(g))
        }
        _ => None,
    };
    let mut records: Vec<TrialRecord> = thread_pool().install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_one_trial(cfg, fixed_host.as_ref(), i))
            .collect()
    });
    records.sort_by_key(|r| r.trial);

    let successes = records.iter().filter(|r| r.success).count();
    let (lo, hi) = stats::wilson_interval(successes, records.len(), 1.96);
    let mut metric_means = BTreeMap::new();
    for r in &records {
        for (k, v) in &r.metrics {
            *metric_means.entry(k.clone()).or_insert(0.0) += v;
        }
    }
    for v in metric_means.values_mut() {
        *v /= records.len() as f64;
    }
    let summary = SummaryStats {
        experiment: cfg.experiment.name().to_string(),
        trials: records.len(),
        successes,
        frequency: successes as f64 / records.len() as f64,
        wilson_low: lo,
        wilson_high: hi,
        metric_means,
    };
    let output = RunOutput {
        config: cfg.clone(),
        summary,
        records,
    };
    if let Some(base) = &cfg.out {
        write_outputs(base, &output)?;
    }
    Ok(output)
}

/// One JSON object per trial, in trial order.
pub fn records_jsonl(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Header `trial,seed,success,<metrics…>` with metric columns in alphabetical
/// order, so runs diff cleanly.
pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut columns: Vec<String> = records
        .iter()
        .flat_map(|r| r.metrics.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    columns.sort();
    let mut out = String::from("trial,seed,success");
    for c in &columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!("{},{},{}", r.trial, r.seed, r.success as u8));
        for c in &columns {
            out.push(',');
            match r.metrics.get(c) {
                Some(v) => out.push_str(&format_metric(*v)),
                None => out.push_str(""),
            }
        }
        out.push('\n');
    }
    out
}

fn format_metric(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn summary_json(output: &RunOutput) -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "config": output.config,
        "summary": output.summary,
    }))
    .expect("summary serializes")
}

/// Writes `<base>.jsonl`, `<base>.csv` and `<base>.summary.json`.
pub fn write_outputs(base: &Path, output: &RunOutput) -> Result<(), HarnessError> {
    let with_ext = |ext: &str| -> PathBuf {
        let mut p = base.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    std::fs::write(with_ext(".jsonl"), records_jsonl(&output.records))?;
    std::fs::write(with_ext(".csv"), records_csv(&output.records))?;
    std::fs::write(with_ext(".summary.json"), summary_json(output))?;
    Ok(())
}

/// Closed-form and sampled probabilities that the k-out subgraph of the
/// two-cliques-plus-matching host misses every matching edge.
///
/// Each vertex avoids its unique partner among its `n/2` neighbors with
/// probability `1 - 2k/n` (choices without replacement), independently, so
/// the exact probability is `(1 - 2k/n)^n`; `e^{-2k}` is its large-`n` limit.
/// `claimed_bound` is the `n/2`-exponent form `(1 - 2k/n)^{n/2} ~ e^{-k}`.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub empirical_p: f64,
    pub exact_p: f64,
    pub asymptotic_e2k: f64,
    pub claimed_bound: f64,
    /// Binomial standard deviation of the empirical frequency at `exact_p`.
    pub sigma: f64,
}

pub fn counterexample_experiment(
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<CounterexampleReport, HarnessError> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Counterexample, HostSpec::TwoCliques { n });
    cfg.k = k;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.validate()?;

    let host = Arc::new(two_cliques_plus_matching(n).expect("validated"));
    let mut clean = 0usize;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i as u64));
        let s = sample(&host, k, Mode::WithoutReplacement, &mut rng).expect("degrees validated");
        if !has_matching_edge(&s) {
            clean += 1;
        }
    }
    let ratio = 1.0 - 2.0 * k as f64 / n as f64;
    let exact_p = ratio.powi(n as i32);
    Ok(CounterexampleReport {
        n,
        k,
        trials,
        empirical_p: clean as f64 / trials as f64,
        exact_p,
        asymptotic_e2k: (-2.0 * k as f64).exp(),
        claimed_bound: ratio.powi((n / 2) as i32),
        sigma: (exact_p * (1.0 - exact_p) / trials as f64).sqrt(),
    })
}
