//! Randomized depth-first search over lazily revealed out-choices.
//!
//! The searcher keeps three vertex classes: `S` (exhausted: all `k` choices of
//! the active color spent), `U` (the visited stack, which always spells a path
//! through the revealed edges), and `T` (unvisited). Each step the stack top
//! either draws one uniform out-neighbor — a draw landing in `T` is a *hit*
//! and climbs onto the stack — or, with its budget spent, drops to `S`. When
//! the stack empties, a vertex of `T` is placed on it (a *restart*; the initial
//! root selection counts as one). The run stops at the draw budget or when
//! everything is exhausted.
//!
//! Bookkeeping identities maintained at every step (`h` hits, `r` restarts):
//! `|S ∪ U| = h + r`, hence `|S ∪ U| ≥ h`; every budget-exhausted member of
//! `S` consumed exactly `k` draws, so `k·|S| ≤ draws` on hosts of positive
//! minimum degree. Degree-0 vertices cannot draw and drop straight to `S`.

use rand::Rng;
use std::sync::Arc;

use crate::graph::{Graph, VertexId};
use crate::sample::{oracle, ChoiceOracle, ColorId, ColorSpec, Mode};

/// How the next root is picked when the stack runs empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartRule {
    UniformRandom,
    /// Deterministic smallest-id pick, for reproducible fixtures.
    LowestId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub step: usize,
    pub exhausted: usize,
    pub stack: usize,
    pub unvisited: usize,
    pub hits: usize,
    pub restarts: usize,
}

/// Outcome of one DFS run.
#[derive(Debug, Clone)]
pub struct DfsRun {
    /// Longest stack configuration observed, oldest entry first.
    pub best_path: Vec<VertexId>,
    pub hits: usize,
    pub restarts: usize,
    pub draws: usize,
    pub budget: usize,
    /// Hit edges `(parent, child)` in discovery order.
    pub tree_edges: Vec<(VertexId, VertexId)>,
    /// Every vertex that left `T`, with its discovering parent (`None` for
    /// restart roots), in discovery order.
    pub discoveries: Vec<(VertexId, Option<VertexId>)>,
    pub trace: Vec<TraceRow>,
    pub final_exhausted: usize,
    pub final_stack: usize,
    pub final_unvisited: usize,
}

impl DfsRun {
    /// Edge count of the best path.
    pub fn best_len_edges(&self) -> usize {
        self.best_path.len().saturating_sub(1)
    }

    /// Stack profile as CSV with header `step,s,u,t,h,r`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,s,u,t,h,r\n");
        for row in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.step, row.exhausted, row.stack, row.unvisited, row.hits, row.restarts
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Exhausted,
    Stack,
    Unvisited,
}

struct DfsEngine<'a, R: Rng> {
    oracle: &'a mut ChoiceOracle,
    color: ColorId,
    budget: usize,
    restart_rule: RestartRule,
    validate: bool,
    rng: &'a mut R,

    labels: Vec<Label>,
    stack: Vec<VertexId>,
    tree_set: std::collections::HashSet<(VertexId, VertexId)>,
    run: DfsRun,
    step: usize,
    exhausted_by_draws: usize,
    exhausted_isolated: usize,
}

/// Core loop shared by the standalone long-path search and the epoch-colored
/// exploration: draws only the given color from the provided oracle.
pub(crate) fn dfs_core<R: Rng>(
    oracle_ref: &mut ChoiceOracle,
    color: ColorId,
    budget: usize,
    restart_rule: RestartRule,
    validate: bool,
    rng: &mut R,
) -> DfsRun {
    let n = oracle_ref.host().n();
    let mut engine = DfsEngine {
        oracle: oracle_ref,
        color,
        budget,
        restart_rule,
        validate,
        rng,
        labels: vec![Label::Unvisited; n],
        stack: Vec::new(),
        tree_set: std::collections::HashSet::new(),
        run: DfsRun {
            best_path: Vec::new(),
            hits: 0,
            restarts: 0,
            draws: 0,
            budget,
            tree_edges: Vec::new(),
            discoveries: Vec::new(),
            trace: Vec::new(),
            final_exhausted: 0,
            final_stack: 0,
            final_unvisited: n,
        },
        step: 0,
        exhausted_by_draws: 0,
        exhausted_isolated: 0,
    };
    engine.run();
    engine.finish()
}

impl<R: Rng> DfsEngine<'_, R> {
    fn run(&mut self) {
        let n = self.labels.len();
        loop {
            if self.run.final_exhausted == n {
                break;
            }
            if self.stack.is_empty() {
                if self.run.final_unvisited == 0 || self.run.draws == self.budget {
                    break;
                }
                let root = self.pick_restart();
                self.enter_stack(root, None);
                self.run.restarts += 1;
                self.after_step();
                continue;
            }
            let active = *self.stack.last().expect("stack nonempty");
            if self.oracle.host().degree(active) == 0 {
                self.pop_to_exhausted();
                self.exhausted_isolated += 1;
                self.after_step();
                continue;
            }
            if self.oracle.remaining(active, self.color) == 0 {
                self.pop_to_exhausted();
                self.exhausted_by_draws += 1;
                self.after_step();
                continue;
            }
            if self.run.draws == self.budget {
                break;
            }
            let w = self
                .oracle
                .draw(active, self.color)
                .expect("budget was checked");
            self.run.draws += 1;
            if self.labels[w] == Label::Unvisited {
                self.enter_stack(w, Some(active));
                self.run.hits += 1;
                self.run.tree_edges.push((active, w));
                self.tree_set.insert((active, w));
            }
            self.after_step();
        }
    }

    fn pick_restart(&mut self) -> VertexId {
        let unvisited: Vec<VertexId> = (0..self.labels.len())
            .filter(|&v| self.labels[v] == Label::Unvisited)
            .collect();
        match self.restart_rule {
            RestartRule::LowestId => unvisited[0],
            RestartRule::UniformRandom => unvisited[self.rng.random_range(0..unvisited.len())],
        }
    }

    fn enter_stack(&mut self, v: VertexId, parent: Option<VertexId>) {
        debug_assert_eq!(self.labels[v], Label::Unvisited);
        self.labels[v] = Label::Stack;
        self.stack.push(v);
        self.run.final_stack += 1;
        self.run.final_unvisited -= 1;
        self.run.discoveries.push((v, parent));
        if self.stack.len() > self.run.best_path.len() {
            self.run.best_path = self.stack.clone();
        }
    }

    fn pop_to_exhausted(&mut self) {
        let v = self.stack.pop().expect("stack nonempty");
        self.labels[v] = Label::Exhausted;
        self.run.final_stack -= 1;
        self.run.final_exhausted += 1;
    }

    fn after_step(&mut self) {
        self.step += 1;
        self.run.trace.push(TraceRow {
            step: self.step,
            exhausted: self.run.final_exhausted,
            stack: self.run.final_stack,
            unvisited: self.run.final_unvisited,
            hits: self.run.hits,
            restarts: self.run.restarts,
        });
        if self.validate {
            self.validate_state();
        }
    }

    /// Full sweep of the step invariants; panics on any violation.
    fn validate_state(&self) {
        let n = self.labels.len();
        let (mut s, mut u, mut t) = (0usize, 0usize, 0usize);
        for &l in &self.labels {
            match l {
                Label::Exhausted => s += 1,
                Label::Stack => u += 1,
                Label::Unvisited => t += 1,
            }
        }
        assert_eq!(s, self.run.final_exhausted, "S count drifted");
        assert_eq!(u, self.run.final_stack, "U count drifted");
        assert_eq!(t, self.run.final_unvisited, "T count drifted");
        assert_eq!(s + u + t, n, "classes must partition V");
        assert_eq!(
            s + u,
            self.run.hits + self.run.restarts,
            "|S ∪ U| = h + r accounting failed"
        );
        assert!(s + u >= self.run.hits, "|S ∪ U| >= h failed");
        assert_eq!(u, self.stack.len(), "stack length drifted");
        assert!(
            self.stack.iter().all(|&v| self.labels[v] == Label::Stack),
            "stack member not labeled U"
        );
        // Stack order must spell a path along logged hit edges.
        for w in self.stack.windows(2) {
            assert!(
                self.tree_set.contains(&(w[0], w[1])),
                "stack pair ({}, {}) is not a logged hit edge",
                w[0],
                w[1]
            );
        }
        assert_eq!(
            s,
            self.exhausted_by_draws + self.exhausted_isolated,
            "exhausted split drifted"
        );
        let k = self
            .oracle
            .spec()
            .entries()
            .iter()
            .find(|e| e.id == self.color)
            .expect("color exists")
            .k;
        assert!(
            k * self.exhausted_by_draws <= self.run.draws,
            "members of S must each account for k draws"
        );
    }

    fn finish(self) -> DfsRun {
        self.run
    }
}

/// Runs the randomized DFS on a fresh single-color oracle over `g`, drawing
/// with replacement, with uniform restarts.
pub fn dfs_long_path(g: &Arc<Graph>, k: usize, budget: usize, rng: &mut impl Rng) -> DfsRun {
    dfs_long_path_with(g, k, budget, RestartRule::UniformRandom, false, rng)
}

/// As [`dfs_long_path`], with explicit restart rule and optional per-step
/// invariant validation.
pub fn dfs_long_path_with(
    g: &Arc<Graph>,
    k: usize,
    budget: usize,
    restart_rule: RestartRule,
    validate: bool,
    rng: &mut impl Rng,
) -> DfsRun {
    assert!(k >= 1, "k must be at least 1");
    let seed = rng.next_u64();
    let mut o = oracle(g, &ColorSpec::single(k), Mode::WithReplacement, seed)
        .expect("with-replacement oracle has no degree requirement");
    dfs_core(&mut o, 0, budget, restart_rule, validate, rng)
}

/// One long-path trial: runs the DFS with budget `⌊eps·k·m⌋` and compares the
/// best path's edge count with the target `(1 - 2·eps)·m`, `m` the host
/// minimum degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongPathTrial {
    pub min_degree: usize,
    pub budget: usize,
    pub achieved: usize,
    pub target: f64,
    pub success: bool,
    /// Whether `k ≥ ⌈2/eps²⌉`, the regime in which hitting the target is the
    /// overwhelmingly likely outcome; below it the trial is still run and the
    /// flag just records the shortfall.
    pub k_sufficient: bool,
}

pub fn long_path_trial(
    g: &Arc<Graph>,
    k: usize,
    eps: f64,
    rng: &mut impl Rng,
) -> (LongPathTrial, DfsRun) {
    let m = g.min_degree();
    let budget = (eps * k as f64 * m as f64).floor() as usize;
    let run = dfs_long_path(g, k, budget, rng);
    let achieved = run.best_len_edges();
    let target = (1.0 - 2.0 * eps) * m as f64;
    (
        LongPathTrial {
            min_degree: m,
            budget,
            achieved,
            target,
            success: achieved as f64 >= target,
            k_sufficient: (k as f64) >= (2.0 / (eps * eps)).ceil(),
        },
        run,
    )
}
