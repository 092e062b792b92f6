//! Epoch-indexed, four-colored exploration for long cycles.
//!
//! The search grows a rooted exploration forest. It starts from a long-path
//! DFS run (the root epoch, id `"0"`), then proceeds in epochs indexed by
//! binary strings, scheduled generation by generation in increasing numeric
//! order. An epoch draws only edges of its own color, so every vertex it
//! discovers still has a full budget of that color. Discovered vertices are
//! classified once, by host degree `d = d_G(v)`:
//!
//! * class A — fewer than `(1-2ε)·d` host neighbors already in the forest;
//! * class C — at least `(1-2ε)·d` in the forest, of which at least `ε·d` sit
//!   at tree distance `≥ (1-19ε)·m`;
//! * class B — the middle case.
//!
//! Only class-A vertices join the epoch stack and keep exploring. An epoch
//! succeeds when its A-set reaches `⌈(1-2ε)·m⌉`, fails when its step budget
//! `⌊ε·k·m⌋` runs out, and interrupts the whole search when its B- or C-set
//! reaches `max(1, ⌊ε·m⌋)`; the interrupt sets feed the two cycle closures.
//!
//! Rounding conventions: interrupt thresholds, seed-set sizes (`⌊3·ε·m⌋`),
//! step budgets and V-set sizes use floors; the A-success threshold uses a
//! ceiling; distance cutoffs compare against the real `(1-19ε)·m`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dfs::{dfs_core, RestartRule};
use crate::graph::{Graph, VertexId};
use crate::sample::{oracle, ChoiceOracle, ColorSpec, Mode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpochError {
    #[error("epoch id must be a nonempty binary string, got {0:?}")]
    BadId(String),
    #[error("ancestor epoch paths unavailable for {0:?}")]
    MissingLineage(String),
}

/// The four edge colors. Parent and child epochs always use different colors,
/// as do sibling epochs, so a vertex discovered in an epoch has no prior edges
/// of that epoch's color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpochColor {
    LightRed,
    DarkRed,
    LightBlue,
    DarkBlue,
}

impl EpochColor {
    pub fn id(self) -> crate::sample::ColorId {
        match self {
            EpochColor::LightRed => 0,
            EpochColor::DarkRed => 1,
            EpochColor::LightBlue => 2,
            EpochColor::DarkBlue => 3,
        }
    }
}

/// Color rule: light red for odd-length ids ending in `0`, dark red for even
/// length ending in `0`, light blue for odd length ending in `1`, dark blue
/// for even length ending in `1`.
pub fn epoch_color(id: &str) -> Result<EpochColor, EpochError> {
    if id.is_empty() || !id.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(EpochError::BadId(id.to_string()));
    }
    let odd = id.len() % 2 == 1;
    let ends_zero = id.ends_with('0');
    Ok(match (odd, ends_zero) {
        (true, true) => EpochColor::LightRed,
        (false, true) => EpochColor::DarkRed,
        (true, false) => EpochColor::LightBlue,
        (false, false) => EpochColor::DarkBlue,
    })
}

/// Rooted forest of discovery edges with depths, discovery order, and
/// binary-lifting ancestor tables for tree-distance queries.
///
/// Distances are defined only between vertices under the same root;
/// cross-tree queries return `None`.
#[derive(Debug, Clone)]
pub struct ExplorationTree {
    parent: Vec<Option<VertexId>>,
    depth: Vec<usize>,
    root_of: Vec<VertexId>,
    /// `up[v][j]` is the ancestor `2^j` levels above `v`.
    up: Vec<Vec<VertexId>>,
    present: Vec<bool>,
    order: Vec<VertexId>,
    order_index: Vec<usize>,
}

impl ExplorationTree {
    pub fn new(n: usize) -> Self {
        ExplorationTree {
            parent: vec![None; n],
            depth: vec![0; n],
            root_of: vec![0; n],
            up: vec![Vec::new(); n],
            present: vec![false; n],
            order: Vec::new(),
            order_index: vec![usize::MAX; n],
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.present[v]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn attach_root(&mut self, v: VertexId) {
        assert!(!self.present[v], "vertex {v} already in the forest");
        self.present[v] = true;
        self.root_of[v] = v;
        self.order_index[v] = self.order.len();
        self.order.push(v);
    }

    pub fn attach(&mut self, v: VertexId, parent: VertexId) {
        assert!(!self.present[v], "vertex {v} already in the forest");
        assert!(self.present[parent], "parent {parent} not in the forest");
        self.present[v] = true;
        self.parent[v] = Some(parent);
        self.depth[v] = self.depth[parent] + 1;
        self.root_of[v] = self.root_of[parent];
        let mut ladder = vec![parent];
        let mut j = 0;
        while let Some(&a) = ladder.last() {
            match self.up[a].get(j) {
                Some(&next) => {
                    ladder.push(next);
                    j += 1;
                }
                None => break,
            }
        }
        self.up[v] = ladder;
        self.order_index[v] = self.order.len();
        self.order.push(v);
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn depth(&self, v: VertexId) -> Option<usize> {
        self.present[v].then(|| self.depth[v])
    }

    pub fn root(&self, v: VertexId) -> Option<VertexId> {
        self.present[v].then(|| self.root_of[v])
    }

    /// Members in discovery order.
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    /// Discovery rank of `v`.
    pub fn order_index(&self, v: VertexId) -> Option<usize> {
        self.present[v].then(|| self.order_index[v])
    }

    fn ancestor_at_depth(&self, mut v: VertexId, target: usize) -> VertexId {
        debug_assert!(self.depth[v] >= target);
        while self.depth[v] > target {
            let diff = self.depth[v] - target;
            let j = (usize::BITS - 1 - diff.leading_zeros()) as usize;
            v = self.up[v][j.min(self.up[v].len() - 1)];
        }
        v
    }

    pub fn lca(&self, u: VertexId, v: VertexId) -> Option<VertexId> {
        if !self.present[u] || !self.present[v] || self.root_of[u] != self.root_of[v] {
            return None;
        }
        let d = self.depth[u].min(self.depth[v]);
        let mut a = self.ancestor_at_depth(u, d);
        let mut b = self.ancestor_at_depth(v, d);
        while a != b {
            let mut j = self.up[a].len() - 1;
            while j > 0 && self.up[a][j] == self.up[b][j] {
                j -= 1;
            }
            a = self.up[a][j];
            b = self.up[b][j];
        }
        Some(a)
    }

    /// Length of the unique forest path between `u` and `v`, if co-rooted.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let l = self.lca(u, v)?;
        Some(self.depth[u] + self.depth[v] - 2 * self.depth[l])
    }

    /// Undirected discovery edges of the forest.
    pub fn edge_pairs(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.order
            .iter()
            .filter_map(|&v| self.parent[v].map(|p| (v.min(p), v.max(p))))
            .collect()
    }

    /// The unique forest path from `u` to `v` inclusive, if co-rooted.
    pub fn path_between(&self, u: VertexId, v: VertexId) -> Option<Vec<VertexId>> {
        let l = self.lca(u, v)?;
        let mut down = Vec::new();
        let mut x = u;
        while x != l {
            down.push(x);
            x = self.parent[x].expect("below the lca");
        }
        down.push(l);
        let mut tail = Vec::new();
        let mut y = v;
        while y != l {
            tail.push(y);
            y = self.parent[y].expect("below the lca");
        }
        down.extend(tail.into_iter().rev());
        Some(down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    A,
    B,
    C,
}

/// Classifies a freshly attached vertex by its host neighbors inside the
/// forest and how many of them are tree-far. `d(v)` is the host degree.
pub fn classify(g: &Graph, tree: &ExplorationTree, v: VertexId, eps: f64, m: usize) -> VertexClass {
    debug_assert!(tree.contains(v), "classify after attachment");
    let d = g.degree(v) as f64;
    let far_cut = (1.0 - 19.0 * eps) * m as f64;
    let mut in_tree = 0usize;
    let mut far = 0usize;
    for &w in g.neighbors(v) {
        if tree.contains(w) {
            in_tree += 1;
            // cross-tree neighbors are never far: their distance is undefined
            if let Some(dist) = tree.distance(v, w) {
                if dist as f64 >= far_cut {
                    far += 1;
                }
            }
        }
    }
    if (in_tree as f64) < (1.0 - 2.0 * eps) * d {
        VertexClass::A
    } else if (far as f64) >= eps * d {
        VertexClass::C
    } else {
        VertexClass::B
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpochOutcome {
    Pending,
    Success,
    Fail,
    InterruptB,
    InterruptC,
}

/// One executed epoch: its color, classified sets, retained path and leftover
/// discoveries.
#[derive(Debug, Clone)]
pub struct Epoch {
    pub id: String,
    pub color: EpochColor,
    pub seed_set: Vec<VertexId>,
    pub a: Vec<VertexId>,
    pub b: Vec<VertexId>,
    pub c: Vec<VertexId>,
    pub steps_used: usize,
    pub outcome: EpochOutcome,
    /// Longest stack chain observed (a descending tree path).
    pub path: Vec<VertexId>,
    /// Vertices first discovered during this epoch, in discovery order.
    pub discovered: Vec<VertexId>,
    /// Discoveries that did not end up on `path`.
    pub r_set: Vec<VertexId>,
}

/// Derived integer thresholds for one run; see the module notes on rounding.
#[derive(Debug, Clone, Copy)]
struct Thresholds {
    interrupt: usize,
    success_a: usize,
    seed_size: usize,
    step_budget: usize,
}

impl Thresholds {
    fn new(eps: f64, k: usize, m: usize) -> Self {
        Thresholds {
            interrupt: ((eps * m as f64).floor() as usize).max(1),
            success_a: ((1.0 - 2.0 * eps) * m as f64).ceil().max(0.0) as usize,
            seed_size: (3.0 * eps * m as f64).floor() as usize,
            step_budget: (eps * k as f64 * m as f64).floor() as usize,
        }
    }
}

/// Longest suffix of `stack` whose consecutive entries are parent-child in the
/// forest; such a suffix is a descending tree path.
fn stack_chain_len(tree: &ExplorationTree, stack: &[VertexId]) -> usize {
    let mut len = 0;
    for i in (0..stack.len()).rev() {
        len += 1;
        if i == 0 || tree.parent(stack[i]) != Some(stack[i - 1]) {
            break;
        }
    }
    len.min(stack.len())
}

/// Runs one non-root epoch: classifies the seeds, then explores with the
/// epoch's color until success, failure, or an interrupt.
pub fn run_epoch(
    tree: &mut ExplorationTree,
    o: &mut ChoiceOracle,
    id: &str,
    seed_set: &[VertexId],
    eps: f64,
    k: usize,
    m: usize,
) -> Epoch {
    let color = epoch_color(id).expect("caller passes a valid epoch id");
    let g = Arc::clone(o.host());
    let th = Thresholds::new(eps, k, m);
    let mut ep = Epoch {
        id: id.to_string(),
        color,
        seed_set: seed_set.to_vec(),
        a: Vec::new(),
        b: Vec::new(),
        c: Vec::new(),
        steps_used: 0,
        outcome: EpochOutcome::Pending,
        path: Vec::new(),
        discovered: Vec::new(),
        r_set: Vec::new(),
    };

    let mut stack: Vec<VertexId> = Vec::new();
    let mut chain = 0usize;
    let snapshot_best = |stack: &[VertexId], chain: usize, ep: &mut Epoch| {
        if chain > ep.path.len() {
            ep.path = stack[stack.len() - chain..].to_vec();
        }
    };

    // Seeding: classify every handed-over vertex; A-seeds form the stack with
    // the latest discovery on top. Interrupts may fire before any step.
    for &v in seed_set {
        assert!(tree.contains(v), "seed {v} must already be discovered");
        match classify(&g, tree, v, eps, m) {
            VertexClass::A => {
                ep.a.push(v);
                stack.push(v);
                chain = stack_chain_len(tree, &stack);
                snapshot_best(&stack, chain, &mut ep);
                if ep.a.len() >= th.success_a {
                    ep.outcome = EpochOutcome::Success;
                }
            }
            VertexClass::B => {
                ep.b.push(v);
                if ep.b.len() >= th.interrupt {
                    ep.outcome = EpochOutcome::InterruptB;
                }
            }
            VertexClass::C => {
                ep.c.push(v);
                if ep.c.len() >= th.interrupt {
                    ep.outcome = EpochOutcome::InterruptC;
                }
            }
        }
        if ep.outcome != EpochOutcome::Pending {
            break;
        }
    }

    while ep.outcome == EpochOutcome::Pending && ep.steps_used < th.step_budget {
        let Some(&active) = stack.last() else {
            ep.outcome = EpochOutcome::Fail;
            break;
        };
        ep.steps_used += 1;
        if g.degree(active) == 0 || o.remaining(active, color.id()) == 0 {
            stack.pop();
            chain = chain.saturating_sub(1);
            if chain == 0 {
                chain = stack_chain_len(tree, &stack);
            }
            continue;
        }
        let w = o.draw(active, color.id()).expect("budget checked");
        if tree.contains(w) {
            continue;
        }
        // fresh discoveries have never been active, so their budget in the
        // epoch's color is untouched
        debug_assert_eq!(o.used(w, color.id()), 0);
        tree.attach(w, active);
        ep.discovered.push(w);
        match classify(&g, tree, w, eps, m) {
            VertexClass::A => {
                ep.a.push(w);
                stack.push(w);
                chain += 1;
                snapshot_best(&stack, chain, &mut ep);
                if ep.a.len() >= th.success_a {
                    ep.outcome = EpochOutcome::Success;
                }
            }
            VertexClass::B => {
                ep.b.push(w);
                if ep.b.len() >= th.interrupt {
                    ep.outcome = EpochOutcome::InterruptB;
                }
            }
            VertexClass::C => {
                ep.c.push(w);
                if ep.c.len() >= th.interrupt {
                    ep.outcome = EpochOutcome::InterruptC;
                }
            }
        }
    }
    if ep.outcome == EpochOutcome::Pending {
        ep.outcome = EpochOutcome::Fail;
    }

    let on_path: BTreeSet<VertexId> = ep.path.iter().copied().collect();
    ep.r_set = ep
        .discovered
        .iter()
        .copied()
        .filter(|v| !on_path.contains(v))
        .collect();
    if ep.outcome == EpochOutcome::Success {
        // Pops, B- and C-discoveries are each below εm, so the leftovers stay
        // under 3εm on every successful close.
        assert!(
            (ep.r_set.len() as f64) < 3.0 * eps * m as f64,
            "epoch {id}: {} leftovers breach the 3εm bound",
            ep.r_set.len()
        );
    }
    ep
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FromC,
    FromB,
    None,
}

/// A cycle produced by one of the closures, with its independent validation
/// target. `length` counts edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub cycle: Option<Vec<VertexId>>,
    pub length: usize,
    pub provenance: Provenance,
    pub target: f64,
}

impl CycleResult {
    fn none(target: f64) -> Self {
        CycleResult {
            cycle: None,
            length: 0,
            provenance: Provenance::None,
            target,
        }
    }
}

/// Simple cycle over revealed edges: at least 3 distinct vertices, every
/// consecutive pair (cyclically) a host edge that the oracle has revealed.
pub fn cycle_is_revealed(
    g: &Graph,
    revealed: &BTreeSet<(VertexId, VertexId)>,
    cycle: &[VertexId],
) -> bool {
    if cycle.len() < 3 {
        return false;
    }
    let distinct: BTreeSet<_> = cycle.iter().copied().collect();
    if distinct.len() != cycle.len() {
        return false;
    }
    (0..cycle.len()).all(|i| {
        let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        u < g.n() && v < g.n() && g.has_edge(u, v) && revealed.contains(&(u.min(v), u.max(v)))
    })
}

/// Closure from tree-far vertices: each vertex of `c_set` spends its epoch
/// color budget; a draw landing at tree distance `≥ (1-19ε)·m` closes the
/// forest path with the drawn chord. The cycle is validated before return.
pub fn close_from_c(
    tree: &ExplorationTree,
    o: &mut ChoiceOracle,
    c_set: &[VertexId],
    color: EpochColor,
    eps: f64,
    m: usize,
) -> CycleResult {
    let g = Arc::clone(o.host());
    let target = (1.0 - 19.0 * eps) * m as f64;
    for &v in c_set {
        if g.degree(v) == 0 {
            continue;
        }
        while o.remaining(v, color.id()) > 0 {
            let w = o.draw(v, color.id()).expect("budget checked");
            let Some(d) = tree.distance(v, w) else {
                continue;
            };
            if (d as f64) < target || d < 2 {
                continue;
            }
            let cycle = tree.path_between(v, w).expect("co-rooted");
            let mut revealed = o.revealed_pairs();
            revealed.extend(tree.edge_pairs());
            assert!(
                cycle_is_revealed(&g, &revealed, &cycle),
                "closure built an invalid cycle"
            );
            return CycleResult {
                length: cycle.len(),
                cycle: Some(cycle),
                provenance: Provenance::FromC,
                target,
            };
        }
    }
    CycleResult::none(target)
}

/// Ancestor paths needed by the boundary closure for epoch `ι = ι′1`: the
/// parent's retained path, the 0-sibling's retained path, and the seed set.
#[derive(Debug, Clone, Copy)]
pub struct BLineage<'a> {
    pub parent_path: &'a [VertexId],
    pub sibling_path: &'a [VertexId],
    pub seed_set: &'a [VertexId],
}

#[derive(Debug, Clone)]
struct GoodVertex {
    v: VertexId,
    pick_parent_early: VertexId,
    pick_parent_late: VertexId,
    pick_sibling: VertexId,
}

/// Closure from boundary vertices.
///
/// A cluster `W` of pairwise tree-close B-vertices is selected by bucketing on
/// the ancestor at the base of each vertex's depth segment (segment height
/// `⌈ε·m/2⌉`, so any two vertices in a bucket are within `ε·m`). Each `w ∈ W`
/// then draws its epoch color budget; `w` is *good* if its draws include one
/// vertex among the first `⌊εm⌋` discovered of its parent-path neighbors, one
/// among the last `⌊εm⌋`, and one among the last `⌊εm⌋` of its sibling-path
/// neighbors, jointly spanning enough tree distance. Two good vertices are
/// stitched into a cycle from three chords and two forest paths; every
/// candidate is validated and the first valid cycle is returned.
pub fn close_from_b(
    tree: &ExplorationTree,
    o: &mut ChoiceOracle,
    b_set: &[VertexId],
    color: EpochColor,
    lineage: BLineage<'_>,
    eps: f64,
    m: usize,
) -> CycleResult {
    let g = Arc::clone(o.host());
    let target = (1.0 - 19.0 * eps) * m as f64;
    let good_cut = (1.0 - 17.0 * eps) * m as f64;
    let vset = (eps * m as f64).floor() as usize;
    if vset == 0 {
        return CycleResult::none(target);
    }

    // Pigeonhole cluster selection.
    let segment = ((eps * m as f64) / 2.0).ceil().max(1.0) as usize;
    let mut buckets: HashMap<(VertexId, usize), Vec<VertexId>> = HashMap::new();
    for &v in b_set {
        let Some(d) = tree.depth(v) else { continue };
        let q = d / segment;
        let anchor = tree_ancestor(tree, v, q * segment);
        buckets.entry((anchor, q)).or_default().push(v);
    }
    let Some(mut cluster) = buckets
        .into_values()
        .max_by_key(|c| (c.len(), usize::MAX - c[0]))
    else {
        return CycleResult::none(target);
    };
    let w_size = ((eps * eps * m as f64).ceil() as usize).max(2);
    cluster.truncate(w_size);

    let in_seed: BTreeSet<VertexId> = lineage.seed_set.iter().copied().collect();
    let rank = |v: VertexId| tree.order_index(v).unwrap_or(usize::MAX);
    let membership = |path: &[VertexId]| -> BTreeSet<VertexId> { path.iter().copied().collect() };
    let parent_members = membership(lineage.parent_path);
    let sibling_members = membership(lineage.sibling_path);

    let mut goods: Vec<GoodVertex> = Vec::new();
    for &v in &cluster {
        if g.degree(v) == 0 {
            continue;
        }
        // nearest seed, lowest id on ties
        let rho = lineage
            .seed_set
            .iter()
            .copied()
            .filter_map(|s| tree.distance(v, s).map(|d| (d, s)))
            .min();
        let Some((rho_dist, _rho_v)) = rho else {
            continue;
        };

        let mut pool_parent: Vec<VertexId> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|w| parent_members.contains(w) && !in_seed.contains(w))
            .collect();
        pool_parent.sort_by_key(|&w| rank(w));
        let mut pool_sibling: Vec<VertexId> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|w| sibling_members.contains(w) && !in_seed.contains(w))
            .collect();
        pool_sibling.sort_by_key(|&w| rank(w));
        // the construction needs both pools at twice the V-set size
        if pool_parent.len() < 2 * vset || pool_sibling.len() < 2 * vset {
            continue;
        }
        let v1_set: BTreeSet<VertexId> = pool_parent[..vset].iter().copied().collect();
        let v2_set: BTreeSet<VertexId> = pool_parent[pool_parent.len() - vset..]
            .iter()
            .copied()
            .collect();
        let v3_set: BTreeSet<VertexId> = pool_sibling[pool_sibling.len() - vset..]
            .iter()
            .copied()
            .collect();

        let mut drawn: BTreeSet<VertexId> = BTreeSet::new();
        while o.remaining(v, color.id()) > 0 {
            drawn.insert(o.draw(v, color.id()).expect("budget checked"));
        }
        let d1: Vec<VertexId> = drawn.intersection(&v1_set).copied().collect();
        let d2: Vec<VertexId> = drawn.intersection(&v2_set).copied().collect();
        let d3: Vec<VertexId> = drawn.intersection(&v3_set).copied().collect();
        if d1.is_empty() || d2.is_empty() || d3.is_empty() {
            continue;
        }
        // maximize the distance certificate over the drawn triple
        let mut best: Option<(usize, VertexId, VertexId, VertexId)> = None;
        for &x in &d1 {
            for &y in &d2 {
                let Some(dx) = tree.distance(x, y) else {
                    continue;
                };
                for &z in &d3 {
                    let Some(dz) = lineage
                        .seed_set
                        .iter()
                        .filter_map(|&s| tree.distance(z, s))
                        .min()
                    else {
                        continue;
                    };
                    let total = dx + dz + rho_dist;
                    if best.is_none_or(|(t, ..)| total > t) {
                        best = Some((total, x, y, z));
                    }
                }
            }
        }
        if let Some((total, x, y, z)) = best {
            if total as f64 >= good_cut {
                goods.push(GoodVertex {
                    v,
                    pick_parent_early: x,
                    pick_parent_late: y,
                    pick_sibling: z,
                });
            }
        }
    }

    if goods.len() < 2 {
        return CycleResult::none(target);
    }

    let mut revealed = o.revealed_pairs();
    revealed.extend(tree.edge_pairs());
    for (i, u) in goods.iter().enumerate() {
        for (j, v) in goods.iter().enumerate() {
            if i == j {
                continue;
            }
            // (u, u1, …, v2, v, v3, …, u): chords u–u1, v2–v, v–v3, then the
            // forest path from v3 back to u.
            let Some(mid) = tree.path_between(u.pick_parent_early, v.pick_parent_late) else {
                continue;
            };
            let Some(back) = tree.path_between(v.pick_sibling, u.v) else {
                continue;
            };
            let mut cycle = Vec::with_capacity(1 + mid.len() + 1 + back.len());
            cycle.push(u.v);
            cycle.extend_from_slice(&mid);
            cycle.push(v.v);
            cycle.extend_from_slice(&back[..back.len() - 1]);
            if cycle_is_revealed(&g, &revealed, &cycle) {
                return CycleResult {
                    length: cycle.len(),
                    cycle: Some(cycle),
                    provenance: Provenance::FromB,
                    target,
                };
            }
        }
    }
    CycleResult::none(target)
}

fn tree_ancestor(tree: &ExplorationTree, v: VertexId, depth: usize) -> VertexId {
    let mut x = v;
    while tree.depth(x).expect("present") > depth {
        x = tree.parent(x).expect("above depth 0");
    }
    x
}

/// Compact per-epoch record for the JSONL trace.
#[derive(Debug, Clone, Serialize)]
pub struct EpochSummary {
    pub id: String,
    pub color: EpochColor,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub steps: usize,
    pub outcome: EpochOutcome,
}

/// A full long-cycle run: the cycle found (if any), every epoch record, the
/// interrupt that triggered the closure, and the undirected support of every
/// revealed choice (for external re-validation).
#[derive(Debug, Clone)]
pub struct LongCycleRun {
    pub result: CycleResult,
    pub epochs: Vec<Epoch>,
    pub interrupted: Option<(String, EpochOutcome)>,
    pub min_degree: usize,
    pub revealed: BTreeSet<(VertexId, VertexId)>,
}

impl LongCycleRun {
    pub fn summaries(&self) -> Vec<EpochSummary> {
        self.epochs
            .iter()
            .map(|e| EpochSummary {
                id: e.id.clone(),
                color: e.color,
                a: e.a.len(),
                b: e.b.len(),
                c: e.c.len(),
                steps: e.steps_used,
                outcome: e.outcome,
            })
            .collect()
    }

    /// One JSON object per epoch, in schedule order.
    pub fn epochs_jsonl(&self) -> String {
        let mut out = String::new();
        for s in self.summaries() {
            out.push_str(&serde_json::to_string(&s).expect("summary serializes"));
            out.push('\n');
        }
        out
    }
}

/// Drives the whole long-cycle search on `g` with a fresh four-color oracle:
/// the root epoch is a light-red DFS; successful epochs seed their two
/// children with their last `⌊3εm⌋` discoveries; the first interrupt runs the
/// matching closure and stops. If no interrupt ever fires, the C-closure is
/// attempted over the union of all C-sets before giving up.
pub fn long_cycle(g: &Arc<Graph>, k: usize, eps: f64, rng: &mut impl Rng) -> LongCycleRun {
    let m = g.min_degree();
    let th = Thresholds::new(eps, k, m);
    let target = (1.0 - 19.0 * eps) * m as f64;
    let seed = rng.next_u64();
    let mut o = oracle(g, &ColorSpec::uniform(4, k), Mode::WithReplacement, seed)
        .expect("with-replacement oracle has no degree requirement");
    let mut tree = ExplorationTree::new(g.n());

    // Root epoch: the long-path DFS, drawing light red.
    let root_color = epoch_color("0").expect("root id");
    let root_run = dfs_core(
        &mut o,
        root_color.id(),
        th.step_budget,
        RestartRule::UniformRandom,
        false,
        rng,
    );
    for &(v, parent) in &root_run.discoveries {
        match parent {
            Some(p) => tree.attach(v, p),
            None => tree.attach_root(v),
        }
    }
    let root_discovered: Vec<VertexId> = root_run.discoveries.iter().map(|&(v, _)| v).collect();
    let root_path = root_run.best_path.clone();
    let root_success = root_path.len() >= th.success_a;
    let on_root_path: BTreeSet<VertexId> = root_path.iter().copied().collect();
    let root_epoch = Epoch {
        id: "0".to_string(),
        color: root_color,
        seed_set: Vec::new(),
        a: root_discovered.clone(),
        b: Vec::new(),
        c: Vec::new(),
        steps_used: root_run.draws,
        outcome: if root_success {
            EpochOutcome::Success
        } else {
            EpochOutcome::Fail
        },
        path: root_path,
        r_set: root_discovered
            .iter()
            .copied()
            .filter(|v| !on_root_path.contains(v))
            .collect(),
        discovered: root_discovered,
    };

    let mut run = LongCycleRun {
        result: CycleResult::none(target),
        epochs: vec![root_epoch],
        interrupted: None,
        min_degree: m,
        revealed: BTreeSet::new(),
    };
    let mut index: HashMap<String, usize> = HashMap::from([("0".to_string(), 0)]);

    // Children run in increasing numeric order of their binary ids; FIFO over
    // generations realizes that order.
    let mut queue: VecDeque<(String, Vec<VertexId>)> = VecDeque::new();
    let enqueue_children =
        |queue: &mut VecDeque<(String, Vec<VertexId>)>, id: &str, discovered: &[VertexId]| {
            if th.seed_size >= 1 && discovered.len() >= th.seed_size {
                let seeds = discovered[discovered.len() - th.seed_size..].to_vec();
                queue.push_back((format!("{id}0"), seeds.clone()));
                queue.push_back((format!("{id}1"), seeds));
            }
        };
    if run.epochs[0].outcome == EpochOutcome::Success {
        enqueue_children(&mut queue, "0", &run.epochs[0].discovered);
    }

    while let Some((id, seeds)) = queue.pop_front() {
        let ep = run_epoch(&mut tree, &mut o, &id, &seeds, eps, k, m);
        let outcome = ep.outcome;
        let discovered = ep.discovered.clone();
        let b_set = ep.b.clone();
        let c_set = ep.c.clone();
        let color = ep.color;
        index.insert(id.clone(), run.epochs.len());
        run.epochs.push(ep);
        match outcome {
            EpochOutcome::Success => {
                enqueue_children(&mut queue, &id, &discovered);
            }
            EpochOutcome::Fail | EpochOutcome::Pending => {}
            EpochOutcome::InterruptC => {
                run.interrupted = Some((id.clone(), outcome));
                run.result = close_from_c(&tree, &mut o, &c_set, color, eps, m);
                break;
            }
            EpochOutcome::InterruptB => {
                run.interrupted = Some((id.clone(), outcome));
                // The construction needs the parent path and the 0-sibling
                // path, which only exist when the id ends in 1.
                if let Some(parent_id) = id.strip_suffix('1') {
                    let sibling_id = format!("{parent_id}0");
                    if let (Some(&pi), Some(&si)) = (index.get(parent_id), index.get(&sibling_id)) {
                        let parent_path = run.epochs[pi].path.clone();
                        let sibling_path = run.epochs[si].path.clone();
                        run.result = close_from_b(
                            &tree,
                            &mut o,
                            &b_set,
                            color,
                            BLineage {
                                parent_path: &parent_path,
                                sibling_path: &sibling_path,
                                seed_set: &seeds,
                            },
                            eps,
                            m,
                        );
                    }
                }
                break;
            }
        }
    }

    // No interrupt fired anywhere: try the C-closure on every epoch's C-set,
    // each in its own color, before conceding.
    if run.interrupted.is_none() && run.result.cycle.is_none() {
        for e in run.epochs.clone() {
            if e.c.is_empty() {
                continue;
            }
            let res = close_from_c(&tree, &mut o, &e.c, e.color, eps, m);
            if res.cycle.is_some() {
                run.result = res;
                break;
            }
        }
    }
    run.revealed = o.revealed_pairs();
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn color_rule_matches_the_four_cases() {
        assert_eq!(epoch_color("010").unwrap(), EpochColor::LightRed);
        assert_eq!(epoch_color("01").unwrap(), EpochColor::DarkBlue);
        assert_eq!(epoch_color("00").unwrap(), EpochColor::DarkRed);
        assert_eq!(epoch_color("0").unwrap(), EpochColor::LightRed);
        assert_eq!(epoch_color("011").unwrap(), EpochColor::LightBlue);
        assert!(epoch_color("").is_err());
        assert!(epoch_color("012").is_err());
    }

    #[test]
    fn sibling_and_parent_colors_differ() {
        for id in ["0", "00", "01", "000", "0101", "0110"] {
            let c = epoch_color(id).unwrap();
            for child in [format!("{id}0"), format!("{id}1")] {
                assert_ne!(epoch_color(&child).unwrap(), c, "{id} -> {child}");
            }
            assert_ne!(
                epoch_color(&format!("{id}0")).unwrap(),
                epoch_color(&format!("{id}1")).unwrap()
            );
        }
    }

    /// Builds a forest over `n` vertices from (child, parent) pairs applied in
    /// order; pairs with parent == child declare roots.
    fn build_tree(n: usize, edges: &[(usize, usize)]) -> ExplorationTree {
        let mut t = ExplorationTree::new(n);
        for &(v, p) in edges {
            if v == p {
                t.attach_root(v);
            } else {
                t.attach(v, p);
            }
        }
        t
    }

    #[test]
    fn tree_distances_and_paths() {
        //        0
        //      /   \
        //     1     2
        //    / \     \
        //   3   4     5
        let t = build_tree(7, &[(0, 0), (1, 0), (2, 0), (3, 1), (4, 1), (5, 2), (6, 6)]);
        assert_eq!(t.distance(3, 4), Some(2));
        assert_eq!(t.distance(3, 5), Some(4));
        assert_eq!(t.distance(0, 5), Some(2));
        assert_eq!(t.distance(3, 3), Some(0));
        assert_eq!(t.distance(3, 6), None); // different roots
        assert_eq!(t.path_between(3, 5), Some(vec![3, 1, 0, 2, 5]));
        assert_eq!(t.lca(3, 4), Some(1));
        // symmetry and triangle equality through a path vertex
        assert_eq!(t.distance(5, 3), t.distance(3, 5));
        let via = t.distance(3, 0).unwrap() + t.distance(0, 5).unwrap();
        assert_eq!(t.distance(3, 5).unwrap(), via);
    }

    #[test]
    fn tree_deep_chain_distances() {
        let n = 300;
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..n).map(|v| (v, v - 1)));
        let t = build_tree(n, &pairs);
        assert_eq!(t.distance(0, n - 1), Some(n - 1));
        assert_eq!(t.distance(13, 250), Some(237));
        assert_eq!(t.lca(13, 250), Some(13));
        let path = t.path_between(5, 9).unwrap();
        assert_eq!(path, vec![5, 6, 7, 8, 9]);
    }

    #[test]
    fn classify_follows_the_three_way_rule() {
        // far cutoff (1-19ε)m = 6.2
        let eps = 0.02;
        let m = 10;

        // Tiny tree: vertex 1 attached under 0; most of its neighbors are
        // outside, so it is class A.
        let g = complete_graph(8);
        let t = build_tree(8, &[(0, 0), (1, 0)]);
        assert_eq!(classify(&g, &t, 1, eps, m), VertexClass::A);

        // Short fully revealed path: the end vertex has its whole (single
        // vertex) neighborhood in the tree, at distance 1 < 6.2: class B.
        let pg = path_graph(6);
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..6).map(|v| (v, v - 1)));
        let t = build_tree(6, &pairs);
        assert_eq!(classify(&pg, &t, 5, eps, m), VertexClass::B);

        // Cycle host revealed as one long chain: the chain end sees both its
        // neighbors in the tree, and the chord end is 39 > 6.2 away: class C.
        let n = 40;
        let host = Graph::from_edges(n, (1..n).map(|v| (v - 1, v)).chain([(0, n - 1)])).unwrap();
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..n).map(|v| (v, v - 1)));
        let t = build_tree(n, &pairs);
        assert_eq!(classify(&host, &t, n - 1, eps, m), VertexClass::C);
    }

    #[test]
    fn epoch_interrupts_during_seeding() {
        // Fully revealed path host: every seed classifies as B (all neighbors
        // in tree, none beyond the far cutoff (1-19ε)m = 62), so the
        // B-interrupt fires before any step.
        let n = 30;
        let host = Arc::new(path_graph(n));
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..n).map(|v| (v, v - 1)));
        let mut tree = build_tree(n, &pairs);
        let mut o = oracle(&host, &ColorSpec::uniform(4, 2), Mode::WithReplacement, 1).unwrap();
        let eps = 0.02;
        let m = 100; // interrupt threshold floor(2) = 2
        let ep = run_epoch(&mut tree, &mut o, "01", &[5, 6, 7], eps, 2, m);
        assert_eq!(ep.outcome, EpochOutcome::InterruptB);
        assert_eq!(ep.steps_used, 0);
        assert_eq!(ep.b, vec![5, 6]);
    }

    #[test]
    fn epoch_interrupts_on_far_seeds_before_any_step() {
        // Cycle host revealed as one chain: the chain end's chord spans the
        // whole tree, classifying it C; with ⌊εm⌋ = 1 the first C seed
        // interrupts immediately.
        let n = 40;
        let host =
            Arc::new(Graph::from_edges(n, (1..n).map(|v| (v - 1, v)).chain([(0, n - 1)])).unwrap());
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..n).map(|v| (v, v - 1)));
        let mut tree = build_tree(n, &pairs);
        let mut o = oracle(&host, &ColorSpec::uniform(4, 2), Mode::WithReplacement, 2).unwrap();
        let ep = run_epoch(&mut tree, &mut o, "00", &[n - 1], 0.02, 2, 60);
        assert_eq!(ep.outcome, EpochOutcome::InterruptC);
        assert_eq!(ep.steps_used, 0);
        assert_eq!(ep.c, vec![n - 1]);
    }

    #[test]
    fn epoch_with_no_class_a_seeds_fails_immediately() {
        let n = 30;
        let host = Arc::new(path_graph(n));
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..n).map(|v| (v, v - 1)));
        let mut tree = build_tree(n, &pairs);
        let mut o = oracle(&host, &ColorSpec::uniform(4, 2), Mode::WithReplacement, 1).unwrap();
        // a single B seed never reaches the interrupt threshold of 2
        let ep = run_epoch(&mut tree, &mut o, "01", &[5], 0.02, 2, 100);
        assert_eq!(ep.outcome, EpochOutcome::Fail);
        assert_eq!(ep.steps_used, 0);
        assert!(ep.a.is_empty());
        assert_eq!(ep.b, vec![5]);
    }

    #[test]
    fn epoch_success_grows_a_chain() {
        // Big complete host, tiny tree: everything discovered is class A.
        let host = Arc::new(complete_graph(120));
        let mut tree = ExplorationTree::new(120);
        tree.attach_root(0);
        tree.attach(1, 0);
        let mut o = oracle(&host, &ColorSpec::uniform(4, 16), Mode::WithReplacement, 3).unwrap();
        let (eps, k, m) = (0.1, 16, 30);
        let ep = run_epoch(&mut tree, &mut o, "00", &[0, 1], eps, k, m);
        assert_eq!(ep.outcome, EpochOutcome::Success);
        // ceil((1-0.2)·30) = 24 class-A vertices
        assert_eq!(ep.a.len(), 24);
        assert!(!ep.path.is_empty());
        // the retained path is a descending tree chain
        for w in ep.path.windows(2) {
            assert_eq!(tree.parent(w[1]), Some(w[0]));
        }
        assert!((ep.r_set.len() as f64) < 3.0 * eps * m as f64);
    }

    #[test]
    fn epoch_replays_deterministically() {
        let host = Arc::new(complete_graph(80));
        let run_once = || {
            let mut tree = ExplorationTree::new(80);
            tree.attach_root(0);
            tree.attach(1, 0);
            tree.attach(2, 1);
            let mut o =
                oracle(&host, &ColorSpec::uniform(4, 4), Mode::WithReplacement, 42).unwrap();
            run_epoch(&mut tree, &mut o, "00", &[0, 1, 2], 0.15, 4, 40)
        };
        let a = run_once();
        let b = run_once();
        assert_eq!(a.a, b.a);
        assert_eq!(a.b, b.b);
        assert_eq!(a.c, b.c);
        assert_eq!(a.steps_used, b.steps_used);
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.path, b.path);
    }

    #[test]
    fn c_closure_on_a_forced_fixture() {
        // Host: a long path 0..=L plus vertex v = L+1 with edges to L (its
        // discovery parent) and 0 (the far chord). Without replacement, two
        // draws are forced to include the chord to 0.
        let l = 25;
        let v = l + 1;
        let host = Arc::new(
            Graph::from_edges(l + 2, (1..=l).map(|x| (x - 1, x)).chain([(l, v), (0, v)])).unwrap(),
        );
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..=l).map(|x| (x, x - 1)));
        pairs.push((v, l));
        let tree = build_tree(l + 2, &pairs);
        let mut o = oracle(
            &host,
            &ColorSpec::uniform(4, 2),
            Mode::WithoutReplacement,
            7,
        )
        .unwrap();
        let eps = 0.02;
        let m = 20; // target (1-0.38)·20 = 12.4 ≤ d_T(v, 0) = 26
        let res = close_from_c(&tree, &mut o, &[v], EpochColor::DarkRed, eps, m);
        let cycle = res.cycle.expect("forced far chord");
        assert_eq!(res.provenance, Provenance::FromC);
        assert_eq!(res.length, l + 2); // d_T(v, 0) + 1 edges
        assert_eq!(cycle.len(), l + 2);
        let mut revealed = o.revealed_pairs();
        revealed.extend(tree.edge_pairs());
        assert!(cycle_is_revealed(&host, &revealed, &cycle));
    }

    #[test]
    fn c_closure_empty_set_is_none() {
        let host = Arc::new(complete_graph(6));
        let tree = ExplorationTree::new(6);
        let mut o = oracle(&host, &ColorSpec::uniform(4, 2), Mode::WithReplacement, 1).unwrap();
        let res = close_from_c(&tree, &mut o, &[], EpochColor::LightRed, 0.1, 5);
        assert_eq!(res.cycle, None);
        assert_eq!(res.provenance, Provenance::None);
    }

    #[test]
    fn b_closure_with_one_good_vertex_is_none() {
        let host = Arc::new(complete_graph(8));
        let mut tree = ExplorationTree::new(8);
        tree.attach_root(0);
        let mut o = oracle(&host, &ColorSpec::uniform(4, 2), Mode::WithReplacement, 1).unwrap();
        let res = close_from_b(
            &tree,
            &mut o,
            &[0],
            EpochColor::DarkBlue,
            BLineage {
                parent_path: &[],
                sibling_path: &[],
                seed_set: &[0],
            },
            0.25,
            8,
        );
        assert_eq!(res.cycle, None);
    }

    #[test]
    fn b_closure_stitches_a_valid_cycle() {
        // Hand-built lineage. Parent path 0..=29, seeds {27, 28, 29}, sibling
        // path 30..=44 hanging off seed 29, and two boundary vertices 45, 46
        // hanging off seed 28, adjacent to broad stretches of both paths.
        let parent_path: Vec<usize> = (0..30).collect();
        let sibling_path: Vec<usize> = (30..45).collect();
        let (b1, b2) = (45usize, 46usize);
        let mut edges: Vec<(usize, usize)> = (1..30).map(|v| (v - 1, v)).collect();
        edges.push((29, 30));
        edges.extend((31..45).map(|v| (v - 1, v)));
        edges.push((28, b1));
        edges.push((28, b2));
        // boundary vertices see the early and late parent path and the late
        // sibling path
        for t in [b1, b2] {
            for p in 0..26 {
                if p != 28 {
                    edges.push((p, t));
                }
            }
            for s in 33..45 {
                edges.push((s, t));
            }
        }
        let host = Arc::new(Graph::from_edges(47, edges).unwrap());
        let mut pairs = vec![(0usize, 0usize)];
        pairs.extend((1..30).map(|v| (v, v - 1)));
        pairs.push((30, 29));
        pairs.extend((31..45).map(|v| (v, v - 1)));
        pairs.push((b1, 28));
        pairs.push((b2, 28));
        let tree = build_tree(47, &pairs);

        // eps·m = 4 → V-sets of size 4; W needs ceil(ε²m)=1 but keeps 2.
        let (eps, m) = (0.2, 20);
        let k = 40; // plenty of with-replacement draws to hit all V-sets
        let mut o = oracle(&host, &ColorSpec::uniform(4, k), Mode::WithReplacement, 11).unwrap();
        let res = close_from_b(
            &tree,
            &mut o,
            &[b1, b2],
            EpochColor::DarkBlue,
            BLineage {
                parent_path: &parent_path,
                sibling_path: &sibling_path,
                seed_set: &[27, 28, 29],
            },
            eps,
            m,
        );
        let cycle = res.cycle.expect("two good vertices stitch a cycle");
        assert_eq!(res.provenance, Provenance::FromB);
        let mut revealed = o.revealed_pairs();
        revealed.extend(tree.edge_pairs());
        assert!(cycle_is_revealed(&host, &revealed, &cycle));
        assert_eq!(res.length, cycle.len());
        assert!(res.length as f64 >= res.target);
    }

    #[test]
    fn long_cycle_replays_and_validates() {
        let mut r = rng(5);
        let g = Arc::new(crate::graph::random_min_degree_host(300, 40, &mut r).unwrap());
        let a = long_cycle(&g, 16, 0.05, &mut rng(9));
        let b = long_cycle(&g, 16, 0.05, &mut rng(9));
        assert_eq!(a.result, b.result);
        assert_eq!(a.interrupted, b.interrupted);
        assert_eq!(a.summaries().len(), b.summaries().len());
        for (x, y) in a.epochs.iter().zip(&b.epochs) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.outcome, y.outcome);
            assert_eq!(x.a, y.a);
        }
        // the JSONL trace has one record per epoch
        assert_eq!(a.epochs_jsonl().lines().count(), a.epochs.len());
        for e in &a.epochs {
            assert_eq!(e.color, epoch_color(&e.id).unwrap());
            // classified sets stay disjoint within an epoch
            let mut all: Vec<usize> = e.a.iter().chain(&e.b).chain(&e.c).copied().collect();
            let len = all.len();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), len, "epoch {} classified a vertex twice", e.id);
        }
    }

    #[test]
    fn long_cycle_trivial_target_on_tiny_epsilon_host() {
        // eps ≥ 1/19 makes the target non-positive; any found cycle counts.
        let g = Arc::new(complete_graph(40));
        let run = long_cycle(&g, 6, 0.1, &mut rng(3));
        assert!(run.result.target < 40.0);
        if let Some(c) = &run.result.cycle {
            assert!(run.result.length == c.len());
        }
    }
}
