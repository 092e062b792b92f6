//! Sampling of random k-out subgraphs: batch (possibly multi-colored) samples,
//! a lazily revealed per-vertex choice oracle, and the induced undirected graphs.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};

pub type ColorId = u32;

/// Color id conventionally used for the k-1 "green" choices after a split.
pub const GREEN: ColorId = 0;
/// Color id conventionally used for the single "blue" choice after a split.
pub const BLUE: ColorId = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("vertex {v} has degree {degree}, need at least {needed} distinct choices")]
    DegreeTooSmall {
        v: VertexId,
        degree: usize,
        needed: usize,
    },
    #[error("color multiplicity must be at least 1")]
    BadMultiplicity,
    #[error("duplicate color id {0}")]
    DuplicateColor(ColorId),
    #[error("unknown color id {0}")]
    BadColor(ColorId),
    #[error("vertex {v} has exhausted its budget for color {color}")]
    BudgetExhausted { v: VertexId, color: ColorId },
    #[error("sample does not match host: {0}")]
    HostMismatch(String),
    #[error("malformed sample JSON: {0}")]
    Json(String),
}

/// Whether a vertex's choices within one color class may repeat.
///
/// Distinctness is enforced per color class only; the same neighbor may be
/// chosen under several colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    WithReplacement,
    WithoutReplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorEntry {
    pub id: ColorId,
    pub k: usize,
}

/// Per-vertex choice plan: each entry is a color and how many choices of that
/// color every vertex makes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorSpec {
    entries: Vec<ColorEntry>,
}

impl ColorSpec {
    pub fn new(entries: Vec<ColorEntry>) -> Result<Self, SampleError> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if e.k == 0 {
                return Err(SampleError::BadMultiplicity);
            }
            if !seen.insert(e.id) {
                return Err(SampleError::DuplicateColor(e.id));
            }
        }
        Ok(ColorSpec { entries })
    }

    /// One anonymous color of multiplicity `k`.
    pub fn single(k: usize) -> Self {
        ColorSpec::new(vec![ColorEntry { id: 0, k }]).expect("k >= 1")
    }

    /// `count` colors `0..count`, each of multiplicity `k`.
    pub fn uniform(count: u32, k: usize) -> Self {
        ColorSpec::new((0..count).map(|id| ColorEntry { id, k }).collect()).expect("k >= 1")
    }

    pub fn entries(&self) -> &[ColorEntry] {
        &self.entries
    }

    pub fn max_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.k).max().unwrap_or(0)
    }

    pub fn total_per_vertex(&self) -> usize {
        self.entries.iter().map(|e| e.k).sum()
    }

    fn index_of(&self, color: ColorId) -> Result<usize, SampleError> {
        self.entries
            .iter()
            .position(|e| e.id == color)
            .ok_or(SampleError::BadColor(color))
    }
}

fn check_degree_floor(g: &Graph, floor: usize) -> Result<(), SampleError> {
    if let Some(v) = g.vertices().find(|&v| g.degree(v) < floor) {
        return Err(SampleError::DegreeTooSmall {
            v,
            degree: g.degree(v),
            needed: floor,
        });
    }
    Ok(())
}

/// Distinct choices need `needed` neighbors; even with replacement a vertex
/// cannot choose from an empty neighborhood.
fn check_degrees(g: &Graph, mode: Mode, needed: usize) -> Result<(), SampleError> {
    match mode {
        Mode::WithoutReplacement => check_degree_floor(g, needed),
        Mode::WithReplacement => check_degree_floor(g, 1.min(needed)),
    }
}

fn draw_color_class(
    g: &Graph,
    v: VertexId,
    k: usize,
    mode: Mode,
    rng: &mut impl Rng,
) -> Vec<VertexId> {
    let nbrs = g.neighbors(v);
    match mode {
        Mode::WithReplacement => (0..k)
            .map(|_| nbrs[rng.random_range(0..nbrs.len())])
            .collect(),
        Mode::WithoutReplacement => rand::seq::index::sample(rng, nbrs.len(), k)
            .into_iter()
            .map(|i| nbrs[i])
            .collect(),
    }
}

/// A fully revealed k-out sample: for every vertex and every color, the list of
/// chosen neighbors, in draw order. Every choice lies along a host edge.
#[derive(Debug, Clone)]
pub struct KOutSample {
    host: Arc<Graph>,
    mode: Mode,
    spec: ColorSpec,
    /// `choices[color_index][vertex]` is that vertex's draw sequence.
    choices: Vec<Vec<Vec<VertexId>>>,
}

/// Draws a single-color k-out sample on `g`.
pub fn sample(
    g: &Arc<Graph>,
    k: usize,
    mode: Mode,
    rng: &mut impl Rng,
) -> Result<KOutSample, SampleError> {
    sample_colored(g, &ColorSpec::single(k), mode, rng)
}

/// Draws one independent color class per `spec` entry.
pub fn sample_colored(
    g: &Arc<Graph>,
    spec: &ColorSpec,
    mode: Mode,
    rng: &mut impl Rng,
) -> Result<KOutSample, SampleError> {
    check_degrees(g, mode, spec.max_multiplicity())?;
    let choices = spec
        .entries()
        .iter()
        .map(|e| {
            g.vertices()
                .map(|v| draw_color_class(g, v, e.k, mode, rng))
                .collect()
        })
        .collect();
    let s = KOutSample {
        host: Arc::clone(g),
        mode,
        spec: spec.clone(),
        choices,
    };
    s.assert_arcs_on_host();
    Ok(s)
}

impl KOutSample {
    pub fn host(&self) -> &Arc<Graph> {
        &self.host
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn spec(&self) -> &ColorSpec {
        &self.spec
    }

    pub fn choices_of(&self, v: VertexId, color: ColorId) -> &[VertexId] {
        let ci = self.spec.index_of(color).expect("known color");
        &self.choices[ci][v]
    }

    /// All arcs `(v, w, color)` in draw order per vertex.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, ColorId)> + '_ {
        self.spec.entries().iter().enumerate().flat_map(|(ci, e)| {
            self.choices[ci]
                .iter()
                .enumerate()
                .flat_map(move |(v, ws)| ws.iter().map(move |&w| (v, w, e.id)))
        })
    }

    pub fn total_choices(&self) -> usize {
        self.spec.total_per_vertex() * self.host.n()
    }

    fn assert_arcs_on_host(&self) {
        for (v, w, _) in self.arcs() {
            assert!(
                self.host.has_edge(v, w),
                "arc ({v}, {w}) is not a host edge"
            );
        }
        for (ci, e) in self.spec.entries().iter().enumerate() {
            for v in self.host.vertices() {
                assert_eq!(self.choices[ci][v].len(), e.k, "wrong choice count");
                if self.mode == Mode::WithoutReplacement {
                    let set: BTreeSet<_> = self.choices[ci][v].iter().collect();
                    assert_eq!(set.len(), e.k, "repeated choice within a color class");
                }
            }
        }
    }

    /// The simple undirected graph left after dropping orientation and
    /// coalescing repeated picks, optionally restricted to some colors.
    pub fn underlying_graph(&self, color_filter: Option<&[ColorId]>) -> Graph {
        let keep = |c: ColorId| color_filter.is_none_or(|f| f.contains(&c));
        let pairs: BTreeSet<(usize, usize)> = self
            .arcs()
            .filter(|&(_, _, c)| keep(c))
            .map(|(v, w, _)| (v.min(w), v.max(w)))
            .collect();
        Graph::from_edges(self.host.n(), pairs).expect("host arcs form a simple graph")
    }

    /// Out-neighborhood of a vertex set: the union of all chosen out-neighbors
    /// of `s`, minus `s` itself. Sorted.
    pub fn out_neighborhood(&self, s: &[VertexId]) -> Vec<VertexId> {
        let in_s: BTreeSet<_> = s.iter().copied().collect();
        let mut out = BTreeSet::new();
        for &v in &in_s {
            for ci in 0..self.choices.len() {
                for &w in &self.choices[ci][v] {
                    if !in_s.contains(&w) {
                        out.insert(w);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Recolors one uniformly chosen choice per vertex as blue, leaving the
    /// remaining `k-1` green. The multiset of choices is unchanged.
    pub fn split_green_blue(&self, rng: &mut impl Rng) -> Result<KOutSample, SampleError> {
        let [entry] = self.spec.entries() else {
            return Err(SampleError::BadMultiplicity);
        };
        let k = entry.k;
        if k < 2 {
            return Err(SampleError::BadMultiplicity);
        }
        let mut green: Vec<Vec<VertexId>> = Vec::with_capacity(self.host.n());
        let mut blue: Vec<Vec<VertexId>> = Vec::with_capacity(self.host.n());
        for v in self.host.vertices() {
            let mut g = self.choices[0][v].clone();
            let b = g.remove(rng.random_range(0..k));
            green.push(g);
            blue.push(vec![b]);
        }
        let spec = ColorSpec::new(vec![
            ColorEntry {
                id: GREEN,
                k: k - 1,
            },
            ColorEntry { id: BLUE, k: 1 },
        ])
        .expect("valid split spec");
        let s = KOutSample {
            host: Arc::clone(&self.host),
            mode: self.mode,
            spec,
            choices: vec![green, blue],
        };
        s.assert_arcs_on_host();
        Ok(s)
    }

    /// Serializes to `{mode, colors, choices}`; the host travels separately.
    pub fn to_json(&self) -> String {
        let doc = SampleDoc {
            mode: self.mode,
            colors: self.spec.entries().to_vec(),
            choices: self.choices.clone(),
        };
        serde_json::to_string(&doc).expect("sample serializes")
    }

    /// Rebuilds a sample from JSON, re-validating every arc against `host`.
    pub fn from_json(host: Arc<Graph>, text: &str) -> Result<KOutSample, SampleError> {
        let doc: SampleDoc =
            serde_json::from_str(text).map_err(|e| SampleError::Json(e.to_string()))?;
        let spec = ColorSpec::new(doc.colors)?;
        if doc.choices.len() != spec.entries().len() {
            return Err(SampleError::Json("choices/colors length mismatch".into()));
        }
        for (ci, e) in spec.entries().iter().enumerate() {
            if doc.choices[ci].len() != host.n() {
                return Err(SampleError::HostMismatch(format!(
                    "color {} has {} vertex rows, host has {}",
                    e.id,
                    doc.choices[ci].len(),
                    host.n()
                )));
            }
            for (v, ws) in doc.choices[ci].iter().enumerate() {
                if ws.len() != e.k {
                    return Err(SampleError::HostMismatch(format!(
                        "vertex {v} has {} choices of color {}, expected {}",
                        ws.len(),
                        e.id,
                        e.k
                    )));
                }
                for &w in ws {
                    if w >= host.n() || !host.has_edge(v, w) {
                        return Err(SampleError::HostMismatch(format!(
                            "arc ({v}, {w}) is not a host edge"
                        )));
                    }
                }
            }
        }
        Ok(KOutSample {
            host,
            mode: doc.mode,
            spec,
            choices: doc.choices,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SampleDoc {
    mode: Mode,
    colors: Vec<ColorEntry>,
    choices: Vec<Vec<Vec<VertexId>>>,
}

/// One logged draw of the lazy oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DrawRecord {
    pub vertex: VertexId,
    pub color: ColorId,
    pub choice: VertexId,
}

/// Lazily revealed choice source with per-vertex, per-color budgets.
///
/// Single-owner mutable state; run one oracle per trial and parallelize across
/// trials.
#[derive(Debug, Clone)]
pub struct ChoiceOracle {
    host: Arc<Graph>,
    spec: ColorSpec,
    mode: Mode,
    rng: ChaCha8Rng,
    drawn: Vec<Vec<Vec<VertexId>>>,
    log: Vec<DrawRecord>,
}

/// Creates a lazy choice oracle over `g` with the given per-color budgets.
///
/// With replacement, degree-0 vertices are tolerated here (they may simply
/// never be asked); only [`ChoiceOracle::draw`] on such a vertex errors.
pub fn oracle(
    g: &Arc<Graph>,
    spec: &ColorSpec,
    mode: Mode,
    seed: u64,
) -> Result<ChoiceOracle, SampleError> {
    if mode == Mode::WithoutReplacement {
        check_degree_floor(g, spec.max_multiplicity())?;
    }
    let drawn = spec
        .entries()
        .iter()
        .map(|_| vec![Vec::new(); g.n()])
        .collect();
    Ok(ChoiceOracle {
        host: Arc::clone(g),
        spec: spec.clone(),
        mode,
        rng: ChaCha8Rng::seed_from_u64(seed),
        drawn,
        log: Vec::new(),
    })
}

impl ChoiceOracle {
    pub fn host(&self) -> &Arc<Graph> {
        &self.host
    }

    pub fn spec(&self) -> &ColorSpec {
        &self.spec
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn used(&self, v: VertexId, color: ColorId) -> usize {
        let ci = self.spec.index_of(color).expect("known color");
        self.drawn[ci][v].len()
    }

    pub fn remaining(&self, v: VertexId, color: ColorId) -> usize {
        let ci = self.spec.index_of(color).expect("known color");
        self.spec.entries()[ci].k - self.drawn[ci][v].len()
    }

    /// Reveals one choice of `color` for `v`: uniform over `N_G(v)`, or uniform
    /// over `N_G(v)` minus `v`'s earlier draws of the same color.
    pub fn draw(&mut self, v: VertexId, color: ColorId) -> Result<VertexId, SampleError> {
        let ci = self.spec.index_of(color)?;
        let k = self.spec.entries()[ci].k;
        if self.drawn[ci][v].len() >= k {
            return Err(SampleError::BudgetExhausted { v, color });
        }
        let nbrs = self.host.neighbors(v);
        if nbrs.is_empty() {
            return Err(SampleError::DegreeTooSmall {
                v,
                degree: 0,
                needed: 1,
            });
        }
        let w = match self.mode {
            Mode::WithReplacement => nbrs[self.rng.random_range(0..nbrs.len())],
            Mode::WithoutReplacement => {
                let prior = &self.drawn[ci][v];
                let fresh: Vec<VertexId> = nbrs
                    .iter()
                    .copied()
                    .filter(|w| !prior.contains(w))
                    .collect();
                fresh[self.rng.random_range(0..fresh.len())]
            }
        };
        assert!(self.host.has_edge(v, w), "draw left the host");
        self.drawn[ci][v].push(w);
        self.log.push(DrawRecord {
            vertex: v,
            color,
            choice: w,
        });
        Ok(w)
    }

    /// Chronological draw log.
    pub fn log(&self) -> &[DrawRecord] {
        &self.log
    }

    /// Draws already made by `v` in `color`, oldest first.
    pub fn draws_of(&self, v: VertexId, color: ColorId) -> &[VertexId] {
        let ci = self.spec.index_of(color).expect("known color");
        &self.drawn[ci][v]
    }

    /// Undirected support of everything revealed so far.
    pub fn revealed_pairs(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.log
            .iter()
            .map(|r| (r.vertex.min(r.choice), r.vertex.max(r.choice)))
            .collect()
    }

    /// Exhausts every remaining budget and freezes the oracle into a batch
    /// sample, so lazy and batch paths share downstream code.
    pub fn freeze(mut self) -> Result<KOutSample, SampleError> {
        for ci in 0..self.spec.entries().len() {
            let e = self.spec.entries()[ci];
            for v in 0..self.host.n() {
                while self.drawn[ci][v].len() < e.k {
                    self.draw(v, e.id)?;
                }
            }
        }
        let s = KOutSample {
            host: self.host,
            mode: self.mode,
            spec: self.spec,
            choices: self.drawn,
        };
        s.assert_arcs_on_host();
        Ok(s)
    }
}
