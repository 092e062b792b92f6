//! Undirected simple host graphs: adjacency storage, the generator families used
//! throughout the crate, and the edge-list interchange format.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Vertices are dense indices `0..n`; there are no labels.
pub type VertexId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("order must be even and at least 4, got {0}")]
    OddOrder(usize),
    #[error("minimum degree {requested} is infeasible for a simple graph on {n} vertices")]
    InfeasibleDegree { requested: usize, n: usize },
    #[error("vertex {v} out of range for graph of order {n}")]
    BadVertex { v: usize, n: usize },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An immutable undirected simple graph.
///
/// Adjacency lists are strictly sorted and symmetric: `u ∈ adj(v) ⇔ v ∈ adj(u)`,
/// with no self-loops and no duplicates. All constructors enforce this, so a
/// `Graph` value can be shared read-only across threads without further checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::BadVertex { v: u, n });
            }
            if v >= n {
                return Err(GraphError::BadVertex { v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        for (u, list) in adj.iter().enumerate() {
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(GraphError::DuplicateEdge { u: a, v: b });
            }
        }
        Ok(Graph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        assert!(v < self.n(), "vertex {v} out of range");
        self.adj[v].len()
    }

    /// Minimum degree over all vertices; 0 for the empty graph.
    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        assert!(v < self.n(), "vertex {v} out of range");
        &self.adj[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        assert!(u < self.n(), "vertex {u} out of range");
        assert!(v < self.n(), "vertex {v} out of range");
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Vertices adjacent to both `u` and `v`, in increasing order.
    pub fn common_neighbors(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let (mut a, mut b) = (self.neighbors(u).iter(), self.neighbors(v).iter());
        let (mut x, mut y) = (a.next(), b.next());
        let mut out = Vec::new();
        while let (Some(&p), Some(&q)) = (x, y) {
            match p.cmp(&q) {
                std::cmp::Ordering::Less => x = a.next(),
                std::cmp::Ordering::Greater => y = b.next(),
                std::cmp::Ordering::Equal => {
                    out.push(p);
                    x = a.next();
                    y = b.next();
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// All edges as ordered pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}

/// Complete graph `K_n`.
pub fn complete_graph(n: usize) -> Graph {
    let adj = (0..n)
        .map(|v| (0..n).filter(|&u| u != v).collect())
        .collect();
    Graph { adj }
}

/// Cycle `C_n` (`n ≥ 3`).
pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

/// Path `0 – 1 – … – (n-1)`.
pub fn path_graph(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

/// Two disjoint copies of `K_{n/2}` on `[0, n/2)` and `[n/2, n)`, joined by the
/// perfect matching `i ↔ i + n/2`. Every vertex ends up with degree exactly `n/2`.
pub fn two_cliques_plus_matching(n: usize) -> Result<Graph, GraphError> {
    if !n.is_multiple_of(2) || n < 4 {
        return Err(GraphError::OddOrder(n));
    }
    let half = n / 2;
    let mut edges = Vec::new();
    for side in [0, half] {
        for i in 0..half {
            for j in (i + 1)..half {
                edges.push((side + i, side + j));
            }
        }
    }
    for i in 0..half {
        edges.push((i, i + half));
    }
    Ok(Graph::from_edges(n, edges).unwrap())
}

/// Random graph with minimum degree at least `⌈(1/2 + eps)·n⌉`.
///
/// Starts from `K_n` and visits the edges in random order, deleting each with
/// probability `removal_p` unless a deletion would push either endpoint below
/// the degree floor. The floor therefore holds for every seed.
pub fn random_sdg(
    n: usize,
    eps: f64,
    removal_p: f64,
    rng: &mut impl Rng,
) -> Result<Graph, GraphError> {
    assert!(
        (0.0..=1.0).contains(&removal_p),
        "removal_p must be a probability"
    );
    let floor = ((0.5 + eps) * n as f64).ceil() as usize;
    if n == 0 || floor > n - 1 {
        return Err(GraphError::InfeasibleDegree {
            requested: floor,
            n,
        });
    }
    let mut degree = vec![n - 1; n];
    let mut removed = std::collections::HashSet::new();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    edges.shuffle(rng);
    for &(u, v) in &edges {
        if degree[u] > floor && degree[v] > floor && rng.random_bool(removal_p) {
            removed.insert((u, v));
            degree[u] -= 1;
            degree[v] -= 1;
        }
    }
    let kept = edges.into_iter().filter(|e| !removed.contains(e));
    Ok(Graph::from_edges(n, kept).unwrap())
}

/// Random host with minimum degree at least `m`: every vertex draws `m` distinct
/// random neighbors and the union of the draws is symmetrized.
pub fn random_min_degree_host(n: usize, m: usize, rng: &mut impl Rng) -> Result<Graph, GraphError> {
    if n == 0 || m > n - 1 {
        return Err(GraphError::InfeasibleDegree { requested: m, n });
    }
    let mut pairs = std::collections::BTreeSet::new();
    for v in 0..n {
        // m distinct picks among the other n-1 vertices
        for idx in rand::seq::index::sample(rng, n - 1, m) {
            let u = if idx < v { idx } else { idx + 1 };
            pairs.insert((v.min(u), v.max(u)));
        }
    }
    Ok(Graph::from_edges(n, pairs).unwrap())
}

/// Parses the edge-list interchange format.
///
/// The first non-comment line is `n e`; each of the following `e` lines is one
/// edge `u v` with 0-based ids. Tokens are whitespace-delimited and `#` starts
/// a comment that runs to the end of the line.
pub fn read_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace().map(|tok| {
            tok.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("expected a non-negative integer, got {tok:?}"),
            })
        });
        let a = fields.next().ok_or(GraphError::Parse {
            line,
            msg: "empty record".into(),
        })??;
        let b = fields.next().ok_or(GraphError::Parse {
            line,
            msg: "expected two fields".into(),
        })??;
        if fields.next().is_some() {
            return Err(GraphError::Parse {
                line,
                msg: "expected exactly two fields".into(),
            });
        }
        match header {
            None => header = Some((a, b)),
            Some((n, _)) => {
                if a >= n || b >= n {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("vertex id out of range for order {n}"),
                    });
                }
                edges.push((a, b));
            }
        }
    }
    let (n, e) = header.ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header line \"n e\"".into(),
    })?;
    if edges.len() != e {
        return Err(GraphError::Parse {
            line: text.lines().count(),
            msg: format!("header announced {e} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

/// Canonical edge-list form: header, then each edge once as `u v` with `u < v`,
/// sorted lexicographically.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
