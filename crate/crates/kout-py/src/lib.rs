//! Python bindings: host graphs, k-out sampling, the structural searches, and
//! the Monte Carlo harness, mirrored onto a small Python surface.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kout::analysis;
use kout::dfs;
use kout::epochs;
use kout::graph;
use kout::harness;
use kout::posa;
use kout::sample::{self, ColorSpec, Mode};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode_of(with_replacement: bool) -> Mode {
    if with_replacement {
        Mode::WithReplacement
    } else {
        Mode::WithoutReplacement
    }
}

/// Immutable undirected host graph.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: Arc<graph::Graph>,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn complete(n: usize) -> PyGraph {
        PyGraph {
            inner: Arc::new(graph::complete_graph(n)),
        }
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyGraph {
        PyGraph {
            inner: Arc::new(graph::cycle_graph(n)),
        }
    }

    #[staticmethod]
    fn path(n: usize) -> PyGraph {
        PyGraph {
            inner: Arc::new(graph::path_graph(n)),
        }
    }

    #[staticmethod]
    fn two_cliques_plus_matching(n: usize) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: Arc::new(graph::two_cliques_plus_matching(n).map_err(value_err)?),
        })
    }

    #[staticmethod]
    fn random_sdg(n: usize, eps: f64, removal_p: f64, seed: u64) -> PyResult<PyGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(PyGraph {
            inner: Arc::new(graph::random_sdg(n, eps, removal_p, &mut rng).map_err(value_err)?),
        })
    }

    #[staticmethod]
    fn random_min_degree(n: usize, m: usize, seed: u64) -> PyResult<PyGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(PyGraph {
            inner: Arc::new(graph::random_min_degree_host(n, m, &mut rng).map_err(value_err)?),
        })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: Arc::new(graph::read_edge_list(text).map_err(value_err)?),
        })
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: Arc::new(graph::Graph::from_edges(n, edges).map_err(value_err)?),
        })
    }

    fn to_edge_list(&self) -> String {
        graph::write_edge_list(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn min_degree(&self) -> usize {
        self.inner.min_degree()
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        self.check_vertex(v)?;
        Ok(self.inner.degree(v))
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        self.check_vertex(v)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn has_edge(&self, u: usize, v: usize) -> PyResult<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.inner.has_edge(u, v))
    }

    fn common_neighbors(&self, u: usize, v: usize) -> PyResult<Vec<usize>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.inner.common_neighbors(u, v))
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    /// Draws a k-out sample; `colors` independent color classes of k choices.
    #[pyo3(signature = (k, seed, with_replacement=false, colors=1))]
    fn sample(
        &self,
        k: usize,
        seed: u64,
        with_replacement: bool,
        colors: u32,
    ) -> PyResult<PySample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = ColorSpec::uniform(colors, k);
        let s = sample::sample_colored(&self.inner, &spec, mode_of(with_replacement), &mut rng)
            .map_err(value_err)?;
        Ok(PySample { inner: s })
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={}, min_degree={})",
            self.inner.n(),
            self.inner.edge_count(),
            self.inner.min_degree()
        )
    }
}

impl PyGraph {
    fn check_vertex(&self, v: usize) -> PyResult<()> {
        if v >= self.inner.n() {
            return Err(value_err(format!(
                "vertex {v} out of range for graph of order {}",
                self.inner.n()
            )));
        }
        Ok(())
    }
}

/// A fully revealed k-out sample over its host graph.
#[pyclass(name = "Sample", frozen)]
struct PySample {
    inner: sample::KOutSample,
}

#[pymethods]
impl PySample {
    /// Chosen out-neighbors of `v` in color `color`, in draw order.
    #[pyo3(signature = (v, color=0))]
    fn choices(&self, v: usize, color: u32) -> Vec<usize> {
        self.inner.choices_of(v, color).to_vec()
    }

    /// Undirected simple graph left after coalescing, optionally restricted
    /// to some colors.
    #[pyo3(signature = (colors=None))]
    fn underlying_graph(&self, colors: Option<Vec<u32>>) -> PyGraph {
        PyGraph {
            inner: Arc::new(self.inner.underlying_graph(colors.as_deref())),
        }
    }

    fn out_neighborhood(&self, vertices: Vec<usize>) -> Vec<usize> {
        self.inner.out_neighborhood(&vertices)
    }

    fn split_green_blue(&self, seed: u64) -> PyResult<PySample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(PySample {
            inner: self.inner.split_green_blue(&mut rng).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Sample(n={}, choices={})",
            self.inner.host().n(),
            self.inner.total_choices()
        )
    }
}

/// Component count and per-vertex component labels.
#[pyfunction]
fn connected_components(g: &PyGraph) -> (usize, Vec<usize>) {
    let parts = analysis::connected_components(&g.inner);
    (parts.count(), parts.labels().to_vec())
}

#[pyfunction]
fn isolated_vertices(g: &PyGraph) -> Vec<usize> {
    analysis::isolated_vertices(&g.inner)
}

#[pyfunction]
fn vertex_connectivity(g: &PyGraph) -> usize {
    analysis::vertex_connectivity(&g.inner)
}

#[pyfunction]
fn is_k_connected(g: &PyGraph, k: usize) -> bool {
    analysis::is_k_connected(&g.inner, k)
}

/// Longest-path heuristic; returns the best path found as a vertex list.
#[pyfunction]
fn longest_path_search(g: &PyGraph, budget: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    posa::extend_or_rotate_search(&g.inner, budget, &mut rng)
        .order()
        .to_vec()
}

/// Rotation-extension Hamilton cycle search; the returned cycle is validated.
#[pyfunction]
fn hamiltonicity_search(g: &PyGraph, budget: usize, seed: u64) -> Option<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    posa::hamiltonicity_search(&g.inner, budget, &mut rng)
}

/// Exact longest path by exhaustive search (small graphs only).
#[pyfunction]
fn brute_force_longest_path(g: &PyGraph) -> PyResult<(usize, Vec<usize>)> {
    let (len, p) = posa::brute_force_longest_path(&g.inner).map_err(value_err)?;
    Ok((len, p.order().to_vec()))
}

/// Endpoint set reachable by rotations that fix `path[0]`.
#[pyfunction]
fn rotation_endpoints(g: &PyGraph, path: Vec<usize>) -> PyResult<Vec<usize>> {
    let p = posa::PathState::from_vertices(&g.inner, path).map_err(value_err)?;
    Ok(posa::rotation_closure(&g.inner, &p).endpoints().to_vec())
}

#[pyfunction]
fn posa_bound_check(g: &PyGraph, path: Vec<usize>) -> PyResult<bool> {
    let p = posa::PathState::from_vertices(&g.inner, path).map_err(value_err)?;
    Ok(posa::posa_bound_check(&g.inner, &p))
}

/// One randomized-DFS long-path trial with budget ⌊eps·k·m⌋.
#[pyfunction]
fn long_path_trial<'py>(
    py: Python<'py>,
    g: &PyGraph,
    k: usize,
    eps: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (trial, run) = dfs::long_path_trial(&g.inner, k, eps, &mut rng);
    let d = PyDict::new(py);
    d.set_item("achieved", trial.achieved)?;
    d.set_item("target", trial.target)?;
    d.set_item("success", trial.success)?;
    d.set_item("budget", trial.budget)?;
    d.set_item("min_degree", trial.min_degree)?;
    d.set_item("k_sufficient", trial.k_sufficient)?;
    d.set_item("hits", run.hits)?;
    d.set_item("restarts", run.restarts)?;
    d.set_item("best_path", run.best_path)?;
    Ok(d)
}

/// Epoch-colored long-cycle search.
#[pyfunction]
fn long_cycle<'py>(
    py: Python<'py>,
    g: &PyGraph,
    k: usize,
    eps: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let run = epochs::long_cycle(&g.inner, k, eps, &mut rng);
    let d = PyDict::new(py);
    d.set_item("cycle", run.result.cycle.clone())?;
    d.set_item("length", run.result.length)?;
    d.set_item("target", run.result.target)?;
    d.set_item("epochs", run.epochs.len())?;
    d.set_item("interrupted", run.interrupted.is_some())?;
    d.set_item("epoch_trace_jsonl", run.epochs_jsonl())?;
    Ok(d)
}

/// Color assigned to a binary epoch id.
#[pyfunction]
fn epoch_color(id: &str) -> PyResult<String> {
    let c = epochs::epoch_color(id).map_err(value_err)?;
    Ok(format!("{c:?}"))
}

/// Closed-form and sampled probabilities for the matching-free event on the
/// two-cliques host.
#[pyfunction]
fn counterexample_experiment<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = harness::counterexample_experiment(n, k, trials, seed).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("empirical_p", rep.empirical_p)?;
    d.set_item("exact_p", rep.exact_p)?;
    d.set_item("asymptotic_e2k", rep.asymptotic_e2k)?;
    d.set_item("claimed_bound", rep.claimed_bound)?;
    d.set_item("sigma", rep.sigma)?;
    Ok(d)
}

/// Runs a harness experiment from its JSON config; returns the summary plus
/// per-trial metric rows.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg: harness::ExperimentConfig = serde_json::from_str(config_json).map_err(value_err)?;
    let out = harness::run_experiment(&cfg).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("experiment", out.summary.experiment.clone())?;
    d.set_item("trials", out.summary.trials)?;
    d.set_item("successes", out.summary.successes)?;
    d.set_item("frequency", out.summary.frequency)?;
    d.set_item("wilson_low", out.summary.wilson_low)?;
    d.set_item("wilson_high", out.summary.wilson_high)?;
    let means: BTreeMap<String, f64> = out.summary.metric_means.clone();
    d.set_item("metric_means", means)?;
    let records: Vec<BTreeMap<String, f64>> = out
        .records
        .iter()
        .map(|r| {
            let mut m = r.metrics.clone();
            m.insert("trial".into(), r.trial as f64);
            m.insert("success".into(), r.success as u8 as f64);
            m
        })
        .collect();
    d.set_item("records", records)?;
    Ok(d)
}

#[pymodule]
fn kout_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySample>()?;
    m.add_function(wrap_pyfunction!(connected_components, m)?)?;
    m.add_function(wrap_pyfunction!(isolated_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_connectivity, m)?)?;
    m.add_function(wrap_pyfunction!(is_k_connected, m)?)?;
    m.add_function(wrap_pyfunction!(longest_path_search, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonicity_search, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_longest_path, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_endpoints, m)?)?;
    m.add_function(wrap_pyfunction!(posa_bound_check, m)?)?;
    m.add_function(wrap_pyfunction!(long_path_trial, m)?)?;
    m.add_function(wrap_pyfunction!(long_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(epoch_color, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
