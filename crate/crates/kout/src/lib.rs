//! Random k-out subgraphs of arbitrary host graphs.
//!
//! Every vertex of a fixed host graph independently chooses `k` random
//! neighbors; the union of the choices is the random subgraph `G_k`. This
//! crate provides the host-graph generators and samplers for that model, the
//! structural machinery built on it — connectivity certification, rotation-
//! extension search, randomized DFS for long paths, and an epoch-colored
//! exploration for long cycles — plus a deterministic Monte Carlo harness
//! that measures how often the structural guarantees hold at finite sizes.
//!
//! ```
//! use std::sync::Arc;
//! use rand::SeedableRng;
//! use kout::sample::{sample, Mode};
//!
//! let host = Arc::new(kout::graph::complete_graph(30));
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let s = sample(&host, 3, Mode::WithoutReplacement, &mut rng).unwrap();
//! let gk = s.underlying_graph(None);
//! assert!(gk.min_degree() >= 3);
//! assert!(kout::analysis::is_k_connected(&gk, 2));
//! let cycle = kout::posa::hamiltonicity_search(&gk, 50_000, &mut rng);
//! assert!(cycle.is_some_and(|c| c.len() == 30));
//! ```

pub mod analysis;
pub mod dfs;
pub mod epochs;
pub mod graph;
pub mod harness;
pub mod posa;
pub mod sample;

pub use graph::{Graph, GraphError, VertexId};
pub use sample::{ChoiceOracle, ColorSpec, KOutSample, Mode, SampleError};
