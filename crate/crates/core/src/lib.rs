//! Explicit-state accepting-cycle detection.
//!
//! A model written in a small communicating-automata language is expanded
//! into its product with a property automaton. The product graph is stored as
//! an append-only edge log from which compressed-sparse-row snapshots are
//! taken, and accepting cycles are searched for with MAP (maximal accepting
//! predecessors computed as repeated max-semiring matrix-vector products),
//! OWCTY, or nested DFS. Detection can run on partial snapshots while the
//! state space is still being generated.

pub mod graph;
pub mod map;
pub mod model;
pub mod bench;
pub mod cli;
pub mod explore;
pub mod oracle;
pub mod owcty;
pub mod pool;
pub mod verdict;

pub use graph::{AcceptingSet, CsrSnapshot, EdgeLog, Orientation, VertexId};
pub use map::{run_map, MapConfig, MapStats};
pub use owcty::run_owcty;
pub use verdict::Verdict;
pub use explore::{explore, Algorithm, ExploreConfig, ExploreError, RunStats};
pub use pool::WorkerPool;
