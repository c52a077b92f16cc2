//! Product-graph storage: dense vertex interning, the append-only edge log and
//! the compressed-sparse-row snapshots the detection engines consume.
//!
//! One writer appends to an [`EdgeLog`] while any number of readers take
//! [`LogPrefix`]-bounded snapshots of it. Snapshots are immutable and can be
//! shared freely between threads.

mod csr;
mod scc;
pub mod text;

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use parking_lot::RwLock;
use rustc_hash::FxHashMap;
use thiserror::Error;

pub use csr::{CsrSnapshot, Orientation};
pub use scc::{restrict_to_accepting_sccs, strongly_connected_components, Restricted};

/// Dense vertex identity. Ids are handed out in discovery order starting at 0
/// and double as the total order MAP uses for accepting vertices.
pub type VertexId = u32;

/// A directed edge `(source, target)` in original (forward) orientation.
pub type Edge = (VertexId, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex capacity exceeded (limit {limit})")]
    CapacityExceeded { limit: usize },
    #[error("unknown vertex {vertex} (graph has {vertex_count} vertices)")]
    UnknownVertex { vertex: VertexId, vertex_count: usize },
}

/// The set of accepting vertices over `[0, n)`.
#[derive(Clone, PartialEq, Eq)]
pub struct AcceptingSet {
    bits: FixedBitSet,
}

impl AcceptingSet {
    pub fn empty(n: usize) -> Self {
        AcceptingSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    /// Builds a set over `[0, n)` from member ids.
    ///
    /// Panics if a member is out of range.
    pub fn from_members<I: IntoIterator<Item = VertexId>>(n: usize, members: I) -> Self {
        let mut set = Self::empty(n);
        for v in members {
            set.insert(v);
        }
        set
    }

    pub(crate) fn from_flags(flags: &FixedBitSet, n: usize) -> Self {
        let mut bits = flags.clone();
        bits.grow(n);
        debug_assert_eq!(bits.len(), n);
        AcceptingSet { bits }
    }

    /// Size of the universe `[0, n)`.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.bits.contains(v as usize)
    }

    pub fn insert(&mut self, v: VertexId) {
        assert!(
            (v as usize) < self.bits.len(),
            "accepting vertex {v} outside universe of {}",
            self.bits.len()
        );
        self.bits.insert(v as usize);
    }

    pub fn remove(&mut self, v: VertexId) {
        self.bits.set(v as usize, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bits.ones().map(|v| v as VertexId)
    }

    pub fn min(&self) -> Option<VertexId> {
        self.bits.minimum().map(|v| v as VertexId)
    }
}

impl std::fmt::Debug for AcceptingSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A consistent view of the log length: every edge in the first `edges`
/// entries has both endpoints below `vertices`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LogPrefix {
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Default)]
struct LogData {
    edges: Vec<Edge>,
    accepting: FixedBitSet,
    vertices: usize,
}

/// Append-only edge log with accepting flags per vertex.
///
/// Duplicate edges are kept; snapshots deduplicate them.
#[derive(Default)]
pub struct EdgeLog {
    data: RwLock<LogData>,
}

impl EdgeLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a new vertex and returns its id.
    pub fn add_vertex(&self, accepting: bool) -> VertexId {
        let mut data = self.data.write();
        let id = data.vertices;
        data.vertices += 1;
        data.accepting.grow(id + 1);
        data.accepting.set(id, accepting);
        id as VertexId
    }

    pub fn append_edge(&self, src: VertexId, dst: VertexId) -> Result<(), GraphError> {
        self.append_edges(&[(src, dst)])
    }

    /// Appends a batch atomically: readers see either none or all of it.
    pub fn append_edges(&self, batch: &[Edge]) -> Result<(), GraphError> {
        let mut data = self.data.write();
        let n = data.vertices;
        for &(s, d) in batch {
            for v in [s, d] {
                if v as usize >= n {
                    return Err(GraphError::UnknownVertex {
                        vertex: v,
                        vertex_count: n,
                    });
                }
            }
        }
        data.edges.extend_from_slice(batch);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.data.read().vertices
    }

    pub fn edge_count(&self) -> usize {
        self.data.read().edges.len()
    }

    /// Captures the current lengths atomically.
    pub fn prefix(&self) -> LogPrefix {
        let data = self.data.read();
        LogPrefix {
            vertices: data.vertices,
            edges: data.edges.len(),
        }
    }

    pub fn is_accepting(&self, v: VertexId) -> bool {
        self.data.read().accepting.contains(v as usize)
    }

    /// Snapshot of everything appended so far.
    pub fn snapshot(&self, orientation: Orientation) -> CsrSnapshot {
        let prefix = self.prefix();
        self.snapshot_prefix(prefix, orientation)
    }

    /// Snapshot of exactly the given prefix, regardless of what has been
    /// appended since it was captured.
    pub fn snapshot_prefix(&self, prefix: LogPrefix, orientation: Orientation) -> CsrSnapshot {
        let (edges, accepting) = self.copy_prefix(prefix);
        CsrSnapshot::from_edges(prefix.vertices, &edges, accepting, orientation)
    }

    /// Copies the prefix out under a short read lock.
    pub fn copy_prefix(&self, prefix: LogPrefix) -> (Vec<Edge>, AcceptingSet) {
        let data = self.data.read();
        assert!(
            prefix.edges <= data.edges.len() && prefix.vertices <= data.vertices,
            "prefix {prefix:?} beyond log end"
        );
        let edges = data.edges[..prefix.edges].to_vec();
        let mut flags = FixedBitSet::with_capacity(prefix.vertices);
        for v in data.accepting.ones().take_while(|&v| v < prefix.vertices) {
            flags.insert(v);
        }
        (edges, AcceptingSet::from_flags(&flags, prefix.vertices))
    }
}

/// Maps canonical state bytes to dense ids and registers them in the log.
pub struct ProductGraph {
    ids: FxHashMap<Box<[u8]>, VertexId>,
    log: Arc<EdgeLog>,
    limit: usize,
}

impl ProductGraph {
    pub fn new(limit: usize) -> Self {
        ProductGraph {
            ids: FxHashMap::default(),
            log: Arc::new(EdgeLog::new()),
            limit,
        }
    }

    pub fn log(&self) -> &Arc<EdgeLog> {
        &self.log
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn lookup(&self, key: &[u8]) -> Option<VertexId> {
        self.ids.get(key).copied()
    }

    /// Returns the id for `key` and whether it was newly assigned. The
    /// accepting flag is only recorded for new keys.
    pub fn intern_state(&mut self, key: &[u8], accepting: bool) -> Result<(VertexId, bool), GraphError> {
        if let Some(&id) = self.ids.get(key) {
            return Ok((id, false));
        }
        if self.ids.len() >= self.limit {
            return Err(GraphError::CapacityExceeded { limit: self.limit });
        }
        let id = self.log.add_vertex(accepting);
        debug_assert_eq!(id as usize, self.ids.len());
        self.ids.insert(key.into(), id);
        Ok((id, true))
    }

    pub fn append_edge(&self, src: VertexId, dst: VertexId) -> Result<(), GraphError> {
        self.log.append_edge(src, dst)
    }

    /// All interned keys, indexed by id.
    pub fn keys(&self) -> Vec<&[u8]> {
        let mut keys: Vec<&[u8]> = vec![&[]; self.ids.len()];
        for (k, &id) in &self.ids {
            keys[id as usize] = k;
        }
        keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::{HashMap, HashSet};

    #[test]
    fn first_key_gets_zero_and_interning_is_idempotent() {
        let mut g = ProductGraph::new(10);
        assert_eq!(g.intern_state(b"k0", true).unwrap(), (0, true));
        assert_eq!(g.intern_state(b"k0", false).unwrap(), (0, false));
        assert!(g.log().is_accepting(0));
    }

    #[test]
    fn random_keys_get_dense_ids() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut g = ProductGraph::new(usize::MAX);
        let mut reference: HashMap<Vec<u8>, VertexId> = HashMap::new();
        while reference.len() < 1000 {
            let len = rng.random_range(1..12);
            let key: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let (id, new) = g.intern_state(&key, false).unwrap();
            match reference.get(&key) {
                Some(&old) => assert!(!new && old == id),
                None => {
                    assert!(new);
                    assert_eq!(id as usize, reference.len());
                    reference.insert(key, id);
                }
            }
        }
        let ids: HashSet<_> = reference.values().copied().collect();
        assert_eq!(ids, (0..1000).collect());
    }

    #[test]
    fn capacity_is_enforced() {
        let mut g = ProductGraph::new(2);
        g.intern_state(b"a", false).unwrap();
        g.intern_state(b"b", false).unwrap();
        assert_eq!(g.intern_state(b"a", false).unwrap(), (0, false));
        assert_eq!(
            g.intern_state(b"c", false),
            Err(GraphError::CapacityExceeded { limit: 2 })
        );
    }

    #[test]
    fn log_keeps_duplicates() {
        let log = EdgeLog::new();
        log.add_vertex(false);
        log.add_vertex(false);
        log.append_edge(0, 1).unwrap();
        assert_eq!(log.edge_count(), 1);
        log.append_edge(0, 1).unwrap();
        assert_eq!(log.edge_count(), 2);
        assert_eq!(log.snapshot(Orientation::Forward).m(), 1);
    }

    #[test]
    fn unknown_endpoint_is_rejected() {
        let log = EdgeLog::new();
        log.add_vertex(false);
        assert_eq!(
            log.append_edge(0, 3),
            Err(GraphError::UnknownVertex {
                vertex: 3,
                vertex_count: 1
            })
        );
        assert_eq!(log.edge_count(), 0);
    }

    #[test]
    fn random_log_snapshot_counts_distinct_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let log = EdgeLog::new();
        let n = 400;
        for _ in 0..n {
            log.add_vertex(rng.random_bool(0.2));
        }
        let mut distinct = HashSet::new();
        for _ in 0..100_000 {
            let e = (rng.random_range(0..n), rng.random_range(0..n));
            distinct.insert(e);
            log.append_edge(e.0, e.1).unwrap();
        }
        assert_eq!(log.edge_count(), 100_000);
        for o in [Orientation::Forward, Orientation::Transposed] {
            assert_eq!(log.snapshot(o).m(), distinct.len());
        }
    }

    #[test]
    fn prefix_snapshot_ignores_later_appends() {
        let log = EdgeLog::new();
        for _ in 0..3 {
            log.add_vertex(false);
        }
        log.append_edge(0, 1).unwrap();
        let p = log.prefix();
        log.add_vertex(true);
        log.append_edge(1, 3).unwrap();
        let snap = log.snapshot_prefix(p, Orientation::Forward);
        assert_eq!((snap.n(), snap.m()), (3, 1));
        assert!(snap.accepting().is_empty());
    }
}
