//! Maximal accepting predecessor (MAP) cycle detection.
//!
//! Every accepting vertex carries its own id as a value. A propagation step
//! is a sparse matrix-vector product over the `(max, max)` semiring: each
//! vertex takes the maximum of its own value and the candidates offered by
//! its in-neighbours, where an accepting in-neighbour offers at least its own
//! id. Iterating to a fixpoint yields, for every vertex, the largest accepting
//! vertex with a non-empty path to it. An accepting vertex that becomes its
//! own maximal predecessor lies on an accepting cycle. Otherwise all
//! accepting vertices that showed up as someone's maximum cannot lie on an
//! accepting cycle and are demoted, and the computation restarts.
//!
//! Steps are Jacobi-style: every read goes to the previous vector and every
//! write to a fresh one, so a step is a pure function whose rows can be
//! split across any number of workers with bitwise-identical results.

use std::fmt;

use thiserror::Error;

use crate::graph::{AcceptingSet, CsrSnapshot, VertexId};
use crate::pool::WorkerPool;
use crate::verdict::Verdict;


/// Either NIL or a vertex id. NIL sorts below every vertex and vertices sort
/// by id, so the derived `Ord` is the MAP order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MapValue(u32);

impl MapValue {
    pub const NIL: MapValue = MapValue(0);

    #[inline]
    pub fn vertex(v: VertexId) -> MapValue {
        debug_assert!(v < u32::MAX);
        MapValue(v + 1)
    }

    #[inline]
    pub fn get(self) -> Option<VertexId> {
        self.0.checked_sub(1)
    }

    pub fn is_nil(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for MapValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("NIL"),
        }
    }
}

impl From<Option<VertexId>> for MapValue {
    fn from(v: Option<VertexId>) -> Self {
        v.map_or(MapValue::NIL, MapValue::vertex)
    }
}

/// One value per vertex.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MapVector(pub Vec<MapValue>);

impl MapVector {
    pub fn nil(n: usize) -> Self {
        MapVector(vec![MapValue::NIL; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[MapValue] {
        &self.0
    }

    /// Values as `Option<VertexId>`, handy for comparisons in tests.
    pub fn to_options(&self) -> Vec<Option<VertexId>> {
        self.0.iter().map(|v| v.get()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("vector length {got} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapConfig {
    /// Row partitions per propagation step.
    pub workers: usize,
    /// Stop a fixpoint as soon as an accepting vertex reaches itself.
    pub early_exit: bool,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            workers: 1,
            early_exit: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MapStats {
    pub iterations: u64,
    pub kernel_calls: u64,
    pub demoted_total: u64,
    pub cycle_witness: Option<VertexId>,
}

/// All-NIL start vector. Accepting vertices are not self-seeded: their id
/// only enters the vector once it has travelled along an edge.
pub fn init_vector(snap: &CsrSnapshot) -> MapVector {
    MapVector::nil(snap.n())
}

/// Outcome of one propagation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub changed: bool,
    /// Smallest accepting `v` with `x'[v] = v`.
    pub self_witness: Option<VertexId>,
}

impl StepOutcome {
    fn merge(self, other: StepOutcome) -> StepOutcome {
        let self_witness = match (self.self_witness, other.self_witness) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        StepOutcome {
            changed: self.changed || other.changed,
            self_witness,
        }
    }

    const IDLE: StepOutcome = StepOutcome {
        changed: false,
        self_witness: None,
    };
}

/// The propagation operator for one snapshot.
///
/// Holds the in-neighbour rows of the snapshot's graph (its transpose), so a
/// step pulls values and every row is written by exactly one worker.
pub struct PropagationKernel {
    in_rows: CsrSnapshot,
    pool: WorkerPool,
}

impl PropagationKernel {
    /// Edge `u -> v` of `snap`'s graph means the value of `u` flows to `v`.
    pub fn new(snap: &CsrSnapshot, workers: usize) -> Self {
        Self::with_pool(snap, WorkerPool::new(workers))
    }

    pub fn with_pool(snap: &CsrSnapshot, pool: WorkerPool) -> Self {
        PropagationKernel {
            in_rows: snap.transpose(),
            pool,
        }
    }

    pub fn n(&self) -> usize {
        self.in_rows.n()
    }

    pub fn workers(&self) -> usize {
        self.pool.workers()
    }

    /// Computes `out = step(x)`.
    pub fn step(
        &self,
        x: &[MapValue],
        accepting: &AcceptingSet,
        out: &mut [MapValue],
    ) -> Result<StepOutcome, MapError> {
        let n = self.n();
        for len in [x.len(), out.len(), accepting.universe()] {
            if len != n {
                return Err(MapError::LengthMismatch { expected: n, got: len });
            }
        }
        Ok(self.pool.for_each_chunk_mut(
            out,
            512,
            StepOutcome::IDLE,
            |first, rows| self.rows(first, x, accepting, rows),
            StepOutcome::merge,
        ))
    }

    #[inline]
    fn rows(
        &self,
        first: usize,
        x: &[MapValue],
        accepting: &AcceptingSet,
        out: &mut [MapValue],
    ) -> StepOutcome {
        let offsets = self.in_rows.row_offsets();
        let cols = self.in_rows.col_indices();
        let mut outcome = StepOutcome::IDLE;
        for (i, slot) in out.iter_mut().enumerate() {
            let v = first + i;
            let old = x[v];
            let mut best = old;
            for &u in &cols[offsets[v]..offsets[v + 1]] {
                let mut cand = x[u as usize];
                if accepting.contains(u) {
                    cand = cand.max(MapValue::vertex(u));
                }
                best = best.max(cand);
            }
            *slot = best;
            if best != old {
                outcome.changed = true;
            }
            if outcome.self_witness.is_none()
                && best == MapValue::vertex(v as VertexId)
                && accepting.contains(v as VertexId)
            {
                outcome.self_witness = Some(v as VertexId);
            }
        }
        outcome
    }
}

/// A single step on a fresh single-worker kernel.
pub fn propagate_step(
    snap: &CsrSnapshot,
    x: &MapVector,
    accepting: &AcceptingSet,
) -> Result<(MapVector, bool), MapError> {
    let kernel = PropagationKernel::new(snap, 1);
    let mut out = MapVector::nil(x.len());
    let outcome = kernel.step(&x.0, accepting, &mut out.0)?;
    Ok((out, outcome.changed))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixpoint {
    pub values: MapVector,
    /// Propagation steps executed, including the final confirming one.
    pub steps: u64,
    pub witness: Option<VertexId>,
}

/// Iterates propagation from the all-NIL vector until nothing changes, or,
/// with `early_exit`, until some accepting vertex becomes its own maximal
/// predecessor. Without early exit a self-witness is still reported from the
/// converged vector.
pub fn fixpoint(kernel: &PropagationKernel, accepting: &AcceptingSet, early_exit: bool) -> Fixpoint {
    fixpoint_traced(kernel, accepting, early_exit, |_| {})
}

/// [`fixpoint`] that hands every intermediate vector to `observe`.
pub fn fixpoint_traced(
    kernel: &PropagationKernel,
    accepting: &AcceptingSet,
    early_exit: bool,
    mut observe: impl FnMut(&[MapValue]),
) -> Fixpoint {
    let n = kernel.n();
    let mut x = MapVector::nil(n);
    let mut next = MapVector::nil(n);
    let mut steps = 0;
    loop {
        let outcome = kernel
            .step(&x.0, accepting, &mut next.0)
            .expect("fixpoint vectors are sized by the kernel");
        steps += 1;
        std::mem::swap(&mut x, &mut next);
        observe(&x.0);
        if (early_exit && outcome.self_witness.is_some()) || !outcome.changed {
            return Fixpoint {
                values: x,
                steps,
                witness: outcome.self_witness,
            };
        }
    }
}

/// Removes from `accepting` every vertex that occurs as a value in `x`.
/// Returns the demoted vertices in ascending order.
pub fn demote(x: &MapVector, accepting: &mut AcceptingSet) -> Vec<VertexId> {
    let mut seen = vec![false; accepting.universe()];
    for v in x.0.iter().filter_map(|v| v.get()) {
        seen[v as usize] = true;
    }
    let demoted: Vec<VertexId> = accepting.iter().filter(|&u| seen[u as usize]).collect();
    for &u in &demoted {
        accepting.remove(u);
    }
    demoted
}

/// Runs MAP on `snap` starting from its own accepting set.
pub fn run_map(snap: &CsrSnapshot, config: MapConfig) -> (Verdict, MapStats) {
    let kernel = PropagationKernel::new(snap, config.workers);
    run_map_with_kernel(&kernel, snap.accepting().clone(), config.early_exit)
}

/// The MAP loop over a prepared kernel.
pub fn run_map_with_kernel(
    kernel: &PropagationKernel,
    mut accepting: AcceptingSet,
    early_exit: bool,
) -> (Verdict, MapStats) {
    let mut stats = MapStats::default();
    while !accepting.is_empty() {
        stats.iterations += 1;
        let fp = fixpoint(kernel, &accepting, early_exit);
        stats.kernel_calls += fp.steps;
        if let Some(w) = fp.witness {
            stats.cycle_witness = Some(w);
            return (Verdict::CycleFound { witness: w }, stats);
        }
        let demoted = demote(&fp.values, &mut accepting);
        stats.demoted_total += demoted.len() as u64;
        if demoted.is_empty() {
            break;
        }
    }
    (Verdict::NoAcceptingCycle, stats)
}
