//! One-Way-Catch-Them-Young accepting-cycle detection.
//!
//! Starting from the full vertex set, alternately keep only vertices properly
//! reachable from an accepting vertex of the set (reachability) and peel off
//! vertices without a predecessor inside the set (elimination). The fixpoint
//! is non-empty iff an accepting cycle exists. Runs on forward snapshots.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use crate::graph::{AcceptingSet, CsrSnapshot, Orientation, VertexId};
use crate::verdict::Verdict;

/// Approximation set of the OWCTY loop.
#[derive(Clone, PartialEq, Eq)]
pub struct OwctySet {
    members: FixedBitSet,
}

impl OwctySet {
    pub fn full(n: usize) -> Self {
        let mut members = FixedBitSet::with_capacity(n);
        members.insert_range(..);
        OwctySet { members }
    }

    pub fn empty(n: usize) -> Self {
        OwctySet {
            members: FixedBitSet::with_capacity(n),
        }
    }

    pub fn from_members<I: IntoIterator<Item = VertexId>>(n: usize, members: I) -> Self {
        let mut set = Self::empty(n);
        for v in members {
            set.members.insert(v as usize);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(v as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.ones().map(|v| v as VertexId)
    }
}

impl std::fmt::Debug for OwctySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OwctyStats {
    pub outer_iterations: u64,
    pub reach_time: Duration,
    pub elim_time: Duration,
    pub final_size: usize,
}

fn assert_forward(snap: &CsrSnapshot) {
    assert_eq!(
        snap.orientation(),
        Orientation::Forward,
        "OWCTY expects a forward snapshot"
    );
}

/// Vertices of `set` with a path of length >= 1 inside `set` from some
/// accepting vertex of `set`.
pub fn reach(snap: &CsrSnapshot, set: &OwctySet, accepting: &AcceptingSet) -> OwctySet {
    assert_forward(snap);
    let mut out = OwctySet::empty(snap.n());
    let mut queue: VecDeque<usize> = VecDeque::new();
    for u in accepting.iter().filter(|&u| set.contains(u)) {
        for &w in snap.row(u as usize) {
            let w = w as usize;
            if set.members.contains(w) && !out.members.put(w) {
                queue.push_back(w);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in snap.row(v) {
            let w = w as usize;
            if set.members.contains(w) && !out.members.put(w) {
                queue.push_back(w);
            }
        }
    }
    out
}

/// Repeatedly drops vertices of `set` without a predecessor in `set`.
pub fn elim(snap: &CsrSnapshot, set: &OwctySet) -> OwctySet {
    assert_forward(snap);
    let n = snap.n();
    let mut indegree = vec![0u32; n];
    for v in set.members.ones() {
        for &w in snap.row(v) {
            if set.members.contains(w as usize) {
                indegree[w as usize] += 1;
            }
        }
    }
    let mut out = set.clone();
    let mut queue: Vec<usize> = set.members.ones().filter(|&v| indegree[v] == 0).collect();
    while let Some(v) = queue.pop() {
        out.members.set(v, false);
        for &w in snap.row(v) {
            let w = w as usize;
            if out.members.contains(w) {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
    }
    out
}

pub fn run_owcty(snap: &CsrSnapshot) -> (Verdict, OwctyStats) {
    assert_forward(snap);
    let accepting = snap.accepting();
    let mut stats = OwctyStats::default();
    let mut set = OwctySet::full(snap.n());
    loop {
        stats.outer_iterations += 1;
        let t = Instant::now();
        let reached = reach(snap, &set, accepting);
        stats.reach_time += t.elapsed();
        let t = Instant::now();
        let next = elim(snap, &reached);
        stats.elim_time += t.elapsed();
        if next == set {
            break;
        }
        set = next;
    }
    stats.final_size = set.len();
    let verdict = accepting
        .iter()
        .find(|&v| set.contains(v))
        .map_or(Verdict::NoAcceptingCycle, |witness| Verdict::CycleFound { witness });
    (verdict, stats)
}
