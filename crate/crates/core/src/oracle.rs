//! Brute-force accepting-cycle deciders used as ground truth.
//!
//! Both work on plain edge lists and share nothing with the CSR engines.

use std::collections::BTreeSet;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::graph::{AcceptingSet, Edge, VertexId};
use crate::verdict::Verdict;

pub const DEFAULT_ORACLE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph with {n} vertices exceeds oracle limit {limit}")]
    LimitExceeded { n: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub verdict: Verdict,
    /// Every accepting vertex that lies on some cycle.
    pub cyclic_accepting_vertices: BTreeSet<VertexId>,
}

fn check_limit(n: usize, limit: usize) -> Result<(), OracleError> {
    if n > limit {
        Err(OracleError::LimitExceeded { n, limit })
    } else {
        Ok(())
    }
}

/// An accepting cycle exists iff an accepting vertex sits in a cyclic SCC.
/// The witness is the smallest such vertex.
pub fn scc_verdict(
    edges: &[Edge],
    n: usize,
    accepting: &AcceptingSet,
    limit: usize,
) -> Result<OracleVerdict, OracleError> {
    check_limit(n, limit)?;
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    for &(s, d) in edges {
        g.add_edge(NodeIndex::new(s as usize), NodeIndex::new(d as usize), ());
    }
    let mut cyclic_accepting_vertices = BTreeSet::new();
    for comp in kosaraju_scc(&g) {
        let cyclic = comp.len() > 1 || g.contains_edge(comp[0], comp[0]);
        if cyclic {
            cyclic_accepting_vertices.extend(
                comp.iter()
                    .map(|ix| ix.index() as VertexId)
                    .filter(|&v| accepting.contains(v)),
            );
        }
    }
    let verdict = cyclic_accepting_vertices
        .first()
        .map_or(Verdict::NoAcceptingCycle, |&witness| Verdict::CycleFound { witness });
    Ok(OracleVerdict {
        verdict,
        cyclic_accepting_vertices,
    })
}

/// Classic nested depth-first search from `init`: the outer search visits
/// states in post-order, and from every accepting state it finishes, an inner
/// search looks for a path back to that state. Successors are tried in edge
/// list order. The witness is the accepting seed of the first cycle found.
pub fn ndfs_verdict(
    edges: &[Edge],
    n: usize,
    accepting: &AcceptingSet,
    init: VertexId,
    limit: usize,
) -> Result<Verdict, OracleError> {
    check_limit(n, limit)?;
    if n == 0 {
        return Ok(Verdict::NoAcceptingCycle);
    }
    let mut succ: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for &(s, d) in edges {
        succ[s as usize].push(d);
    }

    let mut blue = vec![false; n];
    let mut red = vec![false; n];
    let mut stack: Vec<(VertexId, usize)> = vec![(init, 0)];
    blue[init as usize] = true;

    while let Some(top) = stack.last_mut() {
        let (v, i) = *top;
        if let Some(&w) = succ[v as usize].get(i) {
            top.1 += 1;
            if !blue[w as usize] {
                blue[w as usize] = true;
                stack.push((w, 0));
            }
            continue;
        }
        stack.pop();
        if accepting.contains(v) && inner_search(&succ, v, &mut red) {
            return Ok(Verdict::CycleFound { witness: v });
        }
    }
    Ok(Verdict::NoAcceptingCycle)
}

/// Red search from `seed`; true if it reaches `seed` again.
fn inner_search(succ: &[Vec<VertexId>], seed: VertexId, red: &mut [bool]) -> bool {
    let mut stack = vec![seed];
    while let Some(v) = stack.pop() {
        for &w in &succ[v as usize] {
            if w == seed {
                return true;
            }
            if !red[w as usize] {
                red[w as usize] = true;
                stack.push(w);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc(n: usize, members: &[VertexId]) -> AcceptingSet {
        AcceptingSet::from_members(n, members.iter().copied())
    }

    #[test]
    fn scc_self_loop() {
        let v = scc_verdict(&[(0, 0)], 1, &acc(1, &[0]), DEFAULT_ORACLE_LIMIT).unwrap();
        assert_eq!(v.verdict, Verdict::CycleFound { witness: 0 });
        assert_eq!(v.cyclic_accepting_vertices, BTreeSet::from([0]));
    }

    #[test]
    fn scc_dag() {
        let v = scc_verdict(&[(0, 1), (1, 2), (0, 2)], 3, &acc(3, &[0, 1, 2]), DEFAULT_ORACLE_LIMIT).unwrap();
        assert_eq!(v.verdict, Verdict::NoAcceptingCycle);
        assert!(v.cyclic_accepting_vertices.is_empty());
    }

    #[test]
    fn scc_g1() {
        let v = scc_verdict(&[(0, 1), (1, 2), (2, 1)], 3, &acc(3, &[1]), DEFAULT_ORACLE_LIMIT).unwrap();
        assert_eq!(v.verdict, Verdict::CycleFound { witness: 1 });
        assert_eq!(v.cyclic_accepting_vertices, BTreeSet::from([1]));
    }

    #[test]
    fn limits_are_enforced() {
        let a = acc(10, &[]);
        assert_eq!(
            scc_verdict(&[], 10, &a, 5),
            Err(OracleError::LimitExceeded { n: 10, limit: 5 })
        );
        assert!(ndfs_verdict(&[], 10, &a, 0, 5).is_err());
    }

    #[test]
    fn ndfs_self_loop() {
        assert_eq!(
            ndfs_verdict(&[(0, 0)], 1, &acc(1, &[0]), 0, DEFAULT_ORACLE_LIMIT).unwrap(),
            Verdict::CycleFound { witness: 0 }
        );
    }

    #[test]
    fn ndfs_ignores_unreachable_cycles() {
        // component {0,1} is a DAG; the accepting cycle 2 <-> 3 is unreachable from 0
        let edges = [(0, 1), (2, 3), (3, 2)];
        let a = acc(4, &[3]);
        assert_eq!(
            ndfs_verdict(&edges, 4, &a, 0, DEFAULT_ORACLE_LIMIT).unwrap(),
            Verdict::NoAcceptingCycle
        );
        assert!(scc_verdict(&edges, 4, &a, DEFAULT_ORACLE_LIMIT).unwrap().verdict.is_cycle());
        assert!(ndfs_verdict(&edges, 4, &a, 2, DEFAULT_ORACLE_LIMIT).unwrap().is_cycle());
    }

    #[test]
    fn ndfs_cycle_through_non_accepting_path() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 1)];
        assert_eq!(
            ndfs_verdict(&edges, 4, &acc(4, &[2]), 0, DEFAULT_ORACLE_LIMIT).unwrap(),
            Verdict::CycleFound { witness: 2 }
        );
    }
}
