use super::{AcceptingSet, CsrSnapshot, Edge, VertexId};

/// Component index per vertex, computed with an iterative Tarjan traversal.
/// Components are numbered in the order Tarjan completes them (reverse
/// topological order of the condensation).
pub fn strongly_connected_components(snap: &CsrSnapshot) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let n = snap.n();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, next edge offset)
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut comps = 0usize;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        calls.push((root as u32, snap.row_offsets()[root]));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(top) = calls.last_mut() {
            let v = top.0 as usize;
            let end = snap.row_offsets()[v + 1];
            if top.1 < end {
                let w = snap.col_indices()[top.1] as usize;
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    calls.push((w as u32, snap.row_offsets()[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow") as usize;
                    on_stack[w] = false;
                    comp[w] = comps as u32;
                    if w == v {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    (comp, comps)
}

/// A snapshot cut down to its accepting cyclic components.
#[derive(Debug, Clone)]
pub struct Restricted {
    pub snapshot: CsrSnapshot,
    /// `kept[new_id]` is the original id; ascending.
    pub kept: Vec<VertexId>,
}

impl Restricted {
    pub fn original_id(&self, v: VertexId) -> VertexId {
        self.kept[v as usize]
    }
}

/// Keeps the vertices of every SCC that is cyclic (two or more vertices, or
/// one vertex with a self-loop) and contains an accepting vertex; drops all
/// edges leaving that set. Kept vertices are renumbered densely in ascending
/// original order, so the MAP vertex order is preserved.
pub fn restrict_to_accepting_sccs(snap: &CsrSnapshot) -> Restricted {
    let n = snap.n();
    let (comp, count) = strongly_connected_components(snap);
    let mut size = vec![0usize; count];
    let mut cyclic = vec![false; count];
    let mut accepting = vec![false; count];
    for v in 0..n {
        let c = comp[v] as usize;
        size[c] += 1;
        if snap.has_self_loop(v) {
            cyclic[c] = true;
        }
        if snap.accepting().contains(v as VertexId) {
            accepting[c] = true;
        }
    }
    let keep_comp: Vec<bool> = (0..count)
        .map(|c| accepting[c] && (cyclic[c] || size[c] >= 2))
        .collect();

    const DROPPED: u32 = u32::MAX;
    let mut renumber = vec![DROPPED; n];
    let mut kept = Vec::new();
    for v in 0..n {
        if keep_comp[comp[v] as usize] {
            renumber[v] = kept.len() as u32;
            kept.push(v as VertexId);
        }
    }
    let logged: Vec<Edge> = snap
        .logged_edges()
        .filter_map(|(s, d)| {
            let (s, d) = (renumber[s as usize], renumber[d as usize]);
            (s != DROPPED && d != DROPPED).then_some((s, d))
        })
        .collect();
    let acc = AcceptingSet::from_members(
        kept.len(),
        snap.accepting()
            .iter()
            .filter_map(|v| Some(renumber[v as usize]).filter(|&r| r != DROPPED)),
    );
    Restricted {
        snapshot: CsrSnapshot::from_edges(kept.len(), &logged, acc, snap.orientation()),
        kept,
    }
}
