use super::{AcceptingSet, Edge, VertexId};

/// Which way a snapshot's rows point relative to the logged edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Row `v` lists the targets of logged edges `v -> w`.
    Forward,
    /// Row `v` lists the sources of logged edges `u -> v`.
    Transposed,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Transposed,
            Orientation::Transposed => Orientation::Forward,
        }
    }
}

/// Immutable compressed-sparse-row adjacency.
///
/// Regardless of orientation, row `v` holds the out-neighbours of `v` in the
/// graph the snapshot describes: the logged graph when forward, its reverse
/// when transposed. Rows are sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrSnapshot {
    orientation: Orientation,
    row_offsets: Vec<usize>,
    col_indices: Vec<VertexId>,
    accepting: AcceptingSet,
}

impl CsrSnapshot {
    /// Builds a snapshot from logged (forward) edges by counting sort.
    ///
    /// Panics if an endpoint is `>= n` or the accepting universe is not `n`.
    pub fn from_edges(
        n: usize,
        edges: &[Edge],
        accepting: AcceptingSet,
        orientation: Orientation,
    ) -> Self {
        assert_eq!(accepting.universe(), n, "accepting set universe mismatch");
        let oriented = edges.iter().map(|&(s, d)| match orientation {
            Orientation::Forward => (s, d),
            Orientation::Transposed => (d, s),
        });
        let (row_offsets, col_indices) = build_rows(n, oriented);
        CsrSnapshot {
            orientation,
            row_offsets,
            col_indices,
            accepting,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.row_offsets.len() - 1
    }

    /// Edge count after deduplication.
    pub fn m(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[VertexId] {
        &self.col_indices
    }

    pub fn accepting(&self) -> &AcceptingSet {
        &self.accepting
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[VertexId] {
        &self.col_indices[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    /// Edges as stored: `(row, column)` pairs in row-major order.
    pub fn row_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n()).flat_map(move |v| self.row(v).iter().map(move |&w| (v as VertexId, w)))
    }

    /// Edges in logged (forward) direction.
    pub fn logged_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let orientation = self.orientation;
        self.row_edges().map(move |(r, c)| match orientation {
            Orientation::Forward => (r, c),
            Orientation::Transposed => (c, r),
        })
    }

    /// The same graph in the opposite orientation.
    pub fn transpose(&self) -> CsrSnapshot {
        let n = self.n();
        let flipped: Vec<Edge> = self.row_edges().map(|(r, c)| (c, r)).collect();
        let (row_offsets, col_indices) = build_rows(n, flipped.iter().copied());
        CsrSnapshot {
            orientation: self.orientation.flipped(),
            row_offsets,
            col_indices,
            accepting: self.accepting.clone(),
        }
    }

    /// Same structure with a different accepting set.
    pub fn with_accepting(&self, accepting: AcceptingSet) -> CsrSnapshot {
        assert_eq!(accepting.universe(), self.n());
        CsrSnapshot {
            accepting,
            ..self.clone()
        }
    }

    pub fn has_self_loop(&self, v: usize) -> bool {
        self.row(v).binary_search(&(v as VertexId)).is_ok()
    }
}

/// Counting sort of `(row, col)` pairs into CSR arrays, then per-row sort and
/// dedup with in-place compaction.
fn build_rows(
    n: usize,
    pairs: impl Iterator<Item = Edge> + Clone,
) -> (Vec<usize>, Vec<VertexId>) {
    let mut offsets = vec![0usize; n + 1];
    for (r, c) in pairs.clone() {
        assert!((r as usize) < n && (c as usize) < n, "edge ({r}, {c}) outside [0, {n})");
        offsets[r as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut cols = vec![0 as VertexId; offsets[n]];
    for (r, c) in pairs {
        let slot = &mut cursor[r as usize];
        cols[*slot] = c;
        *slot += 1;
    }

    let mut write = 0;
    let mut start = 0;
    for v in 0..n {
        let end = offsets[v + 1];
        let row = &mut cols[start..end];
        row.sort_unstable();
        let row_start = write;
        let mut last = None;
        for i in start..end {
            let c = cols[i];
            if last != Some(c) {
                cols[write] = c;
                write += 1;
                last = Some(c);
            }
        }
        offsets[v] = row_start;
        start = end;
    }
    offsets[n] = write;
    cols.truncate(write);
    cols.shrink_to_fit();
    (offsets, cols)
}
