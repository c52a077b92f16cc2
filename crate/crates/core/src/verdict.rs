use std::fmt;

use crate::graph::VertexId;

/// Final answer of an accepting-cycle search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// An accepting cycle exists; `witness` is an accepting vertex on one.
    CycleFound { witness: VertexId },
    NoAcceptingCycle,
}

impl Verdict {
    pub fn is_cycle(&self) -> bool {
        matches!(self, Verdict::CycleFound { .. })
    }

    pub fn witness(&self) -> Option<VertexId> {
        match *self {
            Verdict::CycleFound { witness } => Some(witness),
            Verdict::NoAcceptingCycle => None,
        }
    }

    /// Same verdict with the witness passed through `f`.
    pub fn map_witness(self, f: impl FnOnce(VertexId) -> VertexId) -> Verdict {
        match self {
            Verdict::CycleFound { witness } => Verdict::CycleFound { witness: f(witness) },
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::CycleFound { witness } => write!(f, "verdict=cycle-found witness={witness}"),
            Verdict::NoAcceptingCycle => f.write_str("verdict=no-accepting-cycle"),
        }
    }
}
