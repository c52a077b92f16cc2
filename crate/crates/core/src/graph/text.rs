//! Plain-text explicit graph format.
//!
//! ```text
//! graph 3
//! accepting 1
//! edge 0 1
//! edge 1 2   # comment
//! edge 2 1
//! ```
//!
//! Ids are 0-based decimals and must be below the declared vertex count.
//! Blank lines and `#` comments are ignored.

use thiserror::Error;

use super::{AcceptingSet, CsrSnapshot, Edge, Orientation, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct GraphParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitGraph {
    pub n: usize,
    pub accepting: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

impl ExplicitGraph {
    pub fn accepting_set(&self) -> AcceptingSet {
        AcceptingSet::from_members(self.n, self.accepting.iter().copied())
    }

    pub fn snapshot(&self, orientation: Orientation) -> CsrSnapshot {
        CsrSnapshot::from_edges(self.n, &self.edges, self.accepting_set(), orientation)
    }

    /// Renders back into the text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph {}\naccepting", self.n);
        for a in &self.accepting {
            out.push_str(&format!(" {a}"));
        }
        out.push('\n');
        for (s, d) in &self.edges {
            out.push_str(&format!("edge {s} {d}\n"));
        }
        out
    }
}

pub fn parse_graph(text: &str) -> Result<ExplicitGraph, GraphParseError> {
    let mut n: Option<usize> = None;
    let mut accepting: Option<Vec<VertexId>> = None;
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| GraphParseError { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let id = |tok: &str, n: usize| -> Result<VertexId, GraphParseError> {
            let v: u64 = tok
                .parse()
                .map_err(|_| err(format!("invalid vertex id `{tok}`")))?;
            if v >= n as u64 {
                return Err(err(format!("vertex id {v} out of range (n = {n})")));
            }
            Ok(v as VertexId)
        };

        match (keyword, n, &accepting) {
            ("graph", None, _) => {
                let tok = tokens.next().ok_or_else(|| err("missing vertex count".into()))?;
                let count: usize = tok
                    .parse()
                    .map_err(|_| err(format!("invalid vertex count `{tok}`")))?;
                if count > VertexId::MAX as usize {
                    return Err(err(format!("vertex count {count} too large")));
                }
                n = Some(count);
            }
            ("graph", Some(_), _) => return Err(err("duplicate `graph` header".into())),
            (_, None, _) => return Err(err("expected `graph <n>` header".into())),
            ("accepting", Some(count), None) => {
                let ids = tokens.by_ref().map(|t| id(t, count)).collect::<Result<_, _>>()?;
                accepting = Some(ids);
                continue;
            }
            ("accepting", Some(_), Some(_)) => {
                return Err(err("duplicate `accepting` line".into()))
            }
            (_, Some(_), None) => return Err(err("expected `accepting` line".into())),
            ("edge", Some(count), Some(_)) => {
                let mut endpoint = || {
                    tokens
                        .next()
                        .ok_or_else(|| err("edge needs two endpoints".into()))
                        .and_then(|t| id(t, count))
                };
                let s = endpoint()?;
                let d = endpoint()?;
                edges.push((s, d));
            }
            (other, _, _) => return Err(err(format!("unknown directive `{other}`"))),
        }
        if let Some(extra) = tokens.next() {
            return Err(err(format!("unexpected token `{extra}`")));
        }
    }

    let n = n.ok_or(GraphParseError {
        line: 0,
        message: "empty input: expected `graph <n>` header".into(),
    })?;
    Ok(ExplicitGraph {
        n,
        accepting: accepting.unwrap_or_default(),
        edges,
    })
}
