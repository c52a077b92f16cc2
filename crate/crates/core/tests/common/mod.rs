#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use mapcheck::bench::{parse_manifest, Manifest};
use mapcheck::graph::Edge;
use mapcheck::model::{parse_model, Model};
use mapcheck::{AcceptingSet, CsrSnapshot, Orientation, VertexId};
use rand::Rng;

pub const CORPUS: [&str; 8] = [
    "philosophers_ok",
    "philosophers_bug",
    "peterson_ok",
    "peterson_bug",
    "leader_ok",
    "bakery_bug",
    "anderson_ok",
    "elevator_bug",
];

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn corpus_path(name: &str) -> PathBuf {
    corpus_dir().join(format!("{name}.cdve"))
}

pub fn load(path: &Path) -> (Model, Manifest) {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let model = parse_model(&text).unwrap_or_else(|d| panic!("{}: {d}", path.display()));
    let manifest = parse_manifest(&path.display().to_string(), &text).unwrap();
    (model, manifest)
}

pub fn load_corpus(name: &str) -> (Model, Manifest) {
    load(&corpus_path(name))
}

/// A random digraph as (n, edges, accepting). Self-loops and duplicate
/// edges are allowed.
#[derive(Debug, Clone)]
pub struct RandomGraph {
    pub n: usize,
    pub edges: Vec<Edge>,
    pub accepting: Vec<VertexId>,
}

impl RandomGraph {
    pub fn generate(rng: &mut impl Rng, n: usize, density: f64, accepting_fraction: f64) -> Self {
        let mut edges = Vec::new();
        for s in 0..n as u32 {
            for d in 0..n as u32 {
                if rng.random_bool(density) {
                    edges.push((s, d));
                }
            }
        }
        let accepting = (0..n as u32).filter(|_| rng.random_bool(accepting_fraction)).collect();
        RandomGraph { n, edges, accepting }
    }

    pub fn accepting_set(&self) -> AcceptingSet {
        AcceptingSet::from_members(self.n, self.accepting.iter().copied())
    }

    pub fn snapshot(&self, orientation: Orientation) -> CsrSnapshot {
        CsrSnapshot::from_edges(self.n, &self.edges, self.accepting_set(), orientation)
    }
}

/// `reach[u][v]`: a path of length at least one leads from `u` to `v` along
/// the rows of `snap`. Floyd-Warshall style closure.
pub fn proper_reachability(snap: &CsrSnapshot) -> Vec<Vec<bool>> {
    let n = snap.n();
    let mut reach = vec![vec![false; n]; n];
    for u in 0..n {
        for &v in snap.row(u) {
            reach[u][v as usize] = true;
        }
    }
    for k in 0..n {
        for u in 0..n {
            if reach[u][k] {
                for v in 0..n {
                    if reach[k][v] {
                        reach[u][v] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Largest member of `accepting` that properly reaches `v`, for every `v`.
pub fn brute_force_map(snap: &CsrSnapshot, accepting: &AcceptingSet) -> Vec<Option<VertexId>> {
    let reach = proper_reachability(snap);
    (0..snap.n())
        .map(|v| accepting.iter().filter(|&u| reach[u as usize][v]).max())
        .collect()
}
