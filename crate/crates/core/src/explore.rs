//! On-the-fly exploration: state generation feeds the edge log while a
//! detector thread repeatedly checks the part of the graph built so far.
//!
//! Generation is a level-synchronous breadth-first search. Each level is cut
//! into fixed-size batches; the states of a batch are expanded by the worker
//! pool and their successors are interned by the coordinator in frontier
//! order, so vertex ids do not depend on the worker count.
//!
//! Detection rounds are requested at batch boundaries once enough new edges
//! have been logged. A round works on the log prefix captured at request
//! time and runs concurrently with further generation; at most one round is
//! in flight, and its result is collected at the next trigger point. Because
//! both the prefixes and the collection points are fixed by the edge counts,
//! two runs with the same configuration produce identical statistics.

use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{
    restrict_to_accepting_sccs, EdgeLog, GraphError, LogPrefix, Orientation, ProductGraph,
    VertexId,
};
use crate::map::{run_map_with_kernel, PropagationKernel};
use crate::model::{property_relevance, Model, RuntimeError, State};
use crate::oracle::ndfs_verdict;
use crate::owcty::run_owcty;
use crate::pool::WorkerPool;
use crate::verdict::Verdict;

/// Frontier states expanded per batch.
const BATCH_STATES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Map,
    Owcty,
    Ndfs,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Map => "map",
            Algorithm::Owcty => "owcty",
            Algorithm::Ndfs => "ndfs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreConfig {
    pub algorithm: Algorithm,
    /// New edges between detection rounds; `None` runs only the final round.
    pub detection_interval_edges: Option<usize>,
    pub generation_workers: usize,
    pub kernel_workers: usize,
    pub enable_relevance_pruning: bool,
    pub enable_final_scc_restriction: bool,
    pub max_states: usize,
    pub report_every_states: usize,
    /// Stop generating as soon as a round finds a cycle. Also enables the
    /// mid-fixpoint exit of MAP.
    pub early_exit: bool,
    /// Orientation MAP propagates along.
    pub map_orientation: Orientation,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            algorithm: Algorithm::Map,
            detection_interval_edges: Some(50_000),
            generation_workers: 1,
            kernel_workers: 1,
            enable_relevance_pruning: true,
            enable_final_scc_restriction: true,
            max_states: 10_000_000,
            report_every_states: 100_000,
            early_exit: true,
            map_orientation: Orientation::Transposed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    pub states_generated: u64,
    pub transitions_generated: u64,
    pub detection_rounds: u64,
    pub map_iterations: u64,
    pub kernel_calls: u64,
    pub owcty_iterations: u64,
    pub csr_time: Duration,
    pub kernel_time: Duration,
    pub total_time: Duration,
    /// Vertices in the snapshot whose round found the cycle, when the verdict
    /// came from a round before the final one.
    pub states_at_detection: Option<u64>,
}

/// Counters shown in periodic progress lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct ProgressRecord {
    pub states: u64,
    pub transitions: u64,
    pub rounds: u64,
    pub iterations: u64,
    pub kernel_calls: u64,
}

impl std::fmt::Display for ProgressRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[progress] states={} trans={} rounds={} iters={} kernel-calls={}",
            self.states, self.transitions, self.rounds, self.iterations, self.kernel_calls
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed progress line: {0:?}")]
pub struct ProgressParseError(pub String);

impl std::str::FromStr for ProgressRecord {
    type Err = ProgressParseError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || ProgressParseError(line.to_string());
        let mut words = line.split_whitespace();
        if words.next() != Some("[progress]") {
            return Err(bad());
        }
        let mut fields = [0u64; 5];
        for (slot, key) in fields
            .iter_mut()
            .zip(["states", "trans", "rounds", "iters", "kernel-calls"])
        {
            let (k, v) = words.next().and_then(|w| w.split_once('=')).ok_or_else(bad)?;
            if k != key {
                return Err(bad());
            }
            *slot = v.parse().map_err(|_| bad())?;
        }
        if words.next().is_some() {
            return Err(bad());
        }
        let [states, transitions, rounds, iterations, kernel_calls] = fields;
        Ok(ProgressRecord {
            states,
            transitions,
            rounds,
            iterations,
            kernel_calls,
        })
    }
}

pub fn progress_snapshot(stats: &RunStats) -> ProgressRecord {
    ProgressRecord {
        states: stats.states_generated,
        transitions: stats.transitions_generated,
        rounds: stats.detection_rounds,
        iterations: stats.map_iterations + stats.owcty_iterations,
        kernel_calls: stats.kernel_calls,
    }
}

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("resource limit: {source}")]
    ResourceLimit {
        #[source]
        source: GraphError,
        stats: RunStats,
    },
    #[error("{source}")]
    ModelRuntime {
        #[source]
        source: RuntimeError,
        stats: RunStats,
    },
}

impl ExploreError {
    /// Statistics up to the point the run stopped.
    pub fn stats(&self) -> &RunStats {
        match self {
            ExploreError::ResourceLimit { stats, .. } | ExploreError::ModelRuntime { stats, .. } => stats,
        }
    }
}

/// Everything a finished run produced.
pub struct Exploration {
    pub verdict: Verdict,
    pub stats: RunStats,
    /// The product graph as far as it was generated.
    pub graph: ProductGraph,
}

#[derive(Debug, Clone, Copy)]
struct RoundResult {
    verdict: Verdict,
    vertices: usize,
    csr_time: Duration,
    kernel_time: Duration,
    map_iterations: u64,
    kernel_calls: u64,
    owcty_iterations: u64,
}

/// Runs one detection algorithm on log prefixes.
#[derive(Clone)]
struct Detector {
    algorithm: Algorithm,
    orientation: Orientation,
    map_early_exit: bool,
    pool: WorkerPool,
}

impl Detector {
    fn run(&self, log: &EdgeLog, prefix: LogPrefix, restrict: bool) -> RoundResult {
        let csr_start = Instant::now();
        let mut result = RoundResult {
            verdict: Verdict::NoAcceptingCycle,
            vertices: prefix.vertices,
            csr_time: Duration::ZERO,
            kernel_time: Duration::ZERO,
            map_iterations: 0,
            kernel_calls: 0,
            owcty_iterations: 0,
        };

        if self.algorithm == Algorithm::Ndfs {
            let (edges, accepting) = log.copy_prefix(prefix);
            result.csr_time = csr_start.elapsed();
            let t = Instant::now();
            if prefix.vertices > 0 {
                result.verdict = ndfs_verdict(&edges, prefix.vertices, &accepting, 0, usize::MAX)
                    .expect("no oracle limit on explorer graphs");
            }
            result.kernel_time = t.elapsed();
            return result;
        }

        let orientation = match self.algorithm {
            Algorithm::Map => self.orientation,
            _ => Orientation::Forward,
        };
        let snap = log.snapshot_prefix(prefix, orientation);
        let (snap, kept) = if restrict {
            let r = restrict_to_accepting_sccs(&snap);
            (r.snapshot, Some(r.kept))
        } else {
            (snap, None)
        };
        let kernel = (self.algorithm == Algorithm::Map)
            .then(|| PropagationKernel::with_pool(&snap, self.pool.clone()));
        result.csr_time = csr_start.elapsed();

        let t = Instant::now();
        let verdict = match kernel {
            Some(kernel) => {
                let (v, stats) = run_map_with_kernel(&kernel, snap.accepting().clone(), self.map_early_exit);
                result.map_iterations = stats.iterations;
                result.kernel_calls = stats.kernel_calls;
                v
            }
            None => {
                let (v, stats) = run_owcty(&snap);
                result.owcty_iterations = stats.outer_iterations;
                v
            }
        };
        result.kernel_time = t.elapsed();
        result.verdict = match kept {
            Some(kept) => verdict.map_witness(|w| kept[w as usize]),
            None => verdict,
        };
        result
    }
}

/// Detector thread handle. Requests go in, results come back in order.
struct DetectorThread {
    requests: Option<mpsc::Sender<LogPrefix>>,
    results: mpsc::Receiver<RoundResult>,
    handle: Option<thread::JoinHandle<()>>,
}

impl DetectorThread {
    fn spawn(detector: Detector, log: Arc<EdgeLog>) -> Self {
        let (req_tx, req_rx) = mpsc::channel::<LogPrefix>();
        let (res_tx, res_rx) = mpsc::channel();
        let handle = thread::Builder::new()
            .name("detector".into())
            .spawn(move || {
                for prefix in req_rx {
                    let result = detector.run(&log, prefix, false);
                    if res_tx.send(result).is_err() {
                        break;
                    }
                }
            })
            .expect("failed to spawn detector thread");
        DetectorThread {
            requests: Some(req_tx),
            results: res_rx,
            handle: Some(handle),
        }
    }

    fn submit(&self, prefix: LogPrefix) {
        self.requests
            .as_ref()
            .expect("detector running")
            .send(prefix)
            .expect("detector thread alive");
    }

    fn collect(&self) -> RoundResult {
        self.results.recv().expect("detector thread alive")
    }
}

impl Drop for DetectorThread {
    fn drop(&mut self) {
        self.requests.take();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn absorb(stats: &mut RunStats, r: &RoundResult) {
    stats.detection_rounds += 1;
    stats.map_iterations += r.map_iterations;
    stats.kernel_calls += r.kernel_calls;
    stats.owcty_iterations += r.owcty_iterations;
    stats.csr_time += r.csr_time;
    stats.kernel_time += r.kernel_time;
}

/// Successor of a frontier state, as produced by a worker.
struct Expanded {
    state: State,
    accepting: bool,
}

pub fn explore(model: &Model, config: &ExploreConfig) -> Result<(Verdict, RunStats), ExploreError> {
    let run = explore_with_progress(model, config, |_| {})?;
    Ok((run.verdict, run.stats))
}

pub fn explore_with_progress(
    model: &Model,
    config: &ExploreConfig,
    mut on_progress: impl FnMut(&ProgressRecord),
) -> Result<Exploration, ExploreError> {
    let start = Instant::now();
    let relevance = config
        .enable_relevance_pruning
        .then(|| property_relevance(model))
        .flatten();
    let is_relevant = |s: &State| match (&relevance, model.property_location(s)) {
        (Some(r), Some(q)) => r[q],
        _ => true,
    };

    let gen_pool = WorkerPool::new(config.generation_workers);
    let detector = Detector {
        algorithm: config.algorithm,
        orientation: config.map_orientation,
        map_early_exit: config.early_exit,
        pool: WorkerPool::new(config.kernel_workers),
    };
    let mut graph = ProductGraph::new(config.max_states);
    let log = Arc::clone(graph.log());
    let mut stats = RunStats::default();

    let limit = |source: GraphError, stats: &RunStats| ExploreError::ResourceLimit {
        source,
        stats: RunStats {
            total_time: start.elapsed(),
            ..*stats
        },
    };

    let init = model.initial_state();
    let (init_id, _) = graph
        .intern_state(init.as_bytes(), model.is_accepting(&init))
        .map_err(|e| limit(e, &stats))?;
    stats.states_generated = 1;
    let mut frontier: Vec<(VertexId, State)> = Vec::new();
    if is_relevant(&init) {
        frontier.push((init_id, init));
    }

    let intermediate = config.detection_interval_edges.filter(|_| config.early_exit);
    let detector_thread = intermediate.map(|_| DetectorThread::spawn(detector.clone(), Arc::clone(&log)));
    let mut in_flight = false;
    let mut last_trigger_edges = 0usize;
    let mut early: Option<RoundResult> = None;
    let report_every = config.report_every_states.max(1) as u64;
    let mut next_report = report_every;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();

    'levels: while !frontier.is_empty() {
        let mut next: Vec<(VertexId, State)> = Vec::new();
        for batch in frontier.chunks(BATCH_STATES) {
            let expanded: Vec<Result<Vec<Expanded>, RuntimeError>> = gen_pool.map_ordered(batch, |(_, s)| {
                Ok(model
                    .successors(s)?
                    .into_iter()
                    .filter(|t| is_relevant(t))
                    .map(|t| Expanded {
                        accepting: model.is_accepting(&t),
                        state: t,
                    })
                    .collect())
            });

            edges.clear();
            for ((parent, _), succs) in batch.iter().zip(expanded) {
                let succs = succs.map_err(|source| ExploreError::ModelRuntime {
                    source,
                    stats: RunStats {
                        total_time: start.elapsed(),
                        ..stats
                    },
                })?;
                for succ in succs {
                    let (id, new) = graph
                        .intern_state(succ.state.as_bytes(), succ.accepting)
                        .map_err(|e| limit(e, &stats))?;
                    if new {
                        stats.states_generated += 1;
                        next.push((id, succ.state));
                    }
                    edges.push((*parent, id));
                }
            }
            log.append_edges(&edges).expect("endpoints were interned");
            stats.transitions_generated += edges.len() as u64;

            if stats.states_generated >= next_report {
                on_progress(&progress_snapshot(&stats));
                next_report = (stats.states_generated / report_every + 1) * report_every;
            }

            if let (Some(interval), Some(thread)) = (intermediate, &detector_thread) {
                let logged = log.edge_count();
                if logged - last_trigger_edges >= interval {
                    if in_flight {
                        let r = thread.collect();
                        absorb(&mut stats, &r);
                        in_flight = false;
                        if r.verdict.is_cycle() {
                            early = Some(r);
                            break 'levels;
                        }
                    }
                    thread.submit(log.prefix());
                    in_flight = true;
                    last_trigger_edges = logged;
                }
            }
        }
        frontier = next;
    }

    if in_flight && early.is_none() {
        let thread = detector_thread.as_ref().expect("in-flight round has a thread");
        let r = thread.collect();
        absorb(&mut stats, &r);
        if r.verdict.is_cycle() {
            early = Some(r);
        }
    }
    drop(detector_thread);

    let verdict = match early {
        Some(r) => {
            stats.states_at_detection = Some(r.vertices as u64);
            r.verdict
        }
        None => {
            let r = detector.run(&log, log.prefix(), config.enable_final_scc_restriction);
            absorb(&mut stats, &r);
            r.verdict
        }
    };
    stats.total_time = start.elapsed();
    on_progress(&progress_snapshot(&stats));
    Ok(Exploration { verdict, stats, graph })
}
