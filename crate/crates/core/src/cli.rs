//! The `mapcheck` command line.
//!
//! Exit codes: 0 no accepting cycle, 1 cycle found, 2 usage or parse error,
//! 3 resource limit, 4 model runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{self, millis, BenchConfig};
use crate::explore::{explore_with_progress, Algorithm, ExploreConfig, ExploreError, RunStats};
use crate::graph::text::parse_graph;
use crate::graph::Orientation;
use crate::map::{run_map, MapConfig};
use crate::model::parse_model_with_consts;
use crate::oracle::scc_verdict;
use crate::owcty::run_owcty;
use crate::verdict::Verdict;

pub const EXIT_NO_CYCLE: i32 = 0;
pub const EXIT_CYCLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "mapcheck", version, about = "Explicit-state accepting-cycle detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model for accepting cycles of its property.
    Check {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ModelAlgorithm::Map)]
        algorithm: ModelAlgorithm,
        #[command(flatten)]
        run: RunArgs,
        /// Progress line every S generated states.
        #[arg(long, value_name = "S", default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        report_every: u64,
        /// Substitute an integer for an identifier before parsing.
        #[arg(long = "const", value_name = "NAME=VAL", value_parser = parse_const)]
        consts: Vec<(String, i64)>,
    },
    /// Check an explicit graph file.
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphAlgorithm::Map)]
        algorithm: GraphAlgorithm,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
    },
    /// Run every algorithm on every model of a directory.
    Bench {
        dir: PathBuf,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Comma-separated subset of map,owcty,ndfs.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelAlgorithm::Map, ModelAlgorithm::Owcty, ModelAlgorithm::Ndfs])]
        algorithms: Vec<ModelAlgorithm>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Generation and kernel workers.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Edges between detection rounds; `final` or 0 runs only the final round.
    #[arg(long, value_name = "E", default_value = "50000", value_parser = parse_interval)]
    detect_every: Interval,
    #[arg(long)]
    no_pruning: bool,
    #[arg(long)]
    no_scc_restriction: bool,
    /// Explore the whole state space before detecting.
    #[arg(long)]
    no_early_exit: bool,
    #[arg(long, value_name = "N", default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
}

#[derive(Debug, Clone, Copy)]
struct Interval(Option<usize>);

fn parse_interval(s: &str) -> Result<Interval, String> {
    if s == "final" {
        return Ok(Interval(None));
    }
    let n: usize = s.parse().map_err(|_| format!("expected an edge count or `final`, got {s:?}"))?;
    Ok(Interval((n > 0).then_some(n)))
}

fn parse_const(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VAL, got {s:?}"))?;
    let value = value.trim().parse().map_err(|_| format!("bad value in {s:?}"))?;
    Ok((name.trim().to_string(), value))
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModelAlgorithm {
    Map,
    Owcty,
    Ndfs,
}

impl From<ModelAlgorithm> for Algorithm {
    fn from(a: ModelAlgorithm) -> Self {
        match a {
            ModelAlgorithm::Map => Algorithm::Map,
            ModelAlgorithm::Owcty => Algorithm::Owcty,
            ModelAlgorithm::Ndfs => Algorithm::Ndfs,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum GraphAlgorithm {
    Map,
    Owcty,
    Scc,
}

impl RunArgs {
    fn explore_config(&self, algorithm: Algorithm) -> ExploreConfig {
        ExploreConfig {
            algorithm,
            detection_interval_edges: self.detect_every.0,
            generation_workers: self.workers as usize,
            kernel_workers: self.workers as usize,
            enable_relevance_pruning: !self.no_pruning,
            enable_final_scc_restriction: !self.no_scc_restriction,
            max_states: self.max_states as usize,
            early_exit: !self.no_early_exit,
            ..ExploreConfig::default()
        }
    }
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    if v.is_cycle() {
        EXIT_CYCLE
    } else {
        EXIT_NO_CYCLE
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_NO_CYCLE };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check {
            model,
            algorithm,
            run,
            report_every,
            consts,
        } => check(&model, algorithm.into(), &run, report_every, &consts, out, err),
        Command::Graph { file, algorithm, workers } => graph(&file, algorithm, workers as usize, out, err),
        Command::Bench {
            dir,
            csv,
            algorithms,
            run,
        } => bench_cmd(&dir, csv.as_deref(), &algorithms, &run, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

type CliResult = Result<i32, Box<dyn std::error::Error>>;

fn read(path: &Path) -> Result<String, Box<dyn std::error::Error>> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn stats_lines(stats: &RunStats, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "states={} transitions={} rounds={} map-iterations={} kernel-calls={} owcty-iterations={} states-at-detection={}",
        stats.states_generated,
        stats.transitions_generated,
        stats.detection_rounds,
        stats.map_iterations,
        stats.kernel_calls,
        stats.owcty_iterations,
        stats
            .states_at_detection
            .map_or_else(|| "none".to_string(), |s| s.to_string()),
    )?;
    writeln!(
        out,
        "csr-ms={} kernel-ms={} total-ms={}",
        millis(stats.csr_time),
        millis(stats.kernel_time),
        millis(stats.total_time)
    )
}

fn check(
    path: &Path,
    algorithm: Algorithm,
    args: &RunArgs,
    report_every: u64,
    consts: &[(String, i64)],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let text = read(path)?;
    let model = match parse_model_with_consts(&text, consts) {
        Ok(m) => m,
        Err(d) => {
            writeln!(err, "{}:{d}", path.display())?;
            return Ok(EXIT_USAGE);
        }
    };
    let config = ExploreConfig {
        report_every_states: report_every as usize,
        ..args.explore_config(algorithm)
    };
    writeln!(
        out,
        "model={} algorithm={} workers={}",
        bench::model_name(path),
        algorithm.name(),
        args.workers
    )?;
    let mut last = None;
    let result = explore_with_progress(&model, &config, |p| {
        if last != Some(*p) {
            let _ = writeln!(out, "{p}");
            last = Some(*p);
        }
    });
    match result {
        Ok(run) => {
            stats_lines(&run.stats, out)?;
            writeln!(out, "{}", run.verdict)?;
            Ok(verdict_exit_code(run.verdict))
        }
        Err(e) => {
            stats_lines(e.stats(), out)?;
            writeln!(err, "error: {e}")?;
            Ok(match e {
                ExploreError::ResourceLimit { .. } => EXIT_RESOURCE,
                ExploreError::ModelRuntime { .. } => EXIT_RUNTIME,
            })
        }
    }
}

fn graph(path: &Path, algorithm: GraphAlgorithm, workers: usize, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let text = read(path)?;
    let g = match parse_graph(&text) {
        Ok(g) => g,
        Err(e) => {
            writeln!(err, "{}:{e}", path.display())?;
            return Ok(EXIT_USAGE);
        }
    };
    let verdict = match algorithm {
        GraphAlgorithm::Map => {
            let (v, stats) = run_map(
                &g.snapshot(Orientation::Transposed),
                MapConfig {
                    workers,
                    early_exit: true,
                },
            );
            writeln!(out, "map-iterations={} kernel-calls={}", stats.iterations, stats.kernel_calls)?;
            v
        }
        GraphAlgorithm::Owcty => {
            let (v, stats) = run_owcty(&g.snapshot(Orientation::Forward));
            writeln!(out, "owcty-iterations={}", stats.outer_iterations)?;
            v
        }
        GraphAlgorithm::Scc => {
            let o = scc_verdict(&g.edges, g.n, &g.accepting_set(), usize::MAX)?;
            writeln!(out, "cyclic-accepting-vertices={}", o.cyclic_accepting_vertices.len())?;
            o.verdict
        }
    };
    writeln!(out, "{verdict}")?;
    Ok(verdict_exit_code(verdict))
}

fn bench_cmd(
    dir: &Path,
    csv: Option<&Path>,
    algorithms: &[ModelAlgorithm],
    args: &RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let mut algs: Vec<Algorithm> = Vec::new();
    for &a in algorithms {
        if !algs.contains(&a.into()) {
            algs.push(a.into());
        }
    }
    let config = BenchConfig {
        algorithms: algs,
        explore: args.explore_config(Algorithm::Map),
    };
    let report = bench::run_bench(dir, &config, |model, run| {
        let _ = writeln!(
            err,
            "{model} {}: {} states={} total-ms={}",
            run.algorithm.name(),
            run.verdict,
            run.stats.states_generated,
            millis(run.stats.total_time)
        );
    });
    let report = match report {
        Ok(r) => r,
        Err(e @ bench::BenchError::Explore { .. }) => {
            writeln!(err, "error: {e}")?;
            let bench::BenchError::Explore { source, .. } = e else { unreachable!() };
            return Ok(match source {
                ExploreError::ResourceLimit { .. } => EXIT_RESOURCE,
                ExploreError::ModelRuntime { .. } => EXIT_RUNTIME,
            });
        }
        Err(e) => return Err(e.into()),
    };
    write!(out, "{}", bench::render_table(&report))?;
    if let Some(path) = csv {
        let file = fs::File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
        bench::write_csv(&report, file)?;
    }
    Ok(EXIT_NO_CYCLE)
}
