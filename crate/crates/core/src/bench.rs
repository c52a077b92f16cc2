//! Benchmark harness over a directory of annotated models.
//!
//! Every `.cdve` file carries a manifest in its leading comments:
//!
//! ```text
//! // @verdict: cycle          (or no-cycle)
//! // @states: 123456
//! // @transitions: 456789     (optional)
//! ```
//!
//! The state and transition counts are those of a full exploration with
//! relevance pruning enabled. A run that stops early on a cycle is checked
//! only against the verdict and an upper bound on the state count.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::explore::{explore, Algorithm, ExploreConfig, ExploreError, RunStats};
use crate::model::{parse_model, Diagnostic};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Manifest {
    pub has_cycle: bool,
    pub states: u64,
    pub transitions: Option<u64>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{model}: bad manifest: {message}")]
    Manifest { model: String, message: String },
    #[error("{model}: {source}")]
    Parse {
        model: String,
        #[source]
        source: Diagnostic,
    },
    #[error("{model} ({algorithm}): {source}")]
    Explore {
        model: String,
        algorithm: &'static str,
        #[source]
        source: ExploreError,
    },
    #[error("{model} ({algorithm}): manifest mismatch: {message}")]
    Mismatch {
        model: String,
        algorithm: &'static str,
        message: String,
    },
}

pub fn parse_manifest(model: &str, text: &str) -> Result<Manifest, BenchError> {
    let bad = |message: String| BenchError::Manifest {
        model: model.to_string(),
        message,
    };
    let (mut verdict, mut states, mut transitions) = (None, None, None);
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix("//") else { continue };
        let Some(rest) = rest.trim().strip_prefix('@') else { continue };
        let Some((key, value)) = rest.split_once(':') else {
            return Err(bad(format!("expected `@key: value`, found {line:?}")));
        };
        let value = value.trim();
        let count = || value.parse::<u64>().map_err(|_| bad(format!("bad count {value:?} for @{key}")));
        match key.trim() {
            "verdict" => {
                verdict = Some(match value {
                    "cycle" => true,
                    "no-cycle" => false,
                    _ => return Err(bad(format!("unknown verdict {value:?}"))),
                })
            }
            "states" => states = Some(count()?),
            "transitions" => transitions = Some(count()?),
            _ => {}
        }
    }
    Ok(Manifest {
        has_cycle: verdict.ok_or_else(|| bad("missing @verdict".into()))?,
        states: states.ok_or_else(|| bad("missing @states".into()))?,
        transitions,
    })
}

/// Checks one finished run against the manifest.
pub fn check_manifest(manifest: &Manifest, verdict: Verdict, stats: &RunStats) -> Result<(), String> {
    if verdict.is_cycle() != manifest.has_cycle {
        return Err(format!(
            "expected {}, got {verdict}",
            if manifest.has_cycle { "a cycle" } else { "no cycle" }
        ));
    }
    if stats.states_at_detection.is_some() {
        if stats.states_generated > manifest.states {
            return Err(format!(
                "generated {} states, more than the {} reachable",
                stats.states_generated, manifest.states
            ));
        }
        return Ok(());
    }
    if stats.states_generated != manifest.states {
        return Err(format!("expected {} states, got {}", manifest.states, stats.states_generated));
    }
    if let Some(t) = manifest.transitions {
        if stats.transitions_generated != t {
            return Err(format!("expected {t} transitions, got {}", stats.transitions_generated));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub verdict: Verdict,
    pub stats: RunStats,
}

impl AlgorithmRun {
    /// Outer iterations of whichever algorithm ran.
    pub fn iterations(&self) -> u64 {
        self.stats.map_iterations + self.stats.owcty_iterations
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub model: String,
    pub has_accepting_cycle: bool,
    pub runs: Vec<AlgorithmRun>,
}

impl BenchRow {
    pub fn run(&self, algorithm: Algorithm) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelClass {
    NonAccepting,
    Accepting,
    Both,
}

impl ModelClass {
    pub const ALL: [ModelClass; 3] = [ModelClass::NonAccepting, ModelClass::Accepting, ModelClass::Both];

    pub fn label(self) -> &'static str {
        match self {
            ModelClass::NonAccepting => "non-accepting",
            ModelClass::Accepting => "accepting",
            ModelClass::Both => "both",
        }
    }

    fn includes(self, row: &BenchRow) -> bool {
        match self {
            ModelClass::NonAccepting => !row.has_accepting_cycle,
            ModelClass::Accepting => row.has_accepting_cycle,
            ModelClass::Both => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub algorithms: Vec<Algorithm>,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Sum of total times of one algorithm over a class of models.
    pub fn total_time(&self, class: ModelClass, algorithm: Algorithm) -> Duration {
        self.rows
            .iter()
            .filter(|r| class.includes(r))
            .filter_map(|r| r.run(algorithm))
            .map(|r| r.stats.total_time)
            .sum()
    }

    /// `baseline` total time divided by `subject` total time.
    pub fn speedup(&self, class: ModelClass, subject: Algorithm, baseline: Algorithm) -> Option<f64> {
        if !self.algorithms.contains(&subject) || !self.algorithms.contains(&baseline) {
            return None;
        }
        let s = self.total_time(class, subject).as_secs_f64();
        (s > 0.0).then(|| self.total_time(class, baseline).as_secs_f64() / s)
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub explore: ExploreConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: vec![Algorithm::Map, Algorithm::Owcty, Algorithm::Ndfs],
            explore: ExploreConfig::default(),
        }
    }
}

/// `.cdve` files of a directory in name order.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let io_err = |source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.extension().is_some_and(|e| e == "cdve") && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs every model under every configured algorithm. `on_run` is called
/// after each run, e.g. for live output.
pub fn run_bench(
    dir: &Path,
    config: &BenchConfig,
    mut on_run: impl FnMut(&str, &AlgorithmRun),
) -> Result<BenchReport, BenchError> {
    let mut rows = Vec::new();
    for path in corpus_files(dir)? {
        let name = model_name(&path);
        let text = fs::read_to_string(&path).map_err(|source| BenchError::Io {
            path: path.clone(),
            source,
        })?;
        let manifest = parse_manifest(&name, &text)?;
        let model = parse_model(&text).map_err(|source| BenchError::Parse {
            model: name.clone(),
            source,
        })?;
        let mut runs = Vec::new();
        for &algorithm in &config.algorithms {
            let cfg = ExploreConfig {
                algorithm,
                ..config.explore.clone()
            };
            let (verdict, stats) = explore(&model, &cfg).map_err(|source| BenchError::Explore {
                model: name.clone(),
                algorithm: algorithm.name(),
                source,
            })?;
            check_manifest(&manifest, verdict, &stats).map_err(|message| BenchError::Mismatch {
                model: name.clone(),
                algorithm: algorithm.name(),
                message,
            })?;
            let run = AlgorithmRun {
                algorithm,
                verdict,
                stats,
            };
            on_run(&name, &run);
            runs.push(run);
        }
        rows.push(BenchRow {
            model: name,
            has_accepting_cycle: manifest.has_cycle,
            runs,
        });
    }
    Ok(BenchReport {
        algorithms: config.algorithms.clone(),
        rows,
    })
}

pub fn millis(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    out
}

/// Per-model table followed by the aggregate table. Times in milliseconds.
pub fn render_table(report: &BenchReport) -> String {
    let mut header = vec!["model".to_string(), "acc".to_string()];
    for a in &report.algorithms {
        for col in ["csr-ms", "kernel-ms", "total-ms", "iter"] {
            header.push(format!("{}:{col}", a.name()));
        }
    }
    let mut rows = vec![header];
    for row in &report.rows {
        let mut cells = vec![row.model.clone(), if row.has_accepting_cycle { "Y" } else { "N" }.to_string()];
        for &a in &report.algorithms {
            match row.run(a) {
                Some(r) => cells.extend([
                    millis(r.stats.csr_time),
                    millis(r.stats.kernel_time),
                    millis(r.stats.total_time),
                    r.iterations().to_string(),
                ]),
                None => cells.extend(std::iter::repeat_n("-".to_string(), 4)),
            }
        }
        rows.push(cells);
    }
    let mut out = aligned(&rows);
    out.push('\n');

    let mut header = vec!["models".to_string()];
    header.extend(report.algorithms.iter().map(|a| format!("{}:total-ms", a.name())));
    let baselines: Vec<Algorithm> = [Algorithm::Owcty, Algorithm::Ndfs]
        .into_iter()
        .filter(|b| report.algorithms.contains(&Algorithm::Map) && report.algorithms.contains(b))
        .collect();
    header.extend(baselines.iter().map(|b| format!("speedup-vs-{}", b.name())));
    let mut rows = vec![header];
    for class in ModelClass::ALL {
        let mut cells = vec![class.label().to_string()];
        cells.extend(report.algorithms.iter().map(|&a| millis(report.total_time(class, a))));
        for &b in &baselines {
            cells.push(match report.speedup(class, Algorithm::Map, b) {
                Some(s) => format!("{s:.2}"),
                None => "-".to_string(),
            });
        }
        rows.push(cells);
    }
    out.push_str(&aligned(&rows));
    out
}

pub const CSV_HEADER: [&str; 15] = [
    "model",
    "algorithm",
    "verdict",
    "witness",
    "states_generated",
    "transitions_generated",
    "detection_rounds",
    "map_iterations",
    "kernel_calls",
    "owcty_iterations",
    "csr_time_ms",
    "kernel_time_ms",
    "total_time_ms",
    "states_at_detection",
    "has_accepting_cycle",
];

pub fn write_csv<W: io::Write>(report: &BenchReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &report.rows {
        for r in &row.runs {
            let s = &r.stats;
            w.write_record([
                row.model.clone(),
                r.algorithm.name().to_string(),
                if r.verdict.is_cycle() { "cycle-found" } else { "no-accepting-cycle" }.to_string(),
                r.verdict.witness().map(|w| w.to_string()).unwrap_or_default(),
                s.states_generated.to_string(),
                s.transitions_generated.to_string(),
                s.detection_rounds.to_string(),
                s.map_iterations.to_string(),
                s.kernel_calls.to_string(),
                s.owcty_iterations.to_string(),
                millis(s.csr_time),
                millis(s.kernel_time),
                millis(s.total_time),
                s.states_at_detection.map(|v| v.to_string()).unwrap_or_default(),
                row.has_accepting_cycle.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_fields() {
        let m = parse_manifest("m", "// @verdict: cycle\n// @states: 42\n// other\nbyte x;").unwrap();
        assert_eq!(
            m,
            Manifest {
                has_cycle: true,
                states: 42,
                transitions: None
            }
        );
        let m = parse_manifest("m", "//@verdict: no-cycle\n//  @states: 7\n// @transitions: 9\n").unwrap();
        assert_eq!(m.transitions, Some(9));
        assert!(!m.has_cycle);
    }

    #[test]
    fn manifest_errors() {
        for text in ["// @states: 1", "// @verdict: cycle", "// @verdict: maybe\n// @states: 1", "// @verdict: cycle\n// @states: x"] {
            assert!(matches!(parse_manifest("m", text), Err(BenchError::Manifest { .. })), "{text}");
        }
    }

    fn stats(states: u64, early: Option<u64>) -> RunStats {
        RunStats {
            states_generated: states,
            transitions_generated: 5,
            states_at_detection: early,
            ..Default::default()
        }
    }

    #[test]
    fn manifest_checks() {
        let m = Manifest {
            has_cycle: true,
            states: 10,
            transitions: Some(5),
        };
        let cycle = Verdict::CycleFound { witness: 0 };
        assert!(check_manifest(&m, cycle, &stats(10, None)).is_ok());
        assert!(check_manifest(&m, cycle, &stats(4, Some(3))).is_ok());
        assert!(check_manifest(&m, cycle, &stats(11, Some(3))).is_err());
        assert!(check_manifest(&m, cycle, &stats(9, None)).is_err());
        assert!(check_manifest(&m, Verdict::NoAcceptingCycle, &stats(10, None)).is_err());
    }

    fn fake_report() -> BenchReport {
        let run = |algorithm, ms| AlgorithmRun {
            algorithm,
            verdict: Verdict::NoAcceptingCycle,
            stats: RunStats {
                total_time: Duration::from_millis(ms),
                ..Default::default()
            },
        };
        BenchReport {
            algorithms: vec![Algorithm::Map, Algorithm::Owcty],
            rows: vec![
                BenchRow {
                    model: "a".into(),
                    has_accepting_cycle: false,
                    runs: vec![run(Algorithm::Map, 10), run(Algorithm::Owcty, 30)],
                },
                BenchRow {
                    model: "b".into(),
                    has_accepting_cycle: true,
                    runs: vec![run(Algorithm::Map, 5), run(Algorithm::Owcty, 5)],
                },
            ],
        }
    }

    #[test]
    fn aggregates_are_sums_and_ratios() {
        let r = fake_report();
        assert_eq!(r.total_time(ModelClass::Both, Algorithm::Map), Duration::from_millis(15));
        assert_eq!(r.total_time(ModelClass::Accepting, Algorithm::Owcty), Duration::from_millis(5));
        assert_eq!(r.speedup(ModelClass::NonAccepting, Algorithm::Map, Algorithm::Owcty), Some(3.0));
        assert_eq!(r.speedup(ModelClass::Both, Algorithm::Map, Algorithm::Ndfs), None);
        let table = render_table(&r);
        assert!(table.contains("speedup-vs-owcty"));
        assert!(!table.contains("speedup-vs-ndfs"));
        let both = table.lines().find(|l| l.starts_with("both")).unwrap();
        assert!(both.contains("15.000") && both.contains("35.000") && both.ends_with("2.33"), "{both}");
    }

    #[test]
    fn csv_has_one_row_per_run() {
        let mut buf = Vec::new();
        write_csv(&fake_report(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[2].starts_with("a,owcty,no-accepting-cycle,,0,0,0,0,0,0,0.000,0.000,30.000,,false"));
    }
}
