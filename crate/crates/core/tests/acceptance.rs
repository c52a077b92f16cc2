//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{brute_force_map, corpus_dir, corpus_path, load_corpus, RandomGraph, CORPUS};
use mapcheck::bench::{run_bench, BenchConfig, BenchReport, ModelClass};
use mapcheck::map::{demote, fixpoint_traced, run_map, run_map_with_kernel, MapConfig, PropagationKernel};
use mapcheck::oracle::scc_verdict;
use mapcheck::{explore, run_owcty, Algorithm, ExploreConfig, Orientation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |n: u32, outcome: Outcome| {
        match &outcome {
            Ok(detail) => println!("criterion {n} PASS: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL: {detail}")
            }
        }
    };

    report(1, oracle_equivalence());
    report(2, map_internals());
    report(3, on_the_fly());
    report(4, invariance());
    report(5, determinism());
    let bench = bench_corpus();
    report(6, scaling(bench.as_ref().ok().map(|(r, _)| r)));
    report(
        7,
        bench.and_then(|(r, elapsed)| {
            let limit = Duration::from_secs(300);
            let detail = format!("{} models, all manifests hold, {:.1}s (limit {}s)", r.rows.len(), elapsed.as_secs_f64(), limit.as_secs());
            if r.rows.len() == CORPUS.len() && elapsed < limit {
                Ok(detail)
            } else {
                Err(detail)
            }
        }),
    );

    println!("acceptance: {failed} failed, {:.1}s", start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut graphs = 0;
    let mut cyclic = 0;
    let mut disagreements = Vec::new();
    for round in 0..200 {
        for density in [0.02, 0.05, 0.1] {
            for acc in [0.1, 0.3] {
                let n = rng.random_range(1..=50);
                let g = RandomGraph::generate(&mut rng, n, density, acc);
                let expected = scc_verdict(&g.edges, n, &g.accepting_set(), usize::MAX).unwrap().verdict.is_cycle();
                let map = run_map(&g.snapshot(Orientation::Transposed), MapConfig::default()).0.is_cycle();
                let owcty = run_owcty(&g.snapshot(Orientation::Forward)).0.is_cycle();
                graphs += 1;
                cyclic += expected as usize;
                if map != expected || owcty != expected {
                    disagreements.push(format!("round {round} n={n} density={density} acc={acc}"));
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let detail = format!(
        "{graphs} graphs ({cyclic} with accepting cycles), {} disagreements, {:.2}s",
        disagreements.len(),
        elapsed.as_secs_f64()
    );
    if disagreements.is_empty() && elapsed < Duration::from_secs(60) {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", disagreements.first()))
    }
}

fn map_internals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut runs, mut fixpoints) = (0, 0);
    for _ in 0..3000 {
        let n = rng.random_range(1..=12);
        let density = rng.random_range(0.0..0.4);
        let acc = rng.random_range(0.0..0.7);
        let g = RandomGraph::generate(&mut rng, n, density, acc);
        for orientation in [Orientation::Transposed, Orientation::Forward] {
            let snap = g.snapshot(orientation);
            let kernel = PropagationKernel::new(&snap, 1);
            let f0 = snap.accepting().clone();
            let mut f = f0.clone();
            let mut iterations = 0;
            runs += 1;
            while !f.is_empty() {
                iterations += 1;
                let mut prev: Option<Vec<_>> = None;
                let mut monotone = true;
                let fp = fixpoint_traced(&kernel, &f, true, |x| {
                    if let Some(p) = &prev {
                        monotone &= p.iter().zip(x).all(|(a, b)| a <= b);
                    }
                    prev = Some(x.to_vec());
                });
                fixpoints += 1;
                if !monotone {
                    return Err(format!("non-monotone propagation on {g:?}"));
                }
                if fp.steps as usize > n {
                    return Err(format!("{} steps on {n} vertices: {g:?}", fp.steps));
                }
                if fp.witness.is_some() {
                    break;
                }
                if fp.values.to_options() != brute_force_map(&snap, &f) {
                    return Err(format!("fixpoint differs from transitive closure on {g:?}"));
                }
                if demote(&fp.values, &mut f).is_empty() {
                    break;
                }
            }
            let (_, stats) = run_map_with_kernel(&kernel, f0.clone(), true);
            if stats.iterations != iterations || iterations as usize > f0.len() {
                return Err(format!("{} iterations with |F0| = {}: {g:?}", stats.iterations, f0.len()));
            }
        }
    }
    Ok(format!("{runs} MAP runs, {fixpoints} fixpoints: closure, monotonicity, steps <= n, iterations <= |F0|"))
}

fn on_the_fly() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["philosophers_bug", "elevator_bug"] {
        let (model, manifest) = load_corpus(name);
        let (verdict, stats) = explore(&model, &ExploreConfig::default()).map_err(|e| format!("{name}: {e}"))?;
        match stats.states_at_detection {
            Some(at) if verdict.is_cycle() && at < manifest.states => {
                details.push(format!("{name} {at} < {}", manifest.states))
            }
            other => {
                ok = false;
                details.push(format!("{name} {verdict} at {other:?} of {}", manifest.states))
            }
        }
    }
    let detail = details.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn invariance() -> Outcome {
    let mut configs: Vec<(String, ExploreConfig)> = Vec::new();
    for cadence in [Some(1000), Some(50_000), None] {
        for w in [1, 2, 4] {
            configs.push((
                format!("cadence={cadence:?} W={w}"),
                ExploreConfig {
                    detection_interval_edges: cadence,
                    generation_workers: w,
                    kernel_workers: w,
                    ..Default::default()
                },
            ));
        }
    }
    for cadence in [Some(50_000), None] {
        let base = ExploreConfig {
            detection_interval_edges: cadence,
            ..Default::default()
        };
        configs.push((
            format!("cadence={cadence:?} no pruning"),
            ExploreConfig {
                enable_relevance_pruning: false,
                ..base.clone()
            },
        ));
        configs.push((
            format!("cadence={cadence:?} no scc restriction"),
            ExploreConfig {
                enable_final_scc_restriction: false,
                ..base.clone()
            },
        ));
        configs.push((
            format!("cadence={cadence:?} forward"),
            ExploreConfig {
                map_orientation: Orientation::Forward,
                ..base.clone()
            },
        ));
    }
    let t = Instant::now();
    let mut runs = 0;
    for name in CORPUS {
        let (model, manifest) = load_corpus(name);
        for (label, cfg) in &configs {
            let (verdict, _) = explore(&model, cfg).map_err(|e| format!("{name} {label}: {e}"))?;
            runs += 1;
            if verdict.is_cycle() != manifest.has_cycle {
                return Err(format!("{name} {label}: {verdict}"));
            }
        }
    }
    Ok(format!(
        "{runs} runs over {} models x {} configurations agree with the manifests, {:.1}s",
        CORPUS.len(),
        configs.len(),
        t.elapsed().as_secs_f64()
    ))
}

fn determinism() -> Outcome {
    let check = |name: &str, w: &str| -> Result<Vec<String>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_mapcheck"))
            .args(["check", &corpus_path(name).display().to_string(), "--workers", w, "--detect-every", "10000"])
            .output()
            .map_err(|e| e.to_string())?;
        let text = String::from_utf8_lossy(&out.stdout).into_owned();
        // everything except wall-clock times
        Ok(text.lines().filter(|l| !l.starts_with("csr-ms=")).map(str::to_string).collect())
    };
    for name in CORPUS {
        for w in ["1", "4"] {
            let a = check(name, w)?;
            let b = check(name, w)?;
            if a != b || !a.last().is_some_and(|l| l.starts_with("verdict=")) {
                return Err(format!("{name} W={w}: {a:?} vs {b:?}"));
            }
        }
    }
    Ok(format!("{} models at W=1 and W=4: identical verdict, count and iteration lines", CORPUS.len()))
}

fn bench_corpus() -> Result<(BenchReport, Duration), String> {
    let t = Instant::now();
    let report = run_bench(&corpus_dir(), &BenchConfig::default(), |_, _| {}).map_err(|e| e.to_string())?;
    Ok((report, t.elapsed()))
}

/// Synthetic graph with over a million edges: out-degree six to random targets,
/// one vertex in a thousand accepting. The giant component holds accepting
/// cycles, so a MAP run is a single fixpoint of a handful of steps.
fn synthetic() -> mapcheck::CsrSnapshot {
    let n = 200_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(1_200_000);
    for s in 0..n {
        for _ in 0..6 {
            edges.push((s, rng.random_range(0..n)));
        }
    }
    let accepting = mapcheck::AcceptingSet::from_members(n as usize, (0..n).filter(|v| v % 1000 == 999));
    mapcheck::CsrSnapshot::from_edges(n as usize, &edges, accepting, Orientation::Transposed)
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn scaling(bench: Option<&BenchReport>) -> Outcome {
    let snap = synthetic();
    let kernel_time = |workers: usize| {
        let kernel = PropagationKernel::new(&snap, workers);
        let samples: Vec<Duration> = (0..5)
            .map(|_| {
                let t = Instant::now();
                let (v, _) = run_map_with_kernel(&kernel, snap.accepting().clone(), true);
                let e = t.elapsed();
                assert!(v.is_cycle());
                e
            })
            .collect();
        median(samples)
    };
    let one = kernel_time(1);
    let four = kernel_time(4);
    let ratio = four.as_secs_f64() / one.as_secs_f64();
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let scaling_ok = ratio <= 0.67;
    let mut detail = format!(
        "{} edges: kernel W=1 {:.1}ms, W=4 {:.1}ms, ratio {ratio:.2} (limit 0.67, {cpus} cpu available)",
        snap.m(),
        one.as_secs_f64() * 1e3,
        four.as_secs_f64() * 1e3
    );
    let order_ok = match bench {
        Some(r) => {
            let acc = r.total_time(ModelClass::Accepting, Algorithm::Map);
            let non = r.total_time(ModelClass::NonAccepting, Algorithm::Map);
            detail.push_str(&format!(
                "; MAP total accepting {:.1}ms vs non-accepting {:.1}ms",
                acc.as_secs_f64() * 1e3,
                non.as_secs_f64() * 1e3
            ));
            acc < non
        }
        None => {
            detail.push_str("; corpus bench failed");
            false
        }
    };
    if scaling_ok && order_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}
