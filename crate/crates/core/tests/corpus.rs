//! Corpus models against their manifests, with verdicts confirmed by the
//! oracles on the fully generated product graphs.

mod common;

use common::{fixture, load, load_corpus, CORPUS};
use mapcheck::bench::check_manifest;
use mapcheck::explore::{explore_with_progress, Exploration};
use mapcheck::model::Model;
use mapcheck::oracle::{ndfs_verdict, scc_verdict};
use mapcheck::{explore, Algorithm, ExploreConfig};

fn full_run(model: &Model, workers: usize) -> Exploration {
    let cfg = ExploreConfig {
        detection_interval_edges: None,
        early_exit: false,
        generation_workers: workers,
        kernel_workers: workers,
        ..Default::default()
    };
    explore_with_progress(model, &cfg, |_| {}).unwrap()
}

#[test]
fn manifests_hold_under_every_algorithm() {
    for name in CORPUS {
        let (model, manifest) = load_corpus(name);
        for algorithm in [Algorithm::Map, Algorithm::Owcty, Algorithm::Ndfs] {
            let cfg = ExploreConfig {
                algorithm,
                ..Default::default()
            };
            let (verdict, stats) = explore(&model, &cfg).unwrap();
            check_manifest(&manifest, verdict, &stats).unwrap_or_else(|e| panic!("{name} {algorithm:?}: {e}"));
        }
    }
}

#[test]
fn oracles_confirm_manifests_on_full_graphs() {
    for name in CORPUS {
        let (model, manifest) = load_corpus(name);
        let run = full_run(&model, 1);
        let log = run.graph.log();
        let n = log.vertex_count();
        assert_eq!(n as u64, manifest.states, "{name}");
        assert_eq!(Some(log.edge_count() as u64), manifest.transitions, "{name}");
        let (edges, accepting) = log.copy_prefix(log.prefix());
        let scc = scc_verdict(&edges, n, &accepting, usize::MAX).unwrap();
        let ndfs = ndfs_verdict(&edges, n, &accepting, 0, usize::MAX).unwrap();
        assert_eq!(scc.verdict.is_cycle(), manifest.has_cycle, "{name}: scc oracle");
        assert_eq!(ndfs.is_cycle(), manifest.has_cycle, "{name}: ndfs oracle");
        assert_eq!(run.verdict.is_cycle(), manifest.has_cycle, "{name}: map");
        if let Some(w) = run.verdict.witness() {
            assert!(scc.cyclic_accepting_vertices.contains(&w), "{name}: witness {w}");
        }
    }
}

#[test]
fn reachable_states_do_not_depend_on_workers() {
    for name in ["peterson_ok", "bakery_bug", "anderson_ok", "elevator_bug"] {
        let (model, _) = load_corpus(name);
        let one = full_run(&model, 1);
        let four = full_run(&model, 4);
        assert_eq!(one.graph.keys(), four.graph.keys(), "{name}");
        let log1 = one.graph.log();
        let log4 = four.graph.log();
        assert_eq!(log1.copy_prefix(log1.prefix()).0, log4.copy_prefix(log4.prefix()).0, "{name}");
        assert_eq!(one.stats.states_generated, four.stats.states_generated);
        assert_eq!(one.stats.map_iterations, four.stats.map_iterations);
        assert_eq!(one.stats.kernel_calls, four.stats.kernel_calls);
    }
}

#[test]
fn peterson_ok_state_count() {
    let (model, manifest) = load_corpus("peterson_ok");
    let (verdict, stats) = explore(&model, &ExploreConfig::default()).unwrap();
    assert!(!verdict.is_cycle());
    assert_eq!(stats.states_generated, manifest.states);
    assert_eq!(stats.states_generated, 5200);
}

#[test]
fn starving_philosophers_are_found_by_every_engine_before_the_end() {
    let (model, manifest) = load_corpus("philosophers_bug");
    for algorithm in [Algorithm::Map, Algorithm::Owcty, Algorithm::Ndfs] {
        let cfg = ExploreConfig {
            algorithm,
            ..Default::default()
        };
        let (verdict, stats) = explore(&model, &cfg).unwrap();
        assert!(verdict.is_cycle(), "{algorithm:?}");
        let at = stats.states_at_detection.expect("found by an intermediate round");
        assert!(at < manifest.states, "{algorithm:?}: {at}");
        assert!(at <= stats.states_generated);
    }
}

#[test]
fn two_philosophers_by_hand() {
    let path = fixture("two_philosophers.cdve");
    let (model, manifest) = load(&path);
    let text = std::fs::read_to_string(&path).unwrap();
    let expected_successors: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("// @initial-successors:"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let init = model.initial_state();
    assert_eq!(model.successors(&init).unwrap().len(), expected_successors);

    let run = full_run(&model, 1);
    assert!(run.verdict.is_cycle());
    assert_eq!(run.stats.states_generated, manifest.states);
    assert_eq!(Some(run.stats.transitions_generated), manifest.transitions);
}
