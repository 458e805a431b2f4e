//! Runs every cargo example through its `run_example` entry point.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(reduce_molecule);
example!(conflict_graph);
example!(pair_similarity);
example!(export_qubo);
example!(cokplex_oracle);
example!(nway_conflict);
example!(crossval);
example!(sweep);

#[test]
fn reduce_molecule_contracts_fused_rings() {
    let g = reduce_molecule::run_example().unwrap();
    assert_eq!(g.order(), 3);
}

#[test]
fn conflict_graph_distance_edges_shrink_with_threshold() {
    let graphs = conflict_graph::run_example().unwrap();
    let census: Vec<usize> = graphs.iter().map(|g| cokplex::conflict::edge_census(g).distance).collect();
    assert_eq!(census, vec![2, 0, 0]);
}

#[test]
fn pair_similarity_scores_are_in_range() {
    let results = pair_similarity::run_example().unwrap();
    assert!(!results.is_empty());
    for r in &results {
        let s = r.score.unwrap();
        assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn export_qubo_preserves_optimum() {
    let (record, source, lifted) = export_qubo::run_example().unwrap();
    assert_eq!(source, lifted);
    assert!(record.num_vars > 0);
}

#[test]
fn cokplex_oracle_agrees_with_exhaustive() {
    for (k, exhaustive, oracle) in cokplex_oracle::run_example().unwrap() {
        assert!((exhaustive - oracle).abs() < 1e-9, "k = {k}");
    }
}

#[test]
fn nway_conflict_finds_common_substructure() {
    let (cg, weight) = nway_conflict::run_example().unwrap();
    assert!(cg.len() > 0);
    assert!(weight > 0.0);
}

#[test]
fn crossval_separates_planted_classes() {
    let (graph, fingerprint) = crossval::run_example().unwrap();
    assert_eq!(graph.mean.accuracy, Some(1.0));
    assert_eq!(fingerprint.mean.accuracy, Some(1.0));
}

#[test]
fn sweep_rerun_hits_cache() {
    let (rows, recomputed) = sweep::run_example().unwrap();
    assert_eq!(rows.len(), 36);
    assert_eq!(recomputed, 0);
}
