//! Structural properties of the similarity score, including a pinned
//! counterexample to self-similarity in allow mode with k >= 2.

use cokplex::conflict::{build_conflict_graph, Layout};
use cokplex::molgraph::{parse_molecule_json, reduce, ReducedGraph};
use cokplex::qubo::BijectionMode;
use cokplex::similarity::{similarity, SimilarityParams};
use cokplex::solve::verify_cokplex;

// Cl-CH2-S-S-Cl.
const R79: &str = r#"{"name":"r79","atoms":[{"z":6,"pos":[0.0,0.0,0.0]},{"z":16,"pos":[-0.6278,-1.359,0.0]},{"z":16,"pos":[0.105,-2.5284,0.0]},{"z":17,"pos":[0.2153,-3.908,0.0]},{"z":17,"pos":[0.3631,-1.1646,0.0]}],"bonds":[{"a":0,"b":1,"order":1},{"a":1,"b":2,"order":1},{"a":2,"b":3,"order":1},{"a":0,"b":4,"order":1}]}"#;

fn r79() -> ReducedGraph {
    reduce(&parse_molecule_json(R79).unwrap()).unwrap()
}

fn params(k: usize, mode: BijectionMode) -> SimilarityParams {
    SimilarityParams { k, mode, layout: Layout::from_index(0, f64::INFINITY).unwrap(), ..Default::default() }
}

#[test]
fn allow_mode_self_similarity_can_drop_below_one() {
    let g = r79();
    let cg = build_conflict_graph(&g, &g, &params(3, BijectionMode::Allow).layout);
    assert_eq!(cg.len(), 9);

    let n = cg.len();
    let mut best = f64::NEG_INFINITY;
    let mut best_sets = Vec::new();
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if !verify_cokplex(&cg, &set, 3, BijectionMode::Allow) {
            continue;
        }
        let w: f64 = set.iter().map(|&v| cg.weight(v)).sum();
        if w > best + 1e-9 {
            best = w;
            best_sets.clear();
        }
        if (w - best).abs() <= 1e-9 {
            best_sets.push(set);
        }
    }
    let identity: Vec<usize> = (0..n).filter(|&v| cg.vertices()[v].pair().0 == cg.vertices()[v].pair().1).collect();
    let identity_weight: f64 = identity.iter().map(|&v| cg.weight(v)).sum();
    assert!(best > identity_weight, "swapped pairings outweigh the identity");
    for set in &best_sets {
        let mut covered: Vec<usize> = set.iter().map(|&v| cg.vertices()[v].pair().0).collect();
        covered.sort_unstable();
        covered.dedup();
        assert!(covered.len() < g.order(), "no maximum-weight set covers every vertex");
    }

    let allow = similarity(&g, &g, &params(3, BijectionMode::Allow)).unwrap();
    assert!(allow.score.unwrap() < 1.0);
    assert_eq!(allow.objective, Some(best));
    let forbid = similarity(&g, &g, &params(3, BijectionMode::Forbid)).unwrap();
    assert_eq!(forbid.score, Some(1.0));
    let k1 = similarity(&g, &g, &params(1, BijectionMode::Allow)).unwrap();
    assert_eq!(k1.score, Some(1.0));
}

#[test]
fn similarity_is_symmetric_for_counterexample_pair() {
    let g = r79();
    let h = reduce(&parse_molecule_json(&R79.replace("\"z\":16", "\"z\":8")).unwrap()).unwrap();
    for k in 1..=3 {
        for mode in [BijectionMode::Allow, BijectionMode::Forbid] {
            let a = similarity(&g, &h, &params(k, mode)).unwrap();
            let b = similarity(&h, &g, &params(k, mode)).unwrap();
            assert_eq!(a.score, b.score, "k = {k}, {mode:?}");
        }
    }
}
