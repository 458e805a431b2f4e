// Conflict graph over three molecules at once: vertices are label-compatible
// triples rather than pairs.
//
// `cargo run --example nway_conflict`

use cokplex::conflict::{build_nway_conflict_graph, edge_census, ConflictGraph, Layout};
use cokplex::molgraph::reduce;
use cokplex::qubo::BijectionMode;
use cokplex::solve::cokplex_oracle;
use cokplex::synth::aliphatic_alcohol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> cokplex::Result<(ConflictGraph, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let graphs = (0..3).map(|i| reduce(&aliphatic_alcohol(&mut rng, format!("alcohol{i}")))).collect::<cokplex::Result<Vec<_>>>()?;
    let refs: Vec<_> = graphs.iter().collect();
    let cg = build_nway_conflict_graph(&refs, &Layout::from_index(1, f64::INFINITY)?)?;
    println!("orders {:?}: {} triples, {:?}", cg.side_orders(), cg.len(), edge_census(&cg));
    let (weight, set) = cokplex_oracle(&cg, 1, BijectionMode::Allow)?;
    for v in &set {
        println!("  matched {:?}", cg.vertices()[*v].coords);
    }
    println!("common substructure weight {weight}");
    Ok((cg, weight))
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
