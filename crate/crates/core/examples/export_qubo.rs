// Build the co-k-plex polynomial of a conflict graph, quadratize it and
// export the QUBO, then check that solving the QUBO recovers the optimum.
//
// `cargo run --example export_qubo`

use cokplex::qubo::{build_cokplex_pbo, export_qubo, quadratize, CokplexOptions, QuboRecord};
use cokplex::solve::exhaustive_optimize;
use cokplex::synth::random_conflict_graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> cokplex::Result<(QuboRecord, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cg = random_conflict_graph(&mut rng, 7, 0.5);
    let pbo = build_cokplex_pbo(&cg, &CokplexOptions::new(3))?;
    println!("co-3-plex polynomial: {} terms, degree {}", pbo.poly.num_terms(), pbo.poly.degree());
    let quad = quadratize(&pbo.poly);
    println!("quadratized: {} variables ({} ancillas), penalty weight {}", quad.poly.num_vars(), quad.ancilla_map.len(), quad.penalty_weight);
    let record = export_qubo(&quad.poly)?;
    println!("{}", serde_json::to_string(&record)?);

    let source = exhaustive_optimize(&pbo.poly, 24)?;
    let restored = record.to_polynomial()?;
    let lifted = restored.evaluate(&quad.lift(&source.best.bits));
    println!("source optimum {}, QUBO value at the lifted optimum {}", source.best.value, lifted);
    Ok((record, source.best.value, lifted))
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
