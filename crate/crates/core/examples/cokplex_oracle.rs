// Compare the exhaustive polynomial optimum with the branch-and-bound
// co-k-plex oracle on random conflict graphs.
//
// `cargo run --example cokplex_oracle`

use cokplex::qubo::{build_cokplex_pbo, BijectionMode, CokplexOptions};
use cokplex::solve::{cokplex_oracle, exhaustive_optimize, verify_cokplex};
use cokplex::synth::random_conflict_graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> cokplex::Result<Vec<(usize, f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cg = random_conflict_graph(&mut rng, 10, 0.4);
    let mut rows = Vec::new();
    for k in 1..=4 {
        let poly = build_cokplex_pbo(&cg, &CokplexOptions { mode: BijectionMode::Allow, ..CokplexOptions::new(k) })?.poly;
        let exhaustive = exhaustive_optimize(&poly, 24)?;
        let (oracle, set) = cokplex_oracle(&cg, k, BijectionMode::Allow)?;
        assert!(verify_cokplex(&cg, &set, k, BijectionMode::Allow));
        println!(
            "k = {k}: exhaustive {} ({} optima, {:?}), oracle {oracle} with {set:?}",
            exhaustive.best.value, exhaustive.optima_count, exhaustive.elapsed
        );
        rows.push((k, exhaustive.best.value, oracle));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
