// Score two molecules across relaxation levels k and weightings δ.
//
// `cargo run --example pair_similarity`

use cokplex::conflict::Layout;
use cokplex::molgraph::{parse_molfile, reduce};
use cokplex::qubo::BijectionMode;
use cokplex::similarity::{similarity, SimilarityParams, SimilarityResult};

const LEFT: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/nitrobenzene_charged.mol"));
const RIGHT: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/naphthylammonium.mol"));

pub fn run_example() -> cokplex::Result<Vec<SimilarityResult>> {
    let g = reduce(&parse_molfile(LEFT)?)?;
    let h = reduce(&parse_molfile(RIGHT)?)?;
    let mut results = Vec::new();
    println!("{:>2} {:>7} {:>5} {:>9} {:>8}", "k", "mode", "delta", "objective", "score");
    for k in 1..=3 {
        for mode in [BijectionMode::Allow, BijectionMode::Forbid] {
            for delta in [0.3, 0.5] {
                let params = SimilarityParams { layout: Layout::default(), k, delta, mode, ..Default::default() };
                let r = similarity(&g, &h, &params)?;
                println!(
                    "{k:>2} {:>7} {delta:>5} {:>9} {:>8.4}",
                    format!("{mode:?}"),
                    r.objective.unwrap_or(f64::NAN),
                    r.score.unwrap_or(f64::NAN)
                );
                results.push(r);
            }
        }
    }
    Ok(results)
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
