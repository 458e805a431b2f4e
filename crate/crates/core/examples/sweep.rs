// Sweep layouts, distance thresholds and k on a planted corpus and print
// the metrics table. Rerunning against the same cache solves nothing new.
//
// `cargo run --release --example sweep`

use cokplex::classify::{render_table, sweep, CvConfig, SweepGrid, SweepRow};
use cokplex::similarity::{SimilarityCache, SimilarityParams};
use cokplex::synth::planted_corpus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> cokplex::Result<(Vec<SweepRow>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let corpus = planted_corpus(&mut rng, 6)?;
    let grid = SweepGrid { layouts: vec![0, 9, 15], d_t: vec![0.5, 1.5, f64::INFINITY], k: vec![1, 3], delta: vec![0.3, 0.4] };
    let cfg = CvConfig { folds: 3, kappa: 3, seed: 0 };
    let mut cache = SimilarityCache::in_memory();
    let rows = sweep(&corpus, &SimilarityParams::default(), &grid, &cfg, true, &mut cache)?;
    print!("{}", render_table(&rows));
    let first = cache.computed();
    sweep(&corpus, &SimilarityParams::default(), &grid, &cfg, true, &mut cache)?;
    let recomputed = cache.computed() - first;
    println!("{} rows; {first} pair solves, {recomputed} on the cached rerun", rows.len());
    Ok((rows, recomputed))
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
