// Five-fold cross-validation of the 3-NN classifier on a planted corpus,
// with the graph similarity and a fingerprint baseline.
//
// `cargo run --release --example crossval`

use cokplex::classify::{cross_validate, evaluate, CvConfig, Method, MetricsReport};
use cokplex::conflict::Layout;
use cokplex::similarity::{fingerprint_similarity, Fingerprint, SimilarityCache, SimilarityParams, MACCS_BITS};
use cokplex::synth::planted_corpus;
use cokplex::classify::SimilarityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> cokplex::Result<(MetricsReport, MetricsReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let corpus = planted_corpus(&mut rng, 10)?;
    let params = SimilarityParams { layout: Layout::from_index(9, 1.5)?, k: 3, delta: 0.4, ..Default::default() };
    let cfg = CvConfig { folds: 5, kappa: 3, seed: 1 };
    let mut cache = SimilarityCache::in_memory();
    let graph = evaluate(&corpus, Method::Graph, &params, &cfg, &mut cache)?;
    println!("graph method: accuracy {:?} ± {:?}, {} pair scores computed", graph.mean.accuracy, graph.std_error.accuracy, cache.computed());

    // noisy fingerprints around one prototype per class
    let prototypes: Vec<Vec<bool>> = (0..2).map(|_| (0..MACCS_BITS).map(|_| rng.gen_bool(0.5)).collect()).collect();
    let fingerprints = corpus
        .entries
        .iter()
        .map(|e| {
            let proto = &prototypes[usize::from(e.label.is_positive())];
            Fingerprint::new(proto.iter().map(|&b| b ^ rng.gen_bool(0.25)).collect())
        })
        .collect::<cokplex::Result<Vec<_>>>()?;
    let mut matrix = SimilarityMatrix::new(corpus.len());
    for i in 0..corpus.len() {
        for j in i + 1..corpus.len() {
            matrix.set(i, j, Some(fingerprint_similarity(&fingerprints[i], &fingerprints[j])?));
        }
    }
    let fp = cross_validate(&corpus.ids(), &corpus.labels(), &matrix, &cfg)?;
    println!("fingerprint baseline: accuracy {:?}", fp.mean.accuracy);
    println!("{}", serde_json::to_string_pretty(&graph)?);
    Ok((graph, fp))
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
