//! Weighted κ-NN mutagenicity prediction, stratified cross-validation and
//! parameter sweeps over precomputed similarity matrices.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conflict::Layout;
use crate::error::{Error, Result};
pub use crate::molgraph::ClassLabel;
use crate::molgraph::ReducedGraph;
use crate::qubo::BijectionMode;
use crate::similarity::{
    fingerprint_similarity, similarity, CacheKey, Fingerprint, ScoreCell, SimilarityCache, SimilarityParams,
    SimilarityRow,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub label: ClassLabel,
    pub graph: Option<ReducedGraph>,
    pub fingerprint: Option<Fingerprint>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledCorpus {
    pub entries: Vec<CorpusEntry>,
}

impl LabeledCorpus {
    pub fn new(entries: Vec<CorpusEntry>) -> Result<Self> {
        let mut ids = HashSet::new();
        if let Some(dup) = entries.iter().find(|e| !ids.insert(e.id.as_str())) {
            return Err(Error::Data(format!("duplicate corpus id {:?}", dup.id)));
        }
        Ok(LabeledCorpus { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> Vec<ClassLabel> {
        self.entries.iter().map(|e| e.label).collect()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.id.as_str()).collect()
    }
}

/// A candidate neighbour: its similarity to the query, `None` when unsolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored<'a> {
    pub id: &'a str,
    pub label: ClassLabel,
    pub similarity: Option<f64>,
}

/// Inverse-distance weighted κ-NN vote with `D = 1 − S`.
///
/// Neighbours at distance 0 decide alone by majority. Ties, in the vote or
/// among zero-distance neighbours, go to the positive class; equal distances
/// are ordered by id.
pub fn knn_predict(neighbours: &[Scored<'_>], kappa: usize) -> Result<ClassLabel> {
    if kappa == 0 || kappa % 2 == 0 {
        return Err(Error::InvalidParameter(format!("kappa must be an odd positive integer, got {kappa}")));
    }
    let mut scored: Vec<(f64, &str, ClassLabel)> = neighbours
        .iter()
        .filter_map(|n| n.similarity.map(|s| ((1.0 - s).max(0.0), n.id, n.label)))
        .collect();
    if scored.len() < kappa {
        return Err(Error::Abstain { available: scored.len(), needed: kappa });
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));

    let zero: Vec<ClassLabel> = scored.iter().take_while(|n| n.0 == 0.0).map(|n| n.2).collect();
    if !zero.is_empty() {
        let positives = zero.iter().filter(|l| l.is_positive()).count();
        return Ok(if 2 * positives >= zero.len() { ClassLabel::Mutagen } else { ClassLabel::NonMutagen });
    }

    let (mut pos, mut neg) = (0.0, 0.0);
    for &(d, _, label) in &scored[..kappa] {
        if label.is_positive() {
            pos += 1.0 / d;
        } else {
            neg += 1.0 / d;
        }
    }
    Ok(if pos >= neg { ClassLabel::Mutagen } else { ClassLabel::NonMutagen })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, truth: ClassLabel, predicted: ClassLabel) {
        match (truth.is_positive(), predicted.is_positive()) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }
}

/// The four rates; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

impl Metrics {
    fn values(&self) -> [Option<f64>; 4] {
        [self.accuracy, self.precision, self.sensitivity, self.specificity]
    }

    fn from_values(v: [Option<f64>; 4]) -> Self {
        Metrics { accuracy: v[0], precision: v[1], sensitivity: v[2], specificity: v[3] }
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &ConfusionCounts) -> Result<Metrics> {
    if c.total() == 0 {
        return Err(Error::InvalidParameter("no evaluated queries".into()));
    }
    Ok(Metrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision: ratio(c.tp, c.tp + c.fp),
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub counts: ConfusionCounts,
    pub abstentions: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub folds: Vec<FoldResult>,
    /// Mean over folds where the metric is defined.
    pub mean: Metrics,
    /// Sample standard deviation over folds divided by √folds.
    pub std_error: Metrics,
    pub pooled: ConfusionCounts,
    pub abstentions: usize,
}

fn summarise(folds: &[FoldResult]) -> (Metrics, Metrics) {
    let mut mean = [None; 4];
    let mut se = [None; 4];
    for m in 0..4 {
        let vals: Vec<f64> = folds.iter().filter_map(|f| f.metrics.values()[m]).collect();
        if vals.is_empty() {
            continue;
        }
        let n = vals.len() as f64;
        let mu = vals.iter().sum::<f64>() / n;
        mean[m] = Some(mu);
        if vals.len() > 1 {
            let var = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1.0);
            se[m] = Some((var / n).sqrt());
        }
    }
    (Metrics::from_values(mean), Metrics::from_values(se))
}

/// Symmetric pairwise similarities; `None` marks skipped pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    cells: Vec<Option<f64>>,
}

impl SimilarityMatrix {
    pub fn new(n: usize) -> Self {
        SimilarityMatrix { n, cells: vec![None; n * n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Option<f64>) {
        self.cells[i * self.n + j] = v;
        self.cells[j * self.n + i] = v;
    }

    pub fn solved_pairs(&self) -> usize {
        (0..self.n).map(|i| (i + 1..self.n).filter(|&j| self.get(i, j).is_some()).count()).sum()
    }

    pub fn total_pairs(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn skipped_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j).is_none())
            .collect()
    }
}

/// Fold index per item: each class is shuffled with `seed` and dealt round
/// robin, positives first, so fold class counts differ by at most one.
pub fn stratified_folds(labels: &[ClassLabel], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_positive()).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i].is_positive()).collect();
    if pos.len() < folds || neg.len() < folds {
        return Err(Error::Data(format!(
            "stratified {folds}-fold split needs {folds} items per class, have {} mutagens and {} non-mutagens",
            pos.len(),
            neg.len()
        )));
    }
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold_of = vec![0; labels.len()];
    for (slot, &i) in pos.iter().chain(&neg).enumerate() {
        fold_of[i] = slot % folds;
    }
    Ok(fold_of)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub kappa: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 5, kappa: 3, seed: 0 }
    }
}

/// Stratified k-fold cross-validation of the κ-NN classifier over a
/// precomputed similarity matrix. Mutagen is the positive class.
pub fn cross_validate(
    ids: &[&str],
    labels: &[ClassLabel],
    matrix: &SimilarityMatrix,
    cfg: &CvConfig,
) -> Result<MetricsReport> {
    if ids.len() != labels.len() || matrix.len() != labels.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: matrix.len() });
    }
    let fold_of = stratified_folds(labels, cfg.folds, cfg.seed)?;
    for f in 0..cfg.folds {
        let train: HashSet<ClassLabel> = (0..labels.len()).filter(|&i| fold_of[i] != f).map(|i| labels[i]).collect();
        if train.len() < 2 {
            return Err(Error::Data(format!("training split for fold {f} lacks a class")));
        }
    }

    let folds: Vec<FoldResult> = (0..cfg.folds)
        .into_par_iter()
        .map(|f| -> Result<FoldResult> {
            let mut counts = ConfusionCounts::default();
            let mut abstentions = 0;
            for q in (0..labels.len()).filter(|&i| fold_of[i] == f) {
                let neighbours: Vec<Scored<'_>> = (0..labels.len())
                    .filter(|&j| fold_of[j] != f)
                    .map(|j| Scored { id: ids[j], label: labels[j], similarity: matrix.get(q, j) })
                    .collect();
                match knn_predict(&neighbours, cfg.kappa) {
                    Ok(pred) => counts.record(labels[q], pred),
                    Err(Error::Abstain { .. }) => abstentions += 1,
                    Err(e) => return Err(e),
                }
            }
            let metrics = if counts.total() > 0 { metrics(&counts)? } else { Metrics::default() };
            Ok(FoldResult { counts, abstentions, metrics })
        })
        .collect::<Result<_>>()?;

    let mut pooled = ConfusionCounts::default();
    folds.iter().for_each(|f| pooled.merge(&f.counts));
    let (mean, std_error) = summarise(&folds);
    Ok(MetricsReport { abstentions: folds.iter().map(|f| f.abstentions).sum(), folds, mean, std_error, pooled })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Graph,
    Fingerprint,
}

/// Fingerprint similarities for every pair.
pub fn fingerprint_matrix(corpus: &LabeledCorpus) -> Result<SimilarityMatrix> {
    let fps = corpus
        .entries
        .iter()
        .map(|e| e.fingerprint.as_ref().ok_or_else(|| Error::Data(format!("{}: no fingerprint", e.id))))
        .collect::<Result<Vec<_>>>()?;
    let mut m = SimilarityMatrix::new(fps.len());
    for i in 0..fps.len() {
        for j in i + 1..fps.len() {
            m.set(i, j, Some(fingerprint_similarity(fps[i], fps[j])?));
        }
    }
    Ok(m)
}

/// Graph similarity matrices for one `(layout, d_t, k, mode)` setting, one per
/// δ in `deltas`. Pairs already in `cache` are reused; the rest are solved in
/// parallel and appended to the cache.
pub fn graph_matrices(
    corpus: &LabeledCorpus,
    params: &SimilarityParams,
    deltas: &[f64],
    cache: &mut SimilarityCache,
) -> Result<Vec<SimilarityMatrix>> {
    let graphs = corpus
        .entries
        .iter()
        .map(|e| e.graph.as_ref().ok_or_else(|| Error::Data(format!("{}: no reduced graph", e.id))))
        .collect::<Result<Vec<_>>>()?;
    let n = graphs.len();
    let at = |delta: f64| SimilarityParams { delta, ..*params };
    for &delta in deltas {
        at(delta).validate()?;
    }
    let ids = corpus.ids();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let missing: Vec<(usize, usize)> = pairs
        .iter()
        .copied()
        .filter(|&(i, j)| deltas.iter().any(|&d| !cache.contains(&CacheKey::new(ids[i], ids[j], &at(d)))))
        .collect();

    let rows: Vec<Vec<SimilarityRow>> = missing
        .par_iter()
        .map(|&(i, j)| -> Result<Vec<SimilarityRow>> {
            let base = similarity(graphs[i], graphs[j], params)?;
            Ok(deltas
                .iter()
                .map(|&delta| SimilarityRow {
                    left: ids[i].to_string(),
                    right: ids[j].to_string(),
                    layout: params.layout.index(),
                    d_t: params.layout.d_t,
                    k: params.k,
                    delta,
                    mode: params.mode,
                    variant: params.variant(),
                    score: ScoreCell::from_option(base.with_delta(delta, params.count, graphs[i], graphs[j]).score),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    cache.note_computed(rows.len());
    cache.extend(rows.into_iter().flatten().collect())?;

    deltas
        .iter()
        .map(|&delta| {
            let p = at(delta);
            let mut m = SimilarityMatrix::new(n);
            for &(i, j) in &pairs {
                let v = cache
                    .get(&CacheKey::new(ids[i], ids[j], &p))
                    .ok_or_else(|| Error::Data("similarity cache lost a row".into()))?;
                m.set(i, j, v);
            }
            Ok(m)
        })
        .collect()
}

/// Cross-validation of one parameter setting.
pub fn evaluate(
    corpus: &LabeledCorpus,
    method: Method,
    params: &SimilarityParams,
    cfg: &CvConfig,
    cache: &mut SimilarityCache,
) -> Result<MetricsReport> {
    let matrix = match method {
        Method::Graph => graph_matrices(corpus, params, &[params.delta], cache)?.remove(0),
        Method::Fingerprint => fingerprint_matrix(corpus)?,
    };
    cross_validate(&corpus.ids(), &corpus.labels(), &matrix, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub layouts: Vec<u8>,
    #[serde(with = "thresholds_serde")]
    pub d_t: Vec<f64>,
    pub k: Vec<usize>,
    pub delta: Vec<f64>,
}

mod thresholds_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrapped(#[serde(with = "crate::threshold_serde")] f64);

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| Wrapped(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Wrapped>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

impl Default for SweepGrid {
    /// All 16 layouts, d_t ∈ {0, 0.5, 1, 1.5, 5, 10}, k ∈ 1..=5, δ ∈ {0.3, 0.4, 0.5}.
    fn default() -> Self {
        SweepGrid {
            layouts: (0..16).collect(),
            d_t: vec![0.0, 0.5, 1.0, 1.5, 5.0, 10.0],
            k: (1..=5).collect(),
            delta: vec![0.3, 0.4, 0.5],
        }
    }
}

impl SweepGrid {
    pub fn cells(&self) -> usize {
        self.layouts.len() * self.d_t.len() * self.k.len() * self.delta.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub layout: u8,
    #[serde(with = "crate::threshold_serde")]
    pub d_t: f64,
    pub k: usize,
    pub delta: f64,
    pub mode: BijectionMode,
    pub pairs_solved: usize,
    pub pairs_total: usize,
    pub report: MetricsReport,
}

/// Cross-validates every grid cell. With `reduced_pairs`, any pair skipped
/// in some cell is dropped from every cell, so all rows share one pair set.
pub fn sweep(
    corpus: &LabeledCorpus,
    base: &SimilarityParams,
    grid: &SweepGrid,
    cfg: &CvConfig,
    reduced_pairs: bool,
    cache: &mut SimilarityCache,
) -> Result<Vec<SweepRow>> {
    if grid.cells() == 0 {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    let mut cells = Vec::with_capacity(grid.cells());
    for &layout_index in &grid.layouts {
        for &d_t in &grid.d_t {
            let layout = Layout::from_index(layout_index, d_t)?;
            for &k in &grid.k {
                let params = SimilarityParams { layout, k, ..*base };
                let matrices = graph_matrices(corpus, &params, &grid.delta, cache)?;
                for (&delta, m) in grid.delta.iter().zip(matrices) {
                    cells.push((SimilarityParams { delta, ..params }, m));
                }
            }
        }
    }

    if reduced_pairs {
        let excluded: HashSet<(usize, usize)> = cells.iter().flat_map(|(_, m)| m.skipped_pairs()).collect();
        for (_, m) in cells.iter_mut() {
            excluded.iter().for_each(|&(i, j)| m.set(i, j, None));
        }
    }

    let ids = corpus.ids();
    let labels = corpus.labels();
    cells
        .into_iter()
        .map(|(p, m)| {
            Ok(SweepRow {
                layout: p.layout.index(),
                d_t: p.layout.d_t,
                k: p.k,
                delta: p.delta,
                mode: p.mode,
                pairs_solved: m.solved_pairs(),
                pairs_total: m.total_pairs(),
                report: cross_validate(&ids, &labels, &m, cfg)?,
            })
        })
        .collect()
}

fn cell(v: Option<f64>, se: Option<f64>) -> String {
    match (v, se) {
        (Some(v), Some(se)) => format!("{v:.3}±{se:.3}"),
        (Some(v), None) => format!("{v:.3}"),
        _ => "-".into(),
    }
}

/// Aligned text table, one line per sweep row.
pub fn render_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>6} {:>3} {:>5} {:>13} {:>13} {:>13} {:>13} {:>11}",
        "layout", "d_t", "k", "delta", "accuracy", "precision", "sensitivity", "specificity", "pairs"
    );
    for r in rows {
        let (m, s) = (&r.report.mean, &r.report.std_error);
        let _ = writeln!(
            out,
            "{:>6} {:>6} {:>3} {:>5} {:>13} {:>13} {:>13} {:>13} {:>11}",
            r.layout,
            r.d_t,
            r.k,
            r.delta,
            cell(m.accuracy, s.accuracy),
            cell(m.precision, s.precision),
            cell(m.sensitivity, s.sensitivity),
            cell(m.specificity, s.specificity),
            format!("{}/{}", r.pairs_solved, r.pairs_total),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::{Mutagen as M, NonMutagen as N};

    fn scored<'a>(items: &[(&'a str, ClassLabel, Option<f64>)]) -> Vec<Scored<'a>> {
        items.iter().map(|&(id, label, similarity)| Scored { id, label, similarity }).collect()
    }

    #[test]
    fn nearest_neighbour_vote() {
        let n = scored(&[("a", M, Some(0.9)), ("b", N, Some(0.1))]);
        assert_eq!(knn_predict(&n, 1).unwrap(), M);
    }

    #[test]
    fn inverse_distance_weights() {
        // D = 0.2, 0.4, 0.5 → weights 5 vs 2.5 + 2
        let n = scored(&[("a", M, Some(0.8)), ("b", N, Some(0.6)), ("c", N, Some(0.5)), ("d", N, Some(0.0))]);
        assert_eq!(knn_predict(&n, 3).unwrap(), M);
        let n = scored(&[("a", M, Some(0.5)), ("b", N, Some(0.6)), ("c", N, Some(0.6))]);
        assert_eq!(knn_predict(&n, 3).unwrap(), N);
    }

    #[test]
    fn zero_distance_short_circuit() {
        let n = scored(&[("a", M, Some(1.0)), ("b", N, Some(0.99)), ("c", N, Some(0.99))]);
        assert_eq!(knn_predict(&n, 3).unwrap(), M);
        let n = scored(&[("a", M, Some(1.0)), ("b", N, Some(1.0)), ("c", N, Some(1.0))]);
        assert_eq!(knn_predict(&n, 3).unwrap(), N);
        let n = scored(&[("a", M, Some(1.0)), ("b", N, Some(1.0)), ("c", N, Some(0.2))]);
        assert_eq!(knn_predict(&n, 3).unwrap(), M);
    }

    #[test]
    fn exact_tie_goes_positive() {
        let n = scored(&[("a", M, Some(0.5)), ("b", N, Some(0.5)), ("c", M, Some(0.1)), ("d", N, Some(0.1))]);
        assert_eq!(knn_predict(&n, 1).unwrap(), M);
    }

    #[test]
    fn abstains_and_rejects_even_kappa() {
        let n = scored(&[("a", M, Some(0.5)), ("b", N, None), ("c", N, None)]);
        assert!(matches!(knn_predict(&n, 3), Err(Error::Abstain { available: 1, needed: 3 })));
        assert!(knn_predict(&n, 2).is_err());
    }

    #[test]
    fn order_invariance() {
        let items = [("a", M, Some(0.7)), ("b", N, Some(0.7)), ("c", N, Some(0.6)), ("d", M, Some(0.6)), ("e", M, Some(0.1))];
        let mut n = scored(&items);
        let first = knn_predict(&n, 3).unwrap();
        n.reverse();
        assert_eq!(knn_predict(&n, 3).unwrap(), first);
        n.swap(0, 3);
        assert_eq!(knn_predict(&n, 3).unwrap(), first);
    }

    #[test]
    fn metric_examples() {
        let all = metrics(&ConfusionCounts { tp: 1, tn: 1, fp: 0, fn_: 0 }).unwrap();
        assert_eq!(all.values(), [Some(1.0); 4]);
        let half = metrics(&ConfusionCounts { tp: 40, fn_: 10, tn: 0, fp: 0 }).unwrap();
        assert_eq!(half.sensitivity, Some(0.8));
        assert_eq!(half.specificity, None);
        let m = metrics(&ConfusionCounts { tp: 76, fp: 24, tn: 70, fn_: 30 }).unwrap();
        assert!((m.accuracy.unwrap() - 0.73).abs() < 1e-12);
        assert!((m.precision.unwrap() - 0.76).abs() < 1e-12);
        assert!(metrics(&ConfusionCounts::default()).is_err());
    }

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<ClassLabel> = (0..10).map(|i| if i < 5 { M } else { N }).collect();
        let folds = stratified_folds(&labels, 5, 3).unwrap();
        for f in 0..5 {
            let members: Vec<usize> = (0..10).filter(|&i| folds[i] == f).collect();
            assert_eq!(members.len(), 2);
            assert_eq!(members.iter().filter(|&&i| labels[i] == M).count(), 1);
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 3).unwrap());
        assert!(stratified_folds(&labels[..8], 5, 3).is_err());
        assert!(stratified_folds(&labels, 1, 3).is_err());
    }

    #[test]
    fn cross_validation_on_block_matrix() {
        let labels: Vec<ClassLabel> = (0..20).map(|i| if i % 2 == 0 { M } else { N }).collect();
        let names: Vec<String> = (0..20).map(|i| format!("m{i:02}")).collect();
        let ids: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut m = SimilarityMatrix::new(20);
        for i in 0..20 {
            for j in i + 1..20 {
                m.set(i, j, Some(if labels[i] == labels[j] { 0.9 } else { 0.2 }));
            }
        }
        let cfg = CvConfig::default();
        let report = cross_validate(&ids, &labels, &m, &cfg).unwrap();
        assert_eq!(report.pooled.total(), 20);
        assert_eq!(report.mean.accuracy, Some(1.0));
        assert_eq!(report.std_error.accuracy, Some(0.0));
        assert_eq!(report, cross_validate(&ids, &labels, &m, &cfg).unwrap());

        // every pair unsolved: everything abstains
        let empty = SimilarityMatrix::new(20);
        let r = cross_validate(&ids, &labels, &empty, &cfg).unwrap();
        assert_eq!((r.abstentions, r.pooled.total()), (20, 0));
    }

    #[test]
    fn table_has_one_line_per_row() {
        let report = MetricsReport {
            folds: vec![],
            mean: Metrics { accuracy: Some(0.75), ..Default::default() },
            std_error: Metrics::default(),
            pooled: ConfusionCounts::default(),
            abstentions: 0,
        };
        let row = SweepRow { layout: 7, d_t: 1.5, k: 3, delta: 0.4, mode: BijectionMode::Allow, pairs_solved: 3, pairs_total: 6, report };
        let table = render_table(&[row.clone(), row]);
        assert_eq!(table.lines().count(), 3);
        assert!(table.contains("0.750"));
    }
}
