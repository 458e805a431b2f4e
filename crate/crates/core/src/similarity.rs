//! Graph similarity from an optimal co-k-plex of the conflict graph, and the
//! fingerprint baseline.
//!
//! The score is `δ·max(r₁, r₂) + (1 − δ)·min(r₁, r₂)`, where `rᵢ` is the share
//! of graph `i`'s vertices that appear in the selected pairings.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::conflict::{
    build_conflict_graph_with, edge_census, pairing_count, ConflictOptions, EdgeCensus, Layout, WeightScheme,
};
use crate::error::{Error, Result};
use crate::molgraph::ReducedGraph;
use crate::qubo::{build_cokplex_pbo, BijectionMode, CokplexOptions, PenaltyRule, StarMode};
use crate::solve::{exhaustive_optimize_with, ExhaustiveOptions, DEFAULT_KEEP_OPTIMA, DEFAULT_SOLVER_CAP};

/// How a graph's contribution `rᵢ` is measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountScheme {
    /// Distinct matched vertices over the vertex count.
    #[default]
    Vertices,
    /// Weight of distinct matched vertices over total weight (atom count).
    AtomWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams {
    pub layout: Layout,
    pub k: usize,
    pub delta: f64,
    pub mode: BijectionMode,
    pub rule: PenaltyRule,
    pub star: StarMode,
    pub weights: WeightScheme,
    pub count: CountScheme,
    /// Conflict graphs with more vertices than this are skipped.
    pub solver_cap: usize,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams {
            layout: Layout::default(),
            k: 1,
            delta: 0.5,
            mode: BijectionMode::Allow,
            rule: PenaltyRule::MinPlusOne,
            star: StarMode::Containment,
            weights: WeightScheme::Label,
            count: CountScheme::Vertices,
            solver_cap: DEFAULT_SOLVER_CAP,
        }
    }
}

impl SimilarityParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidParameter(format!("delta must lie in [0, 1], got {}", self.delta)));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        self.layout.validate()
    }

    /// Options that change scores but are not cache-row columns, as
    /// `name=value` pairs joined by `;`. Empty when all are at their defaults.
    pub fn variant(&self) -> String {
        fn name<T: Serialize>(v: &T) -> String {
            serde_json::to_string(v).unwrap_or_default().trim_matches('"').to_string()
        }
        let d = SimilarityParams::default();
        let mut parts = Vec::new();
        if self.rule != d.rule {
            parts.push(match self.rule {
                PenaltyRule::Explicit(a) => format!("penalty={a}"),
                PenaltyRule::MinPlusOne => "penalty=min_plus_one".to_string(),
            });
        }
        if self.star != d.star {
            parts.push(format!("star={}", name(&self.star)));
        }
        if self.weights != d.weights {
            parts.push(format!("weights={}", name(&self.weights)));
        }
        if self.count != d.count {
            parts.push(format!("count={}", name(&self.count)));
        }
        if self.solver_cap != d.solver_cap {
            parts.push(format!("cap={}", self.solver_cap));
        }
        parts.join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    /// `None` when skipped.
    pub score: Option<f64>,
    pub delta: f64,
    pub distinct_left: usize,
    pub distinct_right: usize,
    pub left_order: usize,
    pub right_order: usize,
    pub selected_pairs: Vec<(usize, usize)>,
    pub skipped: bool,
    /// Optimal objective value of the co-k-plex polynomial.
    pub objective: Option<f64>,
    pub conflict_vertices: usize,
    pub census: EdgeCensus,
    pub optima_count: u64,
}

impl SimilarityResult {
    /// Rescores the same selection with another δ.
    pub fn with_delta(&self, delta: f64, count: CountScheme, left: &ReducedGraph, right: &ReducedGraph) -> Self {
        let mut out = self.clone();
        out.delta = delta;
        if !self.skipped {
            let (r1, r2) = ratios(&self.selected_pairs, left, right, count);
            out.score = Some(combine(delta, r1, r2));
        }
        out
    }
}

/// `δ·max(r₁, r₂) + (1 − δ)·min(r₁, r₂)`.
pub fn combine(delta: f64, r1: f64, r2: f64) -> f64 {
    delta * r1.max(r2) + (1.0 - delta) * r1.min(r2)
}

fn distinct_sides(pairs: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut left: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let mut right: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    left.sort_unstable();
    left.dedup();
    right.sort_unstable();
    right.dedup();
    (left, right)
}

fn ratios(pairs: &[(usize, usize)], g: &ReducedGraph, g2: &ReducedGraph, count: CountScheme) -> (f64, f64) {
    let (left, right) = distinct_sides(pairs);
    let share = |ids: &[usize], graph: &ReducedGraph| match count {
        CountScheme::Vertices => ids.len() as f64 / graph.order() as f64,
        CountScheme::AtomWeighted => {
            ids.iter().map(|&v| graph.vertices[v].weight as f64).sum::<f64>() / graph.total_weight() as f64
        }
    };
    (share(&left, g), share(&right, g2))
}

/// Structural key used to orient a pair; names are ignored.
fn canonical_key(g: &ReducedGraph) -> String {
    serde_json::to_string(&(&g.vertices, &g.edges)).expect("graph serializes")
}

/// Similarity of two reduced graphs under `params`.
///
/// The pair is solved in a fixed orientation (by a structural key), so
/// `similarity(a, b)` and `similarity(b, a)` solve the same problem. Among
/// optimal selections the one covering the most distinct vertices wins when
/// the optimum set is small enough to enumerate.
pub fn similarity(g: &ReducedGraph, g2: &ReducedGraph, params: &SimilarityParams) -> Result<SimilarityResult> {
    params.validate()?;
    let swap = canonical_key(g) > canonical_key(g2);
    let (a, b) = if swap { (g2, g) } else { (g, g2) };

    let mut result = SimilarityResult {
        score: None,
        delta: params.delta,
        distinct_left: 0,
        distinct_right: 0,
        left_order: a.order(),
        right_order: b.order(),
        selected_pairs: Vec::new(),
        skipped: true,
        objective: None,
        conflict_vertices: pairing_count(a, b, &params.layout),
        census: EdgeCensus::default(),
        optima_count: 0,
    };

    if result.conflict_vertices <= params.solver_cap {
        let opts = ConflictOptions::new(params.layout).weights(params.weights);
        let cg = build_conflict_graph_with(&[a, b], &opts)?;
        let poly = build_cokplex_pbo(
            &cg,
            &CokplexOptions { k: params.k, mode: params.mode, rule: params.rule, star: params.star, ..CokplexOptions::new(params.k) },
        )?
        .poly;
        let report = exhaustive_optimize_with(
            &poly,
            &ExhaustiveOptions { cap: params.solver_cap, keep_optima: DEFAULT_KEEP_OPTIMA },
        )?;
        let to_pairs = |bits: &[bool]| -> Vec<(usize, usize)> {
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| cg.vertices()[i].pair()).collect()
        };
        let mut pairs = to_pairs(&report.best.bits);
        let coverage = |p: &[(usize, usize)]| {
            let (l, r) = distinct_sides(p);
            l.len() + r.len()
        };
        let mut best_cover = coverage(&pairs);
        for bits in &report.optima {
            let cand = to_pairs(bits);
            let cover = coverage(&cand);
            if cover > best_cover {
                best_cover = cover;
                pairs = cand;
            }
        }
        let (left, right) = distinct_sides(&pairs);
        let (r1, r2) = ratios(&pairs, a, b, params.count);
        result.score = Some(combine(params.delta, r1, r2));
        result.distinct_left = left.len();
        result.distinct_right = right.len();
        result.selected_pairs = pairs;
        result.skipped = false;
        result.objective = Some(report.best.value);
        result.census = edge_census(&cg);
        result.optima_count = report.optima_count;
    } else {
        log::debug!(
            "skipping {} vs {}: {} pairings exceed the cap of {}",
            a.name,
            b.name,
            result.conflict_vertices,
            params.solver_cap
        );
    }

    if swap {
        std::mem::swap(&mut result.distinct_left, &mut result.distinct_right);
        std::mem::swap(&mut result.left_order, &mut result.right_order);
        result.selected_pairs.iter_mut().for_each(|p| *p = (p.1, p.0));
        result.selected_pairs.sort_unstable();
    }
    Ok(result)
}

pub const MACCS_BITS: usize = 166;

/// Fixed-length molecular bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    bits: Vec<bool>,
}

impl Fingerprint {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("fingerprint length must be positive".into()));
        }
        Ok(Fingerprint { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Parses a hex string, most significant bit first. `len` trims the
    /// trailing padding bits, which must be zero.
    pub fn from_hex(hex: &str, len: Option<usize>) -> Result<Self> {
        let hex = hex.trim();
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let d = c
                .to_digit(16)
                .ok_or_else(|| Error::Schema(format!("invalid hex digit {c:?} in fingerprint")))?;
            (0..4).rev().for_each(|i| bits.push(d >> i & 1 == 1));
        }
        if let Some(len) = len {
            if len > bits.len() || bits.len() - len >= 4 {
                return Err(Error::Schema(format!("fingerprint length {len} does not fit {} hex digits", hex.len())));
            }
            if bits[len..].iter().any(|b| *b) {
                return Err(Error::Schema("fingerprint padding bits must be zero".into()));
            }
            bits.truncate(len);
        }
        Fingerprint::new(bits)
    }

    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|chunk| {
                let d = (0..4).fold(0u32, |acc, i| acc << 1 | chunk.get(i).copied().unwrap_or(false) as u32);
                std::char::from_digit(d, 16).expect("nibble")
            })
            .collect()
    }
}

/// `1 − ‖f₁ − f₂‖₂ / √len`.
pub fn fingerprint_similarity(f1: &Fingerprint, f2: &Fingerprint) -> Result<f64> {
    if f1.len() != f2.len() {
        return Err(Error::LengthMismatch { left: f1.len(), right: f2.len() });
    }
    let differing = f1.bits.iter().zip(&f2.bits).filter(|(a, b)| a != b).count();
    Ok(1.0 - (differing as f64).sqrt() / (f1.len() as f64).sqrt())
}

/// One persisted similarity value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRow {
    pub left: String,
    pub right: String,
    pub layout: u8,
    #[serde(with = "crate::threshold_serde")]
    pub d_t: f64,
    pub k: usize,
    pub delta: f64,
    #[serde(default)]
    pub mode: BijectionMode,
    /// Non-default solver options; see [`SimilarityParams::variant`].
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub variant: String,
    pub score: ScoreCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScoreCell {
    Score(f64),
    Skipped(SkippedTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkippedTag {
    Skipped,
}

impl ScoreCell {
    pub fn from_option(score: Option<f64>) -> Self {
        score.map_or(ScoreCell::Skipped(SkippedTag::Skipped), ScoreCell::Score)
    }

    pub fn score(self) -> Option<f64> {
        match self {
            ScoreCell::Score(s) => Some(s),
            ScoreCell::Skipped(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub left: String,
    pub right: String,
    pub layout: u8,
    pub d_t_bits: u64,
    pub k: usize,
    pub delta_bits: u64,
    pub mode: BijectionMode,
    pub variant: String,
}

impl CacheKey {
    /// Unordered in the two ids.
    pub fn new(left: &str, right: &str, params: &SimilarityParams) -> Self {
        let (l, r) = if left <= right { (left, right) } else { (right, left) };
        CacheKey {
            left: l.to_string(),
            right: r.to_string(),
            layout: params.layout.index(),
            d_t_bits: params.layout.d_t.to_bits(),
            k: params.k,
            delta_bits: params.delta.to_bits(),
            mode: params.mode,
            variant: params.variant(),
        }
    }

    fn from_row(row: &SimilarityRow) -> Self {
        let (l, r) = if row.left <= row.right { (&row.left, &row.right) } else { (&row.right, &row.left) };
        CacheKey {
            left: l.clone(),
            right: r.clone(),
            layout: row.layout,
            d_t_bits: row.d_t.to_bits(),
            k: row.k,
            delta_bits: row.delta.to_bits(),
            mode: row.mode,
            variant: row.variant.clone(),
        }
    }
}

/// Similarity scores keyed by unordered pair and parameters, optionally
/// backed by an append-only JSON-lines file.
#[derive(Debug, Default)]
pub struct SimilarityCache {
    path: Option<PathBuf>,
    scores: HashMap<CacheKey, Option<f64>>,
    computed: AtomicUsize,
}

impl SimilarityCache {
    pub fn in_memory() -> Self {
        SimilarityCache::default()
    }

    /// Loads existing rows from `path` (if present); new rows are appended there.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut scores = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: SimilarityRow = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(i + 1, e.to_string()).in_file(&path))?;
                scores.insert(CacheKey::from_row(&row), row.score.score());
            }
        }
        Ok(SimilarityCache { path: Some(path), scores, computed: AtomicUsize::new(0) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<Option<f64>> {
        self.scores.get(key).copied()
    }

    pub fn contains(&self, key: &CacheKey) -> bool {
        self.scores.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Number of pair solves recorded through [`SimilarityCache::note_computed`].
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn note_computed(&self, n: usize) {
        self.computed.fetch_add(n, Ordering::Relaxed);
    }

    /// Inserts rows and appends them to the backing file. Single writer.
    pub fn extend(&mut self, rows: Vec<SimilarityRow>) -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut out = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
            for row in &rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
        for row in rows {
            self.scores.insert(CacheKey::from_row(&row), row.score.score());
        }
        Ok(())
    }
}
