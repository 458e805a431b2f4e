//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

use std::collections::{BTreeSet, HashSet};
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use cokplex::classify::{
    cross_validate, graph_matrices, metrics, sweep, ConfusionCounts, CvConfig, SweepGrid,
};
use cokplex::conflict::{build_conflict_graph, edge_census, pairing_count, ConflictGraph, Layout};
use cokplex::molgraph::{parse_molfile, reduce, ReducedGraph};
use cokplex::qubo::{
    build_cokplex_pbo, build_mis_qubo, quadratize, BijectionMode, CokplexOptions, PenaltyRule,
    PseudoBooleanPolynomial, QuadratizationResult, Sense,
};
use cokplex::similarity::{similarity, SimilarityCache, SimilarityParams};
use cokplex::solve::{cokplex_oracle, exhaustive_optimize, exhaustive_optimize_with, verify_cokplex, ExhaustiveOptions};
use cokplex::synth::{planted_corpus, random_conflict_graph, random_molecule, random_polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [BijectionMode; 2] = [BijectionMode::Allow, BijectionMode::Forbid];
const DT_GRID: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 5.0, 10.0];
const DELTAS: [f64; 3] = [0.3, 0.4, 0.5];

fn report(id: u32, title: &str, ok: bool, detail: impl AsRef<str>) {
    let status = if ok { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2} [{status}] {title}: {}\n", detail.as_ref());
    // bypass the test harness capture so the line always shows
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// 200 seeded conflict graphs, n ∈ [4, 12], density ∈ [0.1, 0.9].
fn oracle_corpus() -> Vec<ConflictGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(4..=12);
            let density = rng.gen_range(0.1..=0.9);
            random_conflict_graph(&mut rng, n, density)
        })
        .collect()
}

fn cokplex_poly(cg: &ConflictGraph, k: usize, mode: BijectionMode) -> PseudoBooleanPolynomial {
    build_cokplex_pbo(cg, &CokplexOptions { mode, ..CokplexOptions::new(k) }).unwrap().poly
}

/// Random small molecule pairs whose pairing count under `layout` stays
/// within `cap`, so every instance is exactly solvable.
fn molecule_pairs(seed: u64, count: usize, cap: usize) -> Vec<(ReducedGraph, ReducedGraph, Layout)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let g = reduce(&random_molecule(&mut rng, format!("a{i}"), 6)).unwrap();
        let h = reduce(&random_molecule(&mut rng, format!("b{i}"), 6)).unwrap();
        i += 1;
        let layout = Layout::from_index(rng.gen_range(0..16), f64::INFINITY).unwrap();
        let n = pairing_count(&g, &h, &layout);
        if (2..=cap).contains(&n) {
            out.push((g, h, layout));
        }
    }
    out
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut instances = 0;
    let mut mismatches = Vec::new();
    for (i, cg) in oracle_corpus().iter().enumerate() {
        for k in 1..=3 {
            for mode in MODES {
                let exhaustive = exhaustive_optimize(&cokplex_poly(cg, k, mode), 24).unwrap().best.value;
                let (oracle, set) = cokplex_oracle(cg, k, mode).unwrap();
                assert!(verify_cokplex(cg, &set, k, mode));
                instances += 1;
                if exhaustive != oracle {
                    mismatches.push(format!("graph {i} k={k} {mode:?}: {exhaustive} vs {oracle}"));
                }
            }
        }
    }
    let ok = mismatches.is_empty();
    report(
        1,
        "oracle equivalence",
        ok,
        format!("{instances} instances, {} mismatches, {:.1?}", mismatches.len(), start.elapsed()),
    );
    assert!(ok, "{mismatches:?}");
}

/// Exact minimiser of a quadratized polynomial written as `N + Σ M·penᵢ`
/// with every Rosenberg penalty `penᵢ ≥ 0`. Depth-first over the variables
/// in index order (ancillas after their operands), bounding each node by the
/// assigned penalties plus `min(0, c)` for every undecided term of `N`.
struct PenaltyBranchAndBound {
    sign: f64,
    constant: f64,
    terms: Vec<(Vec<usize>, f64)>,
    occurs: Vec<Vec<usize>>,
    ancilla: Vec<Option<(usize, usize)>>,
    m: f64,
    free: Vec<usize>,
    zeros: Vec<usize>,
    bits: Vec<bool>,
    best: f64,
    optima: Vec<Vec<bool>>,
    keep: usize,
}

fn rosenberg(u: bool, v: bool, y: bool) -> f64 {
    let (u, v, y) = (u as i32 as f64, v as i32 as f64, y as i32 as f64);
    u * v - 2.0 * u * y - 2.0 * v * y + 3.0 * y
}

impl PenaltyBranchAndBound {
    fn new(q: &QuadratizationResult, keep: usize) -> Self {
        for mask in 0..8 {
            assert!(rosenberg(mask & 1 != 0, mask & 2 != 0, mask & 4 != 0) >= 0.0);
        }
        let p = &q.poly;
        let sign = if p.sense() == Sense::Minimize { 1.0 } else { -1.0 };
        let n = p.num_vars();
        // N = sign·Q − M·Σ pen, in minimisation form
        let mut rest = PseudoBooleanPolynomial::new(n, Sense::Minimize);
        for (mono, c) in p.terms() {
            rest.add_term(mono, sign * c);
        }
        let m = q.penalty_weight;
        let mut ancilla = vec![None; n];
        for (&y, &(u, v)) in &q.ancilla_map {
            assert!(u < y && v < y, "ancilla {y} defined before its operands");
            ancilla[y] = Some((u, v));
            rest.add_term(&[u, v], -m);
            rest.add_term(&[u, y], 2.0 * m);
            rest.add_term(&[v, y], 2.0 * m);
            rest.add_term(&[y], -3.0 * m);
        }
        let constant = rest.constant();
        let terms: Vec<(Vec<usize>, f64)> =
            rest.terms().filter(|(mono, c)| !mono.is_empty() && *c != 0.0).map(|(mono, c)| (mono.to_vec(), c)).collect();
        let mut occurs = vec![Vec::new(); n];
        for (t, (mono, _)) in terms.iter().enumerate() {
            mono.iter().for_each(|&v| occurs[v].push(t));
        }
        let free = terms.iter().map(|(mono, _)| mono.len()).collect();
        PenaltyBranchAndBound {
            sign,
            constant,
            zeros: vec![0; terms.len()],
            free,
            terms,
            occurs,
            ancilla,
            m,
            bits: vec![false; n],
            best: f64::INFINITY,
            optima: Vec::new(),
            keep,
        }
    }

    fn contribution(&self, t: usize) -> f64 {
        let c = self.terms[t].1;
        if self.zeros[t] > 0 {
            0.0
        } else if self.free[t] == 0 {
            c
        } else {
            c.min(0.0)
        }
    }

    fn assign(&mut self, var: usize, value: bool, lb: &mut f64) {
        self.bits[var] = value;
        for i in 0..self.occurs[var].len() {
            let t = self.occurs[var][i];
            *lb -= self.contribution(t);
            self.free[t] -= 1;
            self.zeros[t] += usize::from(!value);
            *lb += self.contribution(t);
        }
    }

    fn unassign(&mut self, var: usize, value: bool, lb: &mut f64) {
        for i in 0..self.occurs[var].len() {
            let t = self.occurs[var][i];
            *lb -= self.contribution(t);
            self.free[t] += 1;
            self.zeros[t] -= usize::from(!value);
            *lb += self.contribution(t);
        }
    }

    fn search(&mut self, var: usize, mut lb: f64, penalties: f64) {
        let bound = self.constant + lb + penalties;
        if bound > self.best {
            return;
        }
        if var == self.bits.len() {
            if bound < self.best {
                self.best = bound;
                self.optima.clear();
            }
            if self.optima.len() < self.keep {
                self.optima.push(self.bits.clone());
            }
            return;
        }
        let order = match self.ancilla[var] {
            Some((u, v)) => {
                let consistent = self.bits[u] && self.bits[v];
                [consistent, !consistent]
            }
            None => [false, true],
        };
        for value in order {
            let pen = match self.ancilla[var] {
                Some((u, v)) => self.m * rosenberg(self.bits[u], self.bits[v], value),
                None => 0.0,
            };
            self.assign(var, value, &mut lb);
            self.search(var + 1, lb, penalties + pen);
            self.unassign(var, value, &mut lb);
        }
    }

    /// Optimal value in the polynomial's own sense, plus optimal assignments.
    fn solve(mut self) -> (f64, Vec<Vec<bool>>) {
        let lb = (0..self.terms.len()).map(|t| self.contribution(t)).sum();
        self.search(0, lb, 0.0);
        (self.sign * self.best, self.optima)
    }
}

fn check_quadratization(p: &PseudoBooleanPolynomial) -> Result<(), String> {
    let source = exhaustive_optimize(p, 24).map_err(|e| e.to_string())?.best.value;
    let q = quadratize(p);
    if q.poly.degree() > 2 {
        return Err(format!("degree {} after quadratization", q.poly.degree()));
    }
    let (value, optima) = PenaltyBranchAndBound::new(&q, 1 << 12).solve();
    if value != source {
        return Err(format!("quadratized optimum {value} vs source {source}"));
    }
    for bits in &optima {
        let projected = p.evaluate(&q.project(bits));
        if projected != source {
            return Err(format!("projected optimum scores {projected}, source optimum {source}"));
        }
    }
    if q.poly.num_vars() <= 22 {
        let brute = exhaustive_optimize(&q.poly, 24).map_err(|e| e.to_string())?.best.value;
        if brute != source {
            return Err(format!("exhaustive quadratized optimum {brute} vs source {source}"));
        }
    }
    Ok(())
}

#[test]
fn criterion_02_quadratization_soundness() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut max_vars = 0;
    for (i, cg) in oracle_corpus().iter().enumerate() {
        for k in 1..=3 {
            for mode in MODES {
                let p = cokplex_poly(cg, k, mode);
                max_vars = max_vars.max(quadratize(&p).poly.num_vars());
                checked += 1;
                if let Err(e) = check_quadratization(&p) {
                    failures.push(format!("graph {i} k={k} {mode:?}: {e}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..100 {
        let vars = rng.gen_range(1..=10);
        let terms = rng.gen_range(1..=25);
        let p = random_polynomial(&mut rng, vars, 4, terms);
        checked += 1;
        if let Err(e) = check_quadratization(&p) {
            failures.push(format!("polynomial {i}: {e}"));
        }
    }
    let ok = failures.is_empty();
    report(
        2,
        "quadratization soundness",
        ok,
        format!("{checked} polynomials (up to {max_vars} vars after quadratization), {} failures, {:.1?}", failures.len(), start.elapsed()),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_03_mis_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut differing = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=14);
        let density = rng.gen_range(0.1..=0.9);
        let cg = random_conflict_graph(&mut rng, n, density);
        let mis = build_mis_qubo(&cg, PenaltyRule::MinPlusOne).unwrap();
        let star = cokplex_poly(&cg, 1, BijectionMode::Allow);
        let a: Vec<_> = mis.terms().map(|(m, c)| (m.to_vec(), c)).collect();
        let b: Vec<_> = star.terms().map(|(m, c)| (m.to_vec(), c)).collect();
        if a != b || mis.num_vars() != star.num_vars() || mis.sense() != star.sense() {
            differing += 1;
        }
    }
    let ok = differing == 0;
    report(3, "k=1 equals the MIS QUBO", ok, format!("100 graphs, {differing} differ"));
    assert!(ok);
}

#[test]
fn criterion_04_feasibility_of_optima() {
    let mut optima = 0;
    let mut infeasible = Vec::new();
    for (i, cg) in oracle_corpus().iter().enumerate() {
        for k in 1..=3 {
            for mode in MODES {
                let opts = ExhaustiveOptions { cap: 24, keep_optima: 1 << 12 };
                let r = exhaustive_optimize_with(&cokplex_poly(cg, k, mode), &opts).unwrap();
                assert_eq!(r.optima.len() as u64, r.optima_count, "all optima retained");
                for bits in &r.optima {
                    optima += 1;
                    let set: Vec<usize> = (0..bits.len()).filter(|&v| bits[v]).collect();
                    if !verify_cokplex(cg, &set, k, mode) {
                        infeasible.push(format!("graph {i} k={k} {mode:?}: {set:?}"));
                    }
                }
            }
        }
    }
    let ok = infeasible.is_empty();
    report(4, "optimal assignments are co-k-plexes", ok, format!("{optima} optima checked, {} infeasible", infeasible.len()));
    assert!(ok, "{infeasible:?}");
}

#[test]
fn criterion_05_relaxation_monotonicity() {
    let start = Instant::now();
    let pairs = molecule_pairs(5, 50, 18);
    let mut violations = Vec::new();
    for (i, (g, h, layout)) in pairs.iter().enumerate() {
        for mode in MODES {
            let objective = |k: usize, d_t: f64| -> f64 {
                let params = SimilarityParams { layout: layout.with_threshold(d_t), k, mode, ..Default::default() };
                similarity(g, h, &params).unwrap().objective.expect("within the solver cap")
            };
            let table: Vec<Vec<f64>> = (1..=4).map(|k| DT_GRID.iter().map(|&d| objective(k, d)).collect()).collect();
            for (ki, row) in table.iter().enumerate() {
                if row.windows(2).any(|w| w[1] < w[0]) {
                    violations.push(format!("pair {i} {mode:?} k={}: along d_t {row:?}", ki + 1));
                }
            }
            for d in 0..DT_GRID.len() {
                let col: Vec<f64> = table.iter().map(|r| r[d]).collect();
                if col.windows(2).any(|w| w[1] < w[0]) {
                    violations.push(format!("pair {i} {mode:?} d_t={}: along k {col:?}", DT_GRID[d]));
                }
            }
        }
    }
    let ok = violations.is_empty();
    report(
        5,
        "relaxation monotonicity",
        ok,
        format!("{} pairs x 2 modes x 4 k x 6 d_t, {} violations, {:.1?}", pairs.len(), violations.len(), start.elapsed()),
    );
    assert!(ok, "{violations:?}");
}

#[test]
fn criterion_06_similarity_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut self_checks = 0;
    let mut self_failures = Vec::new();
    let mut molecules = 0;
    while molecules < 50 {
        let g = reduce(&random_molecule(&mut rng, format!("s{molecules}"), 6)).unwrap();
        let layout = Layout::from_index(rng.gen_range(0..16), DT_GRID[rng.gen_range(0..DT_GRID.len())]).unwrap();
        if pairing_count(&g, &g, &layout) > 20 {
            continue;
        }
        molecules += 1;
        for delta in DELTAS {
            for mode in MODES {
                let params = SimilarityParams { layout, delta, mode, ..Default::default() };
                let score = similarity(&g, &g, &params).unwrap().score.unwrap();
                self_checks += 1;
                if (score - 1.0).abs() > 1e-12 {
                    self_failures.push(format!("{} layout {layout}: {score}", g.name));
                }
            }
        }
    }

    let mut sym_checks = 0;
    let mut sym_failures = Vec::new();
    for (g, h, layout) in molecule_pairs(66, 50, 20) {
        let layout = layout.with_threshold(DT_GRID[rng.gen_range(0..DT_GRID.len())]);
        let k = rng.gen_range(1..=4);
        for delta in DELTAS {
            for mode in MODES {
                let params = SimilarityParams { layout, k, delta, mode, ..Default::default() };
                let ab = similarity(&g, &h, &params).unwrap().score.unwrap();
                let ba = similarity(&h, &g, &params).unwrap().score.unwrap();
                sym_checks += 1;
                if (ab - ba).abs() > 1e-12 {
                    sym_failures.push(format!("{} vs {} k={k} {mode:?}: {ab} / {ba}", g.name, h.name));
                }
            }
        }
    }
    let ok = self_failures.is_empty() && sym_failures.is_empty();
    report(
        6,
        "self-similarity and symmetry",
        ok,
        format!(
            "{self_checks} self checks ({} off), {sym_checks} symmetry checks over k=1..4 ({} off)",
            self_failures.len(),
            sym_failures.len()
        ),
    );
    assert!(ok, "{self_failures:?} {sym_failures:?}");
}

#[test]
fn criterion_07_metric_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    let close = |got: Option<f64>, num: usize, den: usize| match got {
        None => den == 0,
        Some(v) => den > 0 && (v - num as f64 / den as f64).abs() <= 1e-12,
    };
    let mut zero_total = 0;
    for i in 0..1000 {
        let mut draw = || if rng.gen_bool(0.2) { 0 } else { rng.gen_range(0..60) };
        let c = ConfusionCounts { tp: draw(), fp: draw(), tn: draw(), fn_: draw() };
        let total = c.tp + c.fp + c.tn + c.fn_;
        match metrics(&c) {
            Err(_) if total == 0 => zero_total += 1,
            Err(e) => bad.push(format!("{i}: unexpected error {e}")),
            Ok(m) => {
                let ok = close(m.accuracy, c.tp + c.tn, total)
                    && close(m.precision, c.tp, c.tp + c.fp)
                    && close(m.sensitivity, c.tp, c.tp + c.fn_)
                    && close(m.specificity, c.tn, c.tn + c.fp);
                if !ok || total == 0 {
                    bad.push(format!("{i}: {c:?} -> {m:?}"));
                }
            }
        }
    }
    let ok = bad.is_empty();
    report(7, "metric formulas", ok, format!("1000 confusion counts ({zero_total} empty), {} wrong", bad.len()));
    assert!(ok, "{bad:?}");
}

#[test]
fn criterion_08_pipeline_end_to_end() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let corpus = planted_corpus(&mut rng, 20).unwrap();
    let base = SimilarityParams {
        layout: Layout::from_index(9, 1.5).unwrap(),
        k: 3,
        delta: 0.4,
        ..Default::default()
    };
    let cfg = CvConfig { folds: 5, kappa: 3, seed: 8 };
    let mut cache = SimilarityCache::in_memory();
    let matrix = graph_matrices(&corpus, &base, &[base.delta], &mut cache).unwrap().remove(0);
    let report_cv = cross_validate(&corpus.ids(), &corpus.labels(), &matrix, &cfg).unwrap();
    let accuracy = report_cv.mean.accuracy.unwrap_or(0.0);

    let grid = SweepGrid { layouts: (0..16).collect(), d_t: vec![1.5], k: vec![3], delta: vec![0.4] };
    let rows = sweep(&corpus, &base, &grid, &cfg, true, &mut cache).unwrap();
    let mut union = BTreeSet::new();
    for layout in 0..16 {
        let params = SimilarityParams { layout: Layout::from_index(layout, 1.5).unwrap(), ..base };
        let m = graph_matrices(&corpus, &params, &[0.4], &mut cache).unwrap().remove(0);
        union.extend(m.skipped_pairs());
    }
    let total = corpus.len() * (corpus.len() - 1) / 2;
    let consistent = rows.iter().all(|r| r.pairs_total == total && r.pairs_solved == total - union.len());
    let row9 = rows.iter().find(|r| r.layout == 9).unwrap();
    // with no pair dropped, the layout-9 row must equal the direct run
    let same_as_direct = !union.is_empty() || row9.report == report_cv;

    let ok = accuracy >= 0.9 && rows.len() == 16 && consistent && same_as_direct;
    report(
        8,
        "pipeline end-to-end",
        ok,
        format!(
            "accuracy {accuracy:.3} (pooled {:?}), {} sweep rows, {} pairs solved of {total} in every row, {:.1?}",
            report_cv.pooled,
            rows.len(),
            total - union.len(),
            start.elapsed()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_parser_golden_files() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let names = ["nitrobenzene_charged", "ethanol_explicit_h", "naphthylammonium"];
    let mut mismatched = Vec::new();
    for name in names {
        let mol = parse_molfile(&std::fs::read_to_string(dir.join(format!("{name}.mol"))).unwrap()).unwrap();
        let got = reduce(&mol).unwrap().to_json_pretty() + "\n";
        let want = std::fs::read_to_string(dir.join(format!("{name}.reduced.json"))).unwrap();
        let reparsed = ReducedGraph::from_json(&want).unwrap().to_json_pretty() + "\n";
        if got != want || reparsed != want {
            mismatched.push(name);
        }
    }
    let ok = mismatched.is_empty();
    report(9, "parser golden files", ok, format!("{} fixtures, mismatched: {mismatched:?}", names.len()));
    assert!(ok);
}

#[test]
fn criterion_10_conflict_graph_nesting() {
    let pairs = molecule_pairs(10, 50, 60);
    let mut failures = Vec::new();
    for (i, (g, h, layout)) in pairs.iter().enumerate() {
        let edges_at = |d_t: f64| -> HashSet<(usize, usize)> {
            build_conflict_graph(g, h, &layout.with_threshold(d_t)).edges().iter().map(|e| (e.a, e.b)).collect()
        };
        let base = edges_at(0.0);
        let mut previous = base.clone();
        for &d in &DT_GRID[1..] {
            let current = edges_at(d);
            if !current.is_subset(&base) || !current.is_subset(&previous) {
                failures.push(format!("pair {i}: edges at d_t={d} not nested"));
            }
            previous = current;
        }

        let cg = build_conflict_graph(g, h, layout);
        let (dg, dh) = (g.distance_matrix(), h.distance_matrix());
        let mut max_gap: f64 = 0.0;
        for s in cg.vertices() {
            for t in cg.vertices() {
                let ((s1, s2), (t1, t2)) = (s.pair(), t.pair());
                max_gap = max_gap.max((dg[s1][t1] - dh[s2][t2]).abs());
            }
        }
        let above = build_conflict_graph(g, h, &layout.with_threshold(max_gap + 1e-9));
        if edge_census(&above).distance != 0 {
            failures.push(format!("pair {i}: distance edges above max gap {max_gap}"));
        }
    }
    let ok = failures.is_empty();
    report(10, "conflict-graph nesting", ok, format!("{} pairs, {} failures", pairs.len(), failures.len()));
    assert!(ok, "{failures:?}");
}
