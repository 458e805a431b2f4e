//! Pseudo-Boolean objectives for maximum weighted independent sets and their
//! co-k-plex relaxation, degree reduction to QUBO, and QUBO interchange.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conflict::{ConflictGraph, EdgeKind};
use crate::error::{Error, Result};

pub const DEFAULT_MONOMIAL_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// True when `a` is strictly preferable to `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

/// Multilinear polynomial over binary variables `x_0 .. x_{n-1}`.
///
/// Monomials are stored as sorted, duplicate-free variable lists; the empty
/// monomial is the constant term. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoBooleanPolynomial {
    num_vars: usize,
    sense: Sense,
    terms: BTreeMap<Vec<usize>, f64>,
}

impl PseudoBooleanPolynomial {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        PseudoBooleanPolynomial { num_vars, sense, terms: BTreeMap::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Adds `coeff · Π x_i`. Repeated variables collapse (`x·x = x`).
    ///
    /// Panics if a variable index is out of range.
    pub fn add_term(&mut self, vars: &[usize], coeff: f64) {
        let mut mono = vars.to_vec();
        mono.sort_unstable();
        mono.dedup();
        assert!(
            mono.last().is_none_or(|&v| v < self.num_vars),
            "variable index out of range for {} variables",
            self.num_vars
        );
        self.add_sorted(mono, coeff);
    }

    fn add_sorted(&mut self, mono: Vec<usize>, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut mono = vars.to_vec();
        mono.sort_unstable();
        mono.dedup();
        self.terms.get(&mono).copied().unwrap_or(0.0)
    }

    pub fn constant(&self) -> f64 {
        self.coefficient(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.terms.iter().map(|(m, c)| (m.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn abs_coefficient_sum(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        assert_eq!(bits.len(), self.num_vars, "assignment length");
        self.terms
            .iter()
            .filter(|(m, _)| m.iter().all(|&v| bits[v]))
            .map(|(_, c)| c)
            .sum()
    }

    /// Evaluates with variable `i` read from bit `i` of `mask`.
    pub fn evaluate_mask(&self, mask: u64) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.iter().all(|&v| mask >> v & 1 == 1))
            .map(|(_, c)| c)
            .sum()
    }

    /// Drops variables `>= n`, which must not appear in any term.
    fn truncate_vars(&mut self, n: usize) {
        debug_assert!(self.terms.keys().all(|m| m.iter().all(|&v| v < n)));
        self.num_vars = n;
    }
}

impl fmt::Display for PseudoBooleanPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        };
        write!(f, "{sense}:")?;
        if self.terms.is_empty() {
            return write!(f, " 0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for (i, (mono, c)) in ordered.into_iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else if i == 0 { "" } else { "+" };
            write!(f, " {sign}{}", c.abs())?;
            for v in mono {
                write!(f, " x{v}")?;
            }
        }
        Ok(())
    }
}

/// Penalty coefficient for a violated constraint over a group of vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyRule {
    /// Smallest involved weight plus one.
    MinPlusOne,
    /// Fixed value; must exceed the smallest involved weight.
    Explicit(f64),
}

impl Default for PenaltyRule {
    fn default() -> Self {
        PenaltyRule::MinPlusOne
    }
}

impl PenaltyRule {
    pub fn penalty(self, min_weight: f64) -> Result<f64> {
        match self {
            PenaltyRule::MinPlusOne => Ok(min_weight + 1.0),
            PenaltyRule::Explicit(a) if a > min_weight => Ok(a),
            PenaltyRule::Explicit(a) => Err(Error::InvalidParameter(format!(
                "penalty {a} does not exceed the smallest involved weight {min_weight}"
            ))),
        }
    }
}

/// Whether bijection conflicts may appear inside a relaxed solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BijectionMode {
    /// Every conflict kind counts toward the k-1 budget.
    #[default]
    Allow,
    /// Bijection edges are hard constraints; only the other kinds are relaxed.
    Forbid,
}

impl BijectionMode {
    /// Whether an edge of this kind participates in star penalties.
    pub fn relaxes(self, kind: EdgeKind) -> bool {
        self == BijectionMode::Allow || kind != EdgeKind::Bijection
    }
}

/// Which vertex groups receive a star penalty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarMode {
    /// Any centre with k neighbours, whatever the edges among the leaves.
    /// Exactly characterises the degree bound.
    #[default]
    Containment,
    /// Only groups whose leaves are pairwise non-adjacent (induced stars).
    /// Misses violations inside cliques, e.g. a triangle at k = 2.
    Induced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CokplexOptions {
    pub k: usize,
    pub mode: BijectionMode,
    pub rule: PenaltyRule,
    pub star: StarMode,
    pub monomial_cap: usize,
}

impl CokplexOptions {
    pub fn new(k: usize) -> Self {
        CokplexOptions {
            k,
            mode: BijectionMode::Allow,
            rule: PenaltyRule::MinPlusOne,
            star: StarMode::Containment,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
        }
    }

    pub fn mode(mut self, mode: BijectionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn star(mut self, star: StarMode) -> Self {
        self.star = star;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CokplexPolynomial {
    pub poly: PseudoBooleanPolynomial,
    /// Set when `k >= |V_c|`, so no star can exist.
    pub vacuous: bool,
}

fn linear_part(cg: &ConflictGraph) -> Result<PseudoBooleanPolynomial> {
    let mut p = PseudoBooleanPolynomial::new(cg.len(), Sense::Maximize);
    for (i, v) in cg.vertices().iter().enumerate() {
        if !(v.weight > 0.0) {
            return Err(Error::InvalidParameter(format!("vertex {i} has nonpositive weight {}", v.weight)));
        }
        p.add_sorted(vec![i], v.weight);
    }
    Ok(p)
}

/// Maximum weighted independent set objective:
/// `Σ w_s x_s − Σ_{(s,l) ∈ E_c} a_sl x_s x_l`.
pub fn build_mis_qubo(cg: &ConflictGraph, rule: PenaltyRule) -> Result<PseudoBooleanPolynomial> {
    let mut p = linear_part(cg)?;
    for e in cg.edges() {
        let a = rule.penalty(cg.weight(e.a).min(cg.weight(e.b)))?;
        p.add_sorted(vec![e.a, e.b], -a);
    }
    Ok(p)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Calls `f` on every k-subset of `items` in lexicographic order.
fn for_each_combination(items: &[usize], k: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let n = items.len();
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen = vec![0; k];
    loop {
        for (slot, &i) in chosen.iter_mut().zip(&idx) {
            *slot = items[i];
        }
        f(&chosen)?;
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return Ok(());
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// Maximum weighted co-k-plex objective with star penalties.
///
/// For each centre `c` and each k-subset `S` of its relaxable neighbours, the
/// term `−a · x_c · Π_{s∈S} x_s` is added with `a` from `rule` over the k+1
/// weights; coefficients on identical monomials accumulate. For k = 1 every
/// edge is one star, penalised once. In [`BijectionMode::Forbid`], bijection
/// edges are excluded from stars and penalised quadratically instead.
pub fn build_cokplex_pbo(cg: &ConflictGraph, opts: &CokplexOptions) -> Result<CokplexPolynomial> {
    let k = opts.k;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut p = linear_part(cg)?;

    if opts.mode == BijectionMode::Forbid {
        for e in cg.edges().iter().filter(|e| e.kind == EdgeKind::Bijection) {
            let a = opts.rule.penalty(cg.weight(e.a).min(cg.weight(e.b)))?;
            p.add_sorted(vec![e.a, e.b], -a);
        }
    }

    if k >= cg.len() {
        log::debug!("k = {k} with {} conflict vertices: degree constraint is vacuous", cg.len());
        return Ok(CokplexPolynomial { poly: p, vacuous: true });
    }

    let relaxed: Vec<Vec<usize>> = (0..cg.len())
        .map(|c| {
            cg.neighbors(c)
                .iter()
                .filter(|(_, kind)| opts.mode.relaxes(*kind))
                .map(|&(n, _)| n)
                .collect()
        })
        .collect();

    let planned: usize = relaxed.iter().map(|n| binomial(n.len(), k)).fold(0, usize::saturating_add);
    if planned > opts.monomial_cap {
        return Err(Error::MonomialCap { cap: opts.monomial_cap });
    }

    let relaxed_adjacent = |a: usize, b: usize| cg.kind_between(a, b).is_some_and(|kind| opts.mode.relaxes(kind));

    for (centre, leaves) in relaxed.iter().enumerate() {
        // a 1-star has no distinguished centre; take it from its lower end
        let leaves: Vec<usize> = if k == 1 {
            leaves.iter().copied().filter(|&l| l > centre).collect()
        } else {
            leaves.clone()
        };
        for_each_combination(&leaves, k, |set| {
            if opts.star == StarMode::Induced
                && set.iter().enumerate().any(|(i, &a)| set[i + 1..].iter().any(|&b| relaxed_adjacent(a, b)))
            {
                return Ok(());
            }
            let min_w = set.iter().map(|&v| cg.weight(v)).fold(cg.weight(centre), f64::min);
            let a = opts.rule.penalty(min_w)?;
            let mut mono = Vec::with_capacity(k + 1);
            mono.push(centre);
            mono.extend_from_slice(set);
            mono.sort_unstable();
            p.add_sorted(mono, -a);
            Ok(())
        })?;
    }
    Ok(CokplexPolynomial { poly: p, vacuous: false })
}

/// Degree-≤2 polynomial equivalent to a higher-order one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratizationResult {
    pub poly: PseudoBooleanPolynomial,
    /// Ancilla id → the pair it stands for (either may itself be an ancilla).
    pub ancilla_map: BTreeMap<usize, (usize, usize)>,
    pub penalty_weight: f64,
    pub source_vars: usize,
}

impl QuadratizationResult {
    /// Restricts an assignment of the quadratic form to the source variables.
    pub fn project(&self, bits: &[bool]) -> Vec<bool> {
        bits[..self.source_vars].to_vec()
    }

    /// Extends a source assignment with the consistent ancilla values.
    pub fn lift(&self, bits: &[bool]) -> Vec<bool> {
        let mut out = bits.to_vec();
        out.resize(self.poly.num_vars(), false);
        for (&y, &(u, v)) in &self.ancilla_map {
            out[y] = out[u] && out[v];
        }
        out
    }
}

/// Pairwise substitution of the most frequent variable pair in monomials of
/// degree ≥ 3, repeated until the degree is at most 2.
///
/// Each ancilla `y = u·v` is enforced by `M·(uv − 2uy − 2vy + 3y)` (added for
/// minimisation, subtracted for maximisation) with `M = 1 + Σ|c|` over the
/// source coefficients, which exceeds any gain from a wrong ancilla value.
pub fn quadratize(p: &PseudoBooleanPolynomial) -> QuadratizationResult {
    let source_vars = p.num_vars();
    if p.degree() <= 2 {
        return QuadratizationResult { poly: p.clone(), ancilla_map: BTreeMap::new(), penalty_weight: 0.0, source_vars };
    }
    let m = 1.0 + p.abs_coefficient_sum();
    let signed_m = match p.sense() {
        Sense::Minimize => m,
        Sense::Maximize => -m,
    };
    let mut terms = p.terms.clone();
    let mut num_vars = source_vars;
    let mut ancilla_map = BTreeMap::new();

    loop {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for mono in terms.keys().filter(|m| m.len() >= 3) {
            for (i, &u) in mono.iter().enumerate() {
                for &v in &mono[i + 1..] {
                    *counts.entry((u, v)).or_default() += 1;
                }
            }
        }
        let Some((&(u, v), _)) = counts
            .iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
        else {
            break;
        };
        let y = num_vars;
        num_vars += 1;
        ancilla_map.insert(y, (u, v));

        let mut next = PseudoBooleanPolynomial::new(num_vars, p.sense());
        for (mono, c) in std::mem::take(&mut terms) {
            if mono.len() >= 3 && mono.binary_search(&u).is_ok() && mono.binary_search(&v).is_ok() {
                let mut reduced: Vec<usize> = mono.into_iter().filter(|&w| w != u && w != v).collect();
                reduced.push(y);
                next.add_sorted(reduced, c);
            } else {
                next.add_sorted(mono, c);
            }
        }
        next.add_sorted(vec![u, v], signed_m);
        next.add_sorted(vec![u, y], -2.0 * signed_m);
        next.add_sorted(vec![v, y], -2.0 * signed_m);
        next.add_sorted(vec![y], 3.0 * signed_m);
        terms = next.terms;
    }

    let mut poly = PseudoBooleanPolynomial { num_vars, sense: p.sense(), terms };
    poly.truncate_vars(num_vars);
    QuadratizationResult { poly, ancilla_map, penalty_weight: m, source_vars }
}

/// Upper-triangular QUBO interchange record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboRecord {
    pub num_vars: usize,
    pub sense: Sense,
    pub constant: f64,
    pub linear: Vec<f64>,
    /// `(i, j, coefficient)` with `i < j`, sorted.
    pub quadratic: Vec<(usize, usize, f64)>,
}

pub fn export_qubo(p: &PseudoBooleanPolynomial) -> Result<QuboRecord> {
    let degree = p.degree();
    if degree > 2 {
        return Err(Error::Degree(degree));
    }
    let mut linear = vec![0.0; p.num_vars()];
    let mut quadratic = Vec::new();
    for (mono, c) in p.terms() {
        match *mono {
            [] => {}
            [i] => linear[i] = c,
            [i, j] => quadratic.push((i, j, c)),
            _ => unreachable!("degree checked"),
        }
    }
    Ok(QuboRecord { num_vars: p.num_vars(), sense: p.sense(), constant: p.constant(), linear, quadratic })
}

impl QuboRecord {
    pub fn to_polynomial(&self) -> Result<PseudoBooleanPolynomial> {
        if self.linear.len() != self.num_vars {
            return Err(Error::Schema(format!(
                "linear vector has {} entries for {} variables",
                self.linear.len(),
                self.num_vars
            )));
        }
        let mut p = PseudoBooleanPolynomial::new(self.num_vars, self.sense);
        p.add_sorted(Vec::new(), self.constant);
        for (i, &c) in self.linear.iter().enumerate() {
            p.add_sorted(vec![i], c);
        }
        let mut last = None;
        for &(i, j, c) in &self.quadratic {
            if i >= j || j >= self.num_vars {
                return Err(Error::Schema(format!("quadratic entry ({i}, {j}) is not upper-triangular in range")));
            }
            if last.is_some_and(|l| l >= (i, j)) {
                return Err(Error::Schema("quadratic entries must be sorted and unique".into()));
            }
            last = Some((i, j));
            p.add_sorted(vec![i, j], c);
        }
        Ok(p)
    }
}
