//! Exact optimisation of pseudo-Boolean polynomials and an independent
//! branch-and-bound oracle for maximum weighted co-k-plexes.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::conflict::{ConflictGraph, EdgeKind};
use crate::error::{Error, Result};
use crate::qubo::{BijectionMode, PseudoBooleanPolynomial};

pub const DEFAULT_SOLVER_CAP: usize = 24;
pub const ORACLE_CAP: usize = 30;
/// Optima retained for tie-breaking; larger optimum sets keep only the count.
pub const DEFAULT_KEEP_OPTIMA: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub bits: Vec<bool>,
    pub value: f64,
}

impl Assignment {
    pub fn selected(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Lexicographically smallest optimal bit vector.
    pub best: Assignment,
    pub optima_count: u64,
    pub vars_explored: usize,
    pub elapsed: Duration,
    /// Every optimum in lexicographic order, when there are at most
    /// `keep_optima` of them; otherwise empty.
    #[serde(skip)]
    pub optima: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExhaustiveOptions {
    pub cap: usize,
    pub keep_optima: usize,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions { cap: DEFAULT_SOLVER_CAP, keep_optima: DEFAULT_KEEP_OPTIMA }
    }
}

fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Sort key putting bit 0 most significant, so smaller key = lexicographically smaller vector.
fn lex_key(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

pub fn exhaustive_optimize(p: &PseudoBooleanPolynomial, cap: usize) -> Result<SolveReport> {
    exhaustive_optimize_with(p, &ExhaustiveOptions { cap, ..Default::default() })
}

/// Full 2^n enumeration in Gray-code order.
///
/// Each step flips one variable and updates only the terms containing it, so
/// the cost per state is proportional to that variable's term count.
pub fn exhaustive_optimize_with(p: &PseudoBooleanPolynomial, opts: &ExhaustiveOptions) -> Result<SolveReport> {
    let n = p.num_vars();
    let cap = opts.cap.min(63);
    if n > cap {
        return Err(Error::SizeCap { size: n, cap: opts.cap });
    }
    let start = Instant::now();

    let mut value = 0.0;
    let mut coeffs = Vec::new();
    let mut lens = Vec::new();
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (mono, c) in p.terms() {
        if mono.is_empty() {
            value += c;
            continue;
        }
        let t = coeffs.len();
        coeffs.push(c);
        lens.push(mono.len() as u32);
        mono.iter().for_each(|&v| by_var[v].push(t));
    }
    let mut set_count = vec![0u32; coeffs.len()];
    let tol = 1e-9 * (1.0 + p.abs_coefficient_sum());
    let sense = p.sense();

    let mut mask = 0u64;
    let mut best_value = value;
    let mut best_key = lex_key(0, n);
    let mut optima_count = 1u64;
    let mut kept: Vec<u64> = vec![0];

    for step in 1u64..(1u64 << n) {
        let var = step.trailing_zeros() as usize;
        let bit = 1u64 << var;
        if mask & bit == 0 {
            for &t in &by_var[var] {
                set_count[t] += 1;
                if set_count[t] == lens[t] {
                    value += coeffs[t];
                }
            }
        } else {
            for &t in &by_var[var] {
                if set_count[t] == lens[t] {
                    value -= coeffs[t];
                }
                set_count[t] -= 1;
            }
        }
        mask ^= bit;

        if sense.better(value, best_value) && (value - best_value).abs() > tol {
            best_value = value;
            best_key = lex_key(mask, n);
            optima_count = 1;
            kept.clear();
            kept.push(mask);
        } else if (value - best_value).abs() <= tol {
            optima_count += 1;
            best_key = best_key.min(lex_key(mask, n));
            if kept.len() <= opts.keep_optima {
                kept.push(mask);
            }
        }
    }

    let best_mask = lex_key(best_key, n);
    let bits = mask_to_bits(best_mask, n);
    let optima = if optima_count as usize <= opts.keep_optima {
        kept.sort_by_key(|&m| lex_key(m, n));
        kept.into_iter().map(|m| mask_to_bits(m, n)).collect()
    } else {
        Vec::new()
    };
    Ok(SolveReport {
        best: Assignment { value: p.evaluate(&bits), bits },
        optima_count,
        vars_explored: n,
        elapsed: start.elapsed(),
        optima,
    })
}

/// True iff every chosen vertex has at most `k − 1` chosen conflict
/// neighbours, and, under [`BijectionMode::Forbid`], none via a bijection edge.
pub fn verify_cokplex(cg: &ConflictGraph, subset: &[usize], k: usize, mode: BijectionMode) -> bool {
    let mut chosen = vec![false; cg.len()];
    for &v in subset {
        if v >= cg.len() {
            return false;
        }
        chosen[v] = true;
    }
    subset.iter().all(|&v| {
        let inside = cg.neighbors(v).iter().filter(|(w, _)| chosen[*w]);
        let mut degree = 0;
        for &(_, kind) in inside {
            if mode == BijectionMode::Forbid && kind == EdgeKind::Bijection {
                return false;
            }
            degree += 1;
        }
        degree < k
    })
}

struct Search {
    order: Vec<usize>,
    weights: Vec<f64>,
    adj: Vec<u64>,
    hard: Vec<u64>,
    suffix: Vec<f64>,
    limit: u32,
    degree: Vec<u32>,
    best: f64,
    best_set: u64,
}

impl Search {
    fn run(&mut self, i: usize, chosen: u64, weight: f64) {
        if weight + self.suffix[i] <= self.best {
            return;
        }
        if i == self.order.len() {
            self.best = weight;
            self.best_set = chosen;
            return;
        }
        let v = self.order[i];
        let nbrs = self.adj[v] & chosen;
        let feasible = self.hard[v] & chosen == 0
            && nbrs.count_ones() <= self.limit
            && BitIter(nbrs).all(|u| self.degree[u] < self.limit);
        if feasible {
            BitIter(nbrs).for_each(|u| self.degree[u] += 1);
            self.degree[v] = nbrs.count_ones();
            self.run(i + 1, chosen | 1 << v, weight + self.weights[v]);
            BitIter(nbrs).for_each(|u| self.degree[u] -= 1);
            self.degree[v] = 0;
        }
        self.run(i + 1, chosen, weight);
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Exact maximum-weight vertex set whose induced conflict degree is at most
/// `k − 1`, by branch and bound over vertices in decreasing weight order.
/// Works directly on the graph; no polynomial is built.
pub fn cokplex_oracle(cg: &ConflictGraph, k: usize, mode: BijectionMode) -> Result<(f64, Vec<usize>)> {
    let n = cg.len();
    if n > ORACLE_CAP {
        return Err(Error::SizeCap { size: n, cap: ORACLE_CAP });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let weights: Vec<f64> = (0..n).map(|v| cg.weight(v)).collect();
    let mut adj = vec![0u64; n];
    let mut hard = vec![0u64; n];
    for e in cg.edges() {
        if mode == BijectionMode::Forbid && e.kind == EdgeKind::Bijection {
            hard[e.a] |= 1 << e.b;
            hard[e.b] |= 1 << e.a;
        } else {
            adj[e.a] |= 1 << e.b;
            adj[e.b] |= 1 << e.a;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + weights[order[i]].max(0.0);
    }
    let mut search = Search {
        order,
        weights,
        adj,
        hard,
        suffix,
        limit: (k - 1).min(u32::MAX as usize) as u32,
        degree: vec![0; n],
        best: f64::NEG_INFINITY,
        best_set: 0,
    };
    search.run(0, 0, 0.0);
    let witness: Vec<usize> = BitIter(search.best_set).collect();
    Ok((search.best, witness))
}
