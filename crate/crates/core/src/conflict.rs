//! Conflict graphs over vertex pairings (or n-tuples) of labelled graphs.
//!
//! A conflict vertex is a label-compatible pairing; two pairings conflict when
//! they reuse a vertex (bijection), disagree on the edge label between their
//! endpoints (an absent edge counts as its own label), or when the two
//! geometric distances differ by more than the threshold `d_t`.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::{EdgeLabel, ReducedGraph, VertexKind, VertexLabels};

pub const DEFAULT_TUPLE_CAP: usize = 1_000_000;

/// Optional matching criteria plus the distance threshold.
///
/// Atomic number, weight and (for atom vertices) the implicit hydrogen count
/// are always compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub rh: bool,
    pub rb: bool,
    pub fc: bool,
    pub dn: bool,
    #[serde(with = "crate::threshold_serde")]
    pub d_t: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Layout { rh: false, rb: false, fc: false, dn: false, d_t: f64::INFINITY }
    }
}

impl Layout {
    /// `index = 8·rh + 4·rb + 2·fc + dn`.
    pub fn from_index(index: u8, d_t: f64) -> Result<Self> {
        if index > 15 {
            return Err(Error::InvalidParameter(format!("layout index {index} outside 0..=15")));
        }
        let layout = Layout {
            rh: index & 8 != 0,
            rb: index & 4 != 0,
            fc: index & 2 != 0,
            dn: index & 1 != 0,
            d_t,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn index(&self) -> u8 {
        8 * self.rh as u8 + 4 * self.rb as u8 + 2 * self.fc as u8 + self.dn as u8
    }

    pub fn all(d_t: f64) -> Vec<Layout> {
        (0..16).map(|i| Layout::from_index(i, d_t).expect("index in range")).collect()
    }

    pub fn with_threshold(mut self, d_t: f64) -> Self {
        self.d_t = d_t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_t.is_nan() || self.d_t < 0.0 {
            return Err(Error::InvalidParameter(format!("distance threshold must be >= 0, got {}", self.d_t)));
        }
        Ok(())
    }

    pub fn matches(&self, a: &VertexLabels, b: &VertexLabels) -> bool {
        if a.kind != b.kind || a.atomic_number != b.atomic_number || a.weight != b.weight {
            return false;
        }
        let h_required = match a.kind {
            VertexKind::Atom => true,
            VertexKind::Ring => self.rh,
        };
        (!h_required || a.implicit_h == b.implicit_h)
            && (!self.rb || a.ring_bond_orders == b.ring_bond_orders)
            && (!self.fc || a.formal_charge == b.formal_charge)
            && (!self.dn || a.degree_signature == b.degree_signature)
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "layout {} (RH={} RB={} FC={} DN={}, d_t={})",
            self.index(),
            self.rh as u8,
            self.rb as u8,
            self.fc as u8,
            self.dn as u8,
            self.d_t
        )
    }
}

/// How conflict vertices are weighted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// The shared weight label, i.e. the number of atoms matched.
    #[default]
    Label,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Bijection,
    EdgeLabel,
    Distance,
    User,
}

impl EdgeKind {
    /// Rendering colour: black, blue, green for bijection, edge-label, distance.
    pub fn colour(self) -> &'static str {
        match self {
            EdgeKind::Bijection => "black",
            EdgeKind::EdgeLabel => "blue",
            EdgeKind::Distance => "green",
            EdgeKind::User => "gray",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictVertex {
    /// One source-vertex index per compared graph.
    pub coords: Vec<usize>,
    pub weight: f64,
}

impl ConflictVertex {
    pub fn pair(&self) -> (usize, usize) {
        (self.coords[0], self.coords[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictEdge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCensus {
    pub bijection: usize,
    pub edge_label: usize,
    pub distance: usize,
    pub user: usize,
}

impl EdgeCensus {
    pub fn total(&self) -> usize {
        self.bijection + self.edge_label + self.distance + self.user
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConflictGraphDoc", into = "ConflictGraphDoc")]
pub struct ConflictGraph {
    vertices: Vec<ConflictVertex>,
    edges: Vec<ConflictEdge>,
    sources: Vec<String>,
    side_orders: Vec<usize>,
    adjacency: Vec<Vec<(usize, EdgeKind)>>,
}

#[derive(Serialize, Deserialize)]
struct ConflictGraphDoc {
    sources: Vec<String>,
    side_orders: Vec<usize>,
    vertices: Vec<ConflictVertex>,
    edges: Vec<ConflictEdge>,
}

impl From<ConflictGraph> for ConflictGraphDoc {
    fn from(g: ConflictGraph) -> Self {
        ConflictGraphDoc { sources: g.sources, side_orders: g.side_orders, vertices: g.vertices, edges: g.edges }
    }
}

impl TryFrom<ConflictGraphDoc> for ConflictGraph {
    type Error = Error;

    fn try_from(d: ConflictGraphDoc) -> Result<Self> {
        ConflictGraph::from_parts(d.vertices, d.edges, d.sources, d.side_orders)
    }
}

impl ConflictGraph {
    /// Assembles a conflict graph from explicit parts, checking that it is
    /// simple and that every weight is positive. Edges are normalised to
    /// `a < b` and sorted.
    pub fn from_parts(
        vertices: Vec<ConflictVertex>,
        mut edges: Vec<ConflictEdge>,
        sources: Vec<String>,
        side_orders: Vec<usize>,
    ) -> Result<Self> {
        let n = vertices.len();
        if let Some(v) = vertices.iter().find(|v| !(v.weight > 0.0) || !v.weight.is_finite()) {
            return Err(Error::InvalidParameter(format!("conflict vertex weight must be positive, got {}", v.weight)));
        }
        for e in edges.iter_mut() {
            if e.a == e.b || e.a >= n || e.b >= n {
                return Err(Error::Schema(format!("invalid conflict edge {}-{}", e.a, e.b)));
            }
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
        }
        edges.sort_by_key(|e| (e.a, e.b));
        if edges.windows(2).any(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::Schema("conflict graph has parallel edges".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.a].push((e.b, e.kind));
            adjacency[e.b].push((e.a, e.kind));
        }
        adjacency.iter_mut().for_each(|l| l.sort_unstable());
        Ok(ConflictGraph { vertices, edges, sources, side_orders, adjacency })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[ConflictVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[ConflictEdge] {
        &self.edges
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    /// Vertex counts of the compared graphs.
    pub fn side_orders(&self) -> &[usize] {
        &self.side_orders
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.vertices[v].weight
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeKind)] {
        &self.adjacency[v]
    }

    pub fn kind_between(&self, a: usize, b: usize) -> Option<EdgeKind> {
        self.adjacency[a]
            .binary_search_by_key(&b, |&(w, _)| w)
            .ok()
            .map(|i| self.adjacency[a][i].1)
    }

    /// Same graph with every vertex given weight 1.
    pub fn with_unit_weights(&self) -> Self {
        let mut g = self.clone();
        g.vertices.iter_mut().for_each(|v| v.weight = 1.0);
        g
    }

    /// Pairing coordinates reversed (`(u, v)` becomes `(v, u)`); vertex and
    /// edge indices are unchanged.
    pub fn transposed(&self) -> Self {
        let mut g = self.clone();
        g.vertices.iter_mut().for_each(|v| v.coords.reverse());
        g.sources.reverse();
        g.side_orders.reverse();
        g
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("conflict graph serializes")
    }

    /// Graphviz rendering; bijection edges black, distance green, edge-label blue.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph conflict {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let coords: Vec<String> = v.coords.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "  {i} [label=\"({}) w={}\"];", coords.join(","), v.weight);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -- {} [color={}];", e.a, e.b, e.kind.colour());
        }
        out.push_str("}\n");
        out
    }
}

pub fn edge_census(cg: &ConflictGraph) -> EdgeCensus {
    let mut c = EdgeCensus::default();
    for e in cg.edges() {
        match e.kind {
            EdgeKind::Bijection => c.bijection += 1,
            EdgeKind::EdgeLabel => c.edge_label += 1,
            EdgeKind::Distance => c.distance += 1,
            EdgeKind::User => c.user += 1,
        }
    }
    c
}

/// Extra tuple compatibility test applied after label matching.
pub type TuplePredicate<'a> = &'a (dyn Fn(&[usize]) -> bool + Sync);
/// Extra conflict test between two tuples that survived the built-in rules.
pub type UserConflict<'a> = &'a (dyn Fn(&[usize], &[usize]) -> bool + Sync);

#[derive(Clone, Copy)]
pub struct ConflictOptions<'a> {
    pub layout: Layout,
    pub weights: WeightScheme,
    pub tuple_cap: usize,
    pub compatible: Option<TuplePredicate<'a>>,
    pub user_conflict: Option<UserConflict<'a>>,
}

impl<'a> ConflictOptions<'a> {
    pub fn new(layout: Layout) -> Self {
        ConflictOptions { layout, weights: WeightScheme::Label, tuple_cap: DEFAULT_TUPLE_CAP, compatible: None, user_conflict: None }
    }

    pub fn weights(mut self, weights: WeightScheme) -> Self {
        self.weights = weights;
        self
    }
}

struct Side<'g> {
    graph: &'g ReducedGraph,
    labels: Vec<Vec<Option<EdgeLabel>>>,
    dist: Vec<Vec<f64>>,
}

/// Label-compatible tuples in lexicographic order, failing once `cap` is exceeded.
pub fn candidate_tuples(graphs: &[&ReducedGraph], opts: &ConflictOptions<'_>) -> Result<Vec<Vec<usize>>> {
    fn extend(
        graphs: &[&ReducedGraph],
        opts: &ConflictOptions<'_>,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        let depth = prefix.len();
        if depth == graphs.len() {
            if opts.compatible.is_none_or(|f| f(prefix)) {
                if out.len() == opts.tuple_cap {
                    return Err(Error::TupleCap { count: opts.tuple_cap + 1, cap: opts.tuple_cap });
                }
                out.push(prefix.clone());
            }
            return Ok(());
        }
        for (v, labels) in graphs[depth].vertices.iter().enumerate() {
            let ok = prefix
                .iter()
                .enumerate()
                .all(|(i, &u)| opts.layout.matches(&graphs[i].vertices[u], labels));
            if ok {
                prefix.push(v);
                extend(graphs, opts, prefix, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    opts.layout.validate()?;
    let mut out = Vec::new();
    extend(graphs, opts, &mut Vec::with_capacity(graphs.len()), &mut out)?;
    Ok(out)
}

fn classify_pair(sides: &[Side<'_>], s: &[usize], t: &[usize], d_t: f64) -> Option<EdgeKind> {
    if s.iter().zip(t).any(|(a, b)| a == b) {
        return Some(EdgeKind::Bijection);
    }
    let n = sides.len();
    let label = |i: usize| sides[i].labels[s[i]][t[i]];
    if (0..n).any(|i| (i + 1..n).any(|j| label(i) != label(j))) {
        return Some(EdgeKind::EdgeLabel);
    }
    let dist = |i: usize| sides[i].dist[s[i]][t[i]];
    if (0..n).any(|i| (i + 1..n).any(|j| (dist(i) - dist(j)).abs() > d_t)) {
        return Some(EdgeKind::Distance);
    }
    None
}

/// Conflict graph over any number (≥ 2) of graphs.
pub fn build_conflict_graph_with(graphs: &[&ReducedGraph], opts: &ConflictOptions<'_>) -> Result<ConflictGraph> {
    if graphs.len() < 2 {
        return Err(Error::InvalidParameter("a conflict graph needs at least two graphs".into()));
    }
    let tuples = candidate_tuples(graphs, opts)?;
    let sides: Vec<Side<'_>> = graphs
        .iter()
        .map(|g| Side { graph: g, labels: g.edge_label_matrix(), dist: g.distance_matrix() })
        .collect();

    let vertices: Vec<ConflictVertex> = tuples
        .into_iter()
        .map(|coords| {
            let weight = match opts.weights {
                WeightScheme::Label => sides[0].graph.vertices[coords[0]].weight as f64,
                WeightScheme::Unit => 1.0,
            };
            ConflictVertex { coords, weight }
        })
        .collect();

    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            let (s, t) = (&vertices[a].coords, &vertices[b].coords);
            let kind = classify_pair(&sides, s, t, opts.layout.d_t)
                .or_else(|| opts.user_conflict.filter(|f| f(s, t)).map(|_| EdgeKind::User));
            if let Some(kind) = kind {
                edges.push(ConflictEdge { a, b, kind });
            }
        }
    }
    ConflictGraph::from_parts(
        vertices,
        edges,
        graphs.iter().map(|g| g.name.clone()).collect(),
        graphs.iter().map(|g| g.order()).collect(),
    )
}

/// Pairwise conflict graph under `layout`, weighted by the shared weight label.
pub fn build_conflict_graph(g: &ReducedGraph, g2: &ReducedGraph, layout: &Layout) -> ConflictGraph {
    let opts = ConflictOptions { tuple_cap: usize::MAX, ..ConflictOptions::new(*layout) };
    build_conflict_graph_with(&[g, g2], &opts).expect("pairwise build cannot exceed an unbounded cap")
}

pub fn build_nway_conflict_graph(graphs: &[&ReducedGraph], layout: &Layout) -> Result<ConflictGraph> {
    build_conflict_graph_with(graphs, &ConflictOptions::new(*layout))
}

/// Number of label-compatible pairings without building any edges.
pub fn pairing_count(g: &ReducedGraph, g2: &ReducedGraph, layout: &Layout) -> usize {
    g.vertices
        .iter()
        .map(|a| g2.vertices.iter().filter(|b| layout.matches(a, b)).count())
        .sum()
}
