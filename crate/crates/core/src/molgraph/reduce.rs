//! Ring contraction: every ring of the minimum cycle basis becomes one
//! weighted vertex, every other atom stays a vertex of weight 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::elements::{self, is_nitrogen_family};
use super::rings::minimum_cycle_basis;
use super::{BondOrder, Molecule, Position};
use crate::error::{Error, Result};

/// Per-atom implicit hydrogen counts.
///
/// `max(0, valence - Σ bond orders + adjustment)`, where N-family cations gain
/// `charge` and anions lose `|charge|`. Explicit H atoms get 0; atoms carrying
/// a caller-supplied count keep it.
pub fn implicit_hydrogens(mol: &Molecule) -> Result<Vec<u32>> {
    let mut bond_sum = vec![0u32; mol.atoms.len()];
    for bond in &mol.bonds {
        bond_sum[bond.a] += bond.order.valence();
        bond_sum[bond.b] += bond.order.valence();
    }
    mol.atoms
        .iter()
        .zip(bond_sum)
        .map(|(atom, used)| {
            if let Some(h) = atom.implicit_h {
                return Ok(h);
            }
            if atom.explicit_hydrogen {
                return Ok(0);
            }
            let valence = elements::standard_valence(atom.element).ok_or(Error::UnknownValence {
                atomic_number: atom.element,
                symbol: elements::symbol(atom.element),
            })? as i64;
            let charge = atom.formal_charge as i64;
            let adjust = if charge > 0 && is_nitrogen_family(atom.element) {
                charge
            } else if charge < 0 {
                charge
            } else {
                0
            };
            Ok((valence - used as i64 + adjust).max(0) as u32)
        })
        .collect()
}

/// Multiset of bond orders stored as counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BondCounts {
    pub single: u32,
    pub double: u32,
    pub triple: u32,
}

impl BondCounts {
    pub fn add(&mut self, order: BondOrder) {
        match order {
            BondOrder::Single => self.single += 1,
            BondOrder::Double => self.double += 1,
            BondOrder::Triple => self.triple += 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.single + self.double + self.triple == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Atom,
    Ring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexLabels {
    pub kind: VertexKind,
    /// 0 for ring vertices.
    pub atomic_number: u8,
    /// For rings, the sum over member atoms.
    pub implicit_h: u32,
    /// For rings, the sum over member atoms.
    pub formal_charge: i32,
    pub degree_signature: BondCounts,
    pub ring_bond_orders: BondCounts,
    pub weight: u32,
    pub position: Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    Artificial,
    Single,
    Double,
    Triple,
}

impl From<BondOrder> for EdgeLabel {
    fn from(order: BondOrder) -> Self {
        match order {
            BondOrder::Single => EdgeLabel::Single,
            BondOrder::Double => EdgeLabel::Double,
            BondOrder::Triple => EdgeLabel::Triple,
        }
    }
}

impl EdgeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Artificial => "artificial",
            EdgeLabel::Single => "single",
            EdgeLabel::Double => "double",
            EdgeLabel::Triple => "triple",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedEdge {
    pub u: usize,
    pub v: usize,
    pub label: EdgeLabel,
}

/// Ring-contracted labelled graph. Ring vertices come first, in ring order,
/// followed by the remaining atoms in file order. Edges are sorted by `(u, v)`
/// with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedGraph {
    pub name: String,
    pub vertices: Vec<VertexLabels>,
    pub edges: Vec<ReducedEdge>,
    pub member_atoms: Vec<Vec<usize>>,
}

impl ReducedGraph {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.vertices.iter().map(|v| v.weight as u64).sum()
    }

    /// Dense `n x n` edge-label lookup; `None` marks an absent edge.
    pub fn edge_label_matrix(&self) -> Vec<Vec<Option<EdgeLabel>>> {
        let n = self.order();
        let mut m = vec![vec![None; n]; n];
        for e in &self.edges {
            m[e.u][e.v] = Some(e.label);
            m[e.v][e.u] = Some(e.label);
        }
        m
    }

    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|a| self.vertices.iter().map(|b| super::distance(&a.position, &b.position)).collect())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order();
        if self.member_atoms.len() != n {
            return Err(Error::Schema("member_atoms length differs from vertex count".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(Error::Schema(format!("invalid edge {}-{}", e.u, e.v)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::Schema(format!("parallel edge {}-{}", e.u, e.v)));
            }
        }
        if let Some(v) = self.vertices.iter().find(|v| v.weight == 0) {
            return Err(Error::Schema(format!("vertex with zero weight: {v:?}")));
        }
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reduced graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: ReducedGraph = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", self.name.replace('"', "'"));
        for (i, v) in self.vertices.iter().enumerate() {
            let (text, shape) = match v.kind {
                VertexKind::Atom => (elements::symbol(v.atomic_number).to_string(), "circle"),
                VertexKind::Ring => (format!("R{}", v.weight), "doublecircle"),
            };
            let _ = writeln!(out, "  {i} [label=\"{text}\" shape={shape}];");
        }
        for e in &self.edges {
            let style = match e.label {
                EdgeLabel::Artificial => " style=dashed",
                EdgeLabel::Double => " penwidth=2",
                EdgeLabel::Triple => " penwidth=3",
                EdgeLabel::Single => "",
            };
            let _ = writeln!(out, "  {} -- {} [label=\"{}\"{style}];", e.u, e.v, e.label.as_str());
        }
        out.push_str("}\n");
        out
    }
}

/// Contracts each ring of the minimum cycle basis to a single vertex.
///
/// Fused rings keep their shared atoms (each ring counts them in its weight,
/// implicit hydrogens and charge) and are joined by an `artificial` edge. A
/// bond with both ends inside one ring yields no edge; any other bond links
/// every vertex holding one end to every vertex holding the other.
pub fn reduce(mol: &Molecule) -> Result<ReducedGraph> {
    let hydrogens = implicit_hydrogens(mol)?;
    let rings = minimum_cycle_basis(mol);

    let mut containers: Vec<Vec<usize>> = vec![Vec::new(); mol.atoms.len()];
    let mut vertices = Vec::new();
    let mut member_atoms = Vec::new();

    for ring in &rings {
        let id = vertices.len();
        let mut rb = BondCounts::default();
        for bond in &mol.bonds {
            if ring.atoms.binary_search(&bond.a).is_ok() && ring.atoms.binary_search(&bond.b).is_ok() {
                rb.add(bond.order);
            }
        }
        let mut centre = [0.0; 3];
        for &a in &ring.atoms {
            let p = mol.atoms[a].position;
            (0..3).for_each(|k| centre[k] += p[k]);
            containers[a].push(id);
        }
        let size = ring.atoms.len();
        centre.iter_mut().for_each(|c| *c /= size as f64);
        vertices.push(VertexLabels {
            kind: VertexKind::Ring,
            atomic_number: 0,
            implicit_h: ring.atoms.iter().map(|&a| hydrogens[a]).sum(),
            formal_charge: ring.atoms.iter().map(|&a| mol.atoms[a].formal_charge).sum(),
            degree_signature: BondCounts::default(),
            ring_bond_orders: rb,
            weight: size as u32,
            position: centre,
        });
        member_atoms.push(ring.atoms.clone());
    }

    let adjacency = mol.adjacency();
    for (a, atom) in mol.atoms.iter().enumerate() {
        if !containers[a].is_empty() {
            continue;
        }
        let mut dn = BondCounts::default();
        adjacency[a].iter().for_each(|&e| dn.add(mol.bonds[e].order));
        containers[a].push(vertices.len());
        vertices.push(VertexLabels {
            kind: VertexKind::Atom,
            atomic_number: atom.element,
            implicit_h: hydrogens[a],
            formal_charge: atom.formal_charge,
            degree_signature: dn,
            ring_bond_orders: BondCounts::default(),
            weight: 1,
            position: atom.position,
        });
        member_atoms.push(vec![a]);
    }

    let mut edges: BTreeMap<(usize, usize), EdgeLabel> = BTreeMap::new();
    for (i, ri) in rings.iter().enumerate() {
        for (j, rj) in rings.iter().enumerate().skip(i + 1) {
            if ri.atoms.iter().any(|a| rj.atoms.binary_search(a).is_ok()) {
                edges.insert((i, j), EdgeLabel::Artificial);
            }
        }
    }
    for bond in &mol.bonds {
        let (ca, cb) = (&containers[bond.a], &containers[bond.b]);
        if ca.iter().any(|v| cb.contains(v)) {
            continue;
        }
        for &va in ca {
            for &vb in cb {
                let key = (va.min(vb), va.max(vb));
                let label = EdgeLabel::from(bond.order);
                // fused-ring links stay artificial; otherwise keep the highest order
                edges
                    .entry(key)
                    .and_modify(|l| {
                        if *l != EdgeLabel::Artificial && label > *l {
                            *l = label;
                        }
                    })
                    .or_insert(label);
            }
        }
    }

    // ring degree signature: non-artificial reduced edges
    for (&(u, v), &label) in &edges {
        let order = match label {
            EdgeLabel::Artificial => continue,
            EdgeLabel::Single => BondOrder::Single,
            EdgeLabel::Double => BondOrder::Double,
            EdgeLabel::Triple => BondOrder::Triple,
        };
        for w in [u, v] {
            if vertices[w].kind == VertexKind::Ring {
                vertices[w].degree_signature.add(order);
            }
        }
    }

    Ok(ReducedGraph {
        name: mol.name.clone(),
        vertices,
        edges: edges.into_iter().map(|((u, v), label)| ReducedEdge { u, v, label }).collect(),
        member_atoms,
    })
}
