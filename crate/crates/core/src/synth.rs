//! Seeded generators for synthetic molecules, labelled corpora and conflict
//! graphs. Used by the examples and the test suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classify::{CorpusEntry, LabeledCorpus};
use crate::conflict::{ConflictEdge, ConflictGraph, ConflictVertex, EdgeKind};
use crate::error::Result;
use crate::molgraph::{reduce, Atom, Bond, BondOrder, ClassLabel, Molecule, Position};
use crate::qubo::{PseudoBooleanPolynomial, Sense};

const C: u8 = 6;
const N: u8 = 7;
const O: u8 = 8;
const F: u8 = 9;
const S: u8 = 16;
const CL: u8 = 17;

/// Random conflict graph over `n` pairings drawn from a `side × side` grid,
/// `side = ⌈√n⌉ + 1`. Each vertex pair becomes an edge with probability
/// `density`; edges between pairings that share a coordinate are bijection
/// edges, the rest are user edges. Weights are integers in 1..=5.
pub fn random_conflict_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> ConflictGraph {
    let side = (n as f64).sqrt().ceil() as usize + 1;
    let mut cells: Vec<(usize, usize)> = (0..side).flat_map(|i| (0..side).map(move |j| (i, j))).collect();
    cells.shuffle(rng);
    cells.truncate(n);
    cells.sort_unstable();
    let vertices: Vec<ConflictVertex> = cells
        .iter()
        .map(|&(i, j)| ConflictVertex { coords: vec![i, j], weight: rng.gen_range(1..=5) as f64 })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                let shared = cells[a].0 == cells[b].0 || cells[a].1 == cells[b].1;
                let kind = if shared { EdgeKind::Bijection } else { EdgeKind::User };
                edges.push(ConflictEdge { a, b, kind });
            }
        }
    }
    ConflictGraph::from_parts(vertices, edges, vec!["g".into(), "h".into()], vec![side, side])
        .expect("generated graph is simple with positive weights")
}

/// Random multilinear polynomial with integer coefficients in −5..=5.
pub fn random_polynomial<R: Rng>(rng: &mut R, num_vars: usize, max_degree: usize, terms: usize) -> PseudoBooleanPolynomial {
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let mut p = PseudoBooleanPolynomial::new(num_vars, sense);
    let vars: Vec<usize> = (0..num_vars).collect();
    for _ in 0..terms {
        let degree = rng.gen_range(0..=max_degree.min(num_vars));
        let monomial: Vec<usize> = vars.choose_multiple(rng, degree).copied().collect();
        p.add_term(&monomial, rng.gen_range(-5..=5) as f64);
    }
    p
}

struct Builder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    free: Vec<u32>,
}

impl Builder {
    fn new() -> Self {
        Builder { atoms: Vec::new(), bonds: Vec::new(), free: Vec::new() }
    }

    fn atom(&mut self, element: u8, charge: i32, position: Position, valence: u32) -> usize {
        self.atoms.push(Atom::new(element, position).with_charge(charge));
        self.free.push(valence);
        self.atoms.len() - 1
    }

    fn bond(&mut self, a: usize, b: usize, order: BondOrder) {
        self.free[a] -= order.valence();
        self.free[b] -= order.valence();
        self.bonds.push(Bond::new(a, b, order));
    }

    fn finish(self, name: String, label: Option<ClassLabel>) -> Molecule {
        let mol = Molecule::new(name, self.atoms, self.bonds).expect("builder output is valid");
        match label {
            Some(l) => mol.with_label(l),
            None => mol,
        }
    }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn offset<R: Rng>(rng: &mut R, from: Position) -> Position {
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let length = rng.gen_range(1.2..1.6);
    [round4(from[0] + length * angle.cos()), round4(from[1] + length * angle.sin()), 0.0]
}

fn hexagon(b: &mut Builder) -> Vec<usize> {
    let ring: Vec<usize> = (0..6)
        .map(|i| {
            let a = i as f64 * std::f64::consts::PI / 3.0;
            b.atom(C, 0, [round4(1.39 * a.cos()), round4(1.39 * a.sin()), 0.0], 4)
        })
        .collect();
    for i in 0..6 {
        let order = if i % 2 == 0 { BondOrder::Double } else { BondOrder::Single };
        b.bond(ring[i], ring[(i + 1) % 6], order);
    }
    ring
}

/// Random small molecule: a tree of 2 to `max_atoms` heavy atoms over
/// C, N, O, S and Cl, optionally hanging off a six-membered ring.
pub fn random_molecule<R: Rng>(rng: &mut R, name: impl Into<String>, max_atoms: usize) -> Molecule {
    let mut b = Builder::new();
    let mut anchors = if rng.gen_bool(0.3) { hexagon(&mut b) } else { vec![b.atom(C, 0, [0.0; 3], 4)] };
    let extra = rng.gen_range(1..max_atoms.max(2));
    for _ in 0..extra {
        let open: Vec<usize> = anchors.iter().copied().filter(|&a| b.free[a] > 0).collect();
        let Some(&parent) = open.choose(rng) else { break };
        let (element, valence) = *[(C, 4), (C, 4), (N, 3), (O, 2), (S, 2), (CL, 1)].choose(rng).unwrap();
        let max_order = b.free[parent].min(valence).min(3);
        let order = match rng.gen_range(1..=max_order) {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            _ => BondOrder::Triple,
        };
        let pos = offset(rng, b.atoms[parent].position);
        let child = b.atom(element, 0, pos, valence);
        b.bond(parent, child, order);
        anchors.push(child);
    }
    b.finish(name.into(), None)
}

/// Nitro-aromatic family: a benzene ring carrying a charged nitro group and
/// zero to two small substituents.
pub fn nitro_aromatic<R: Rng>(rng: &mut R, name: impl Into<String>) -> Molecule {
    let mut b = Builder::new();
    let ring = hexagon(&mut b);
    let n = b.atom(N, 1, [2.85, 0.0, 0.0], 4);
    b.bond(ring[0], n, BondOrder::Single);
    let o1 = b.atom(O, 0, [3.55, 1.08, 0.0], 2);
    let o2 = b.atom(O, -1, [3.55, -1.08, 0.0], 1);
    b.bond(n, o1, BondOrder::Double);
    b.bond(n, o2, BondOrder::Single);
    let mut sites = vec![2, 3, 4];
    sites.shuffle(rng);
    for &site in sites.iter().take(rng.gen_range(0..=2)) {
        let element = *[C, CL, F].choose(rng).unwrap();
        let pos = b.atoms[ring[site]].position;
        let out = [round4(pos[0] * 2.08 / 1.39), round4(pos[1] * 2.08 / 1.39), 0.0];
        let sub = b.atom(element, 0, out, if element == C { 4 } else { 1 });
        b.bond(ring[site], sub, BondOrder::Single);
    }
    b.finish(name.into(), Some(ClassLabel::Mutagen))
}

/// Aliphatic alcohol family: a chain of two to four carbons ending in a
/// hydroxyl, sometimes with a methyl branch.
pub fn aliphatic_alcohol<R: Rng>(rng: &mut R, name: impl Into<String>) -> Molecule {
    let mut b = Builder::new();
    let len = rng.gen_range(2..=4);
    let mut chain = Vec::new();
    for i in 0..len {
        let y = if i % 2 == 0 { 0.0 } else { 0.87 };
        let c = b.atom(C, 0, [1.5 * i as f64, y, 0.0], 4);
        if let Some(&prev) = chain.last() {
            b.bond(prev, c, BondOrder::Single);
        }
        chain.push(c);
    }
    let last = *chain.last().unwrap();
    let o = b.atom(O, 0, [1.5 * len as f64, if len % 2 == 0 { 0.0 } else { 0.87 }, 0.0], 2);
    b.bond(last, o, BondOrder::Single);
    if len > 2 && rng.gen_bool(0.5) {
        let at = chain[1];
        let pos = b.atoms[at].position;
        let m = b.atom(C, 0, [pos[0], round4(pos[1] - 1.5), 0.0], 4);
        b.bond(at, m, BondOrder::Single);
    }
    b.finish(name.into(), Some(ClassLabel::NonMutagen))
}

/// Planted two-family corpus: `per_class` nitro-aromatics (mutagens) and
/// `per_class` alcohols (non-mutagens), interleaved, ids `m000`, `m001`, …
pub fn planted_molecules<R: Rng>(rng: &mut R, per_class: usize) -> Vec<Molecule> {
    (0..2 * per_class)
        .map(|i| {
            let name = format!("m{i:03}");
            if i % 2 == 0 {
                nitro_aromatic(rng, name)
            } else {
                aliphatic_alcohol(rng, name)
            }
        })
        .collect()
}

/// Reduces labelled molecules into a corpus keyed by molecule name.
pub fn corpus_from_molecules(molecules: &[Molecule]) -> Result<LabeledCorpus> {
    let entries = molecules
        .iter()
        .map(|m| {
            Ok(CorpusEntry {
                id: m.name.clone(),
                label: m.label.ok_or_else(|| crate::Error::Data(format!("{}: no class label", m.name)))?,
                graph: Some(reduce(m)?),
                fingerprint: m.fingerprint.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledCorpus::new(entries)
}

/// Planted corpus ready for cross-validation.
pub fn planted_corpus<R: Rng>(rng: &mut R, per_class: usize) -> Result<LabeledCorpus> {
    corpus_from_molecules(&planted_molecules(rng, per_class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::implicit_hydrogens;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conflict_graph_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 4..=12 {
            let g = random_conflict_graph(&mut rng, n, 0.5);
            assert_eq!(g.len(), n);
            for e in g.edges() {
                let (a, b) = (g.vertices()[e.a].pair(), g.vertices()[e.b].pair());
                let shared = a.0 == b.0 || a.1 == b.1;
                assert_eq!(shared, e.kind == EdgeKind::Bijection);
            }
            assert!((0..n).all(|v| (1.0..=5.0).contains(&g.weight(v))));
        }
    }

    #[test]
    fn generated_molecules_are_chemically_sane() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..50 {
            let m = random_molecule(&mut rng, format!("r{i}"), 6);
            implicit_hydrogens(&m).unwrap();
            reduce(&m).unwrap();
        }
        for m in planted_molecules(&mut rng, 10) {
            let g = reduce(&m).unwrap();
            let rings = g.vertices.iter().filter(|v| v.weight == 6).count();
            assert_eq!(rings, usize::from(m.label == Some(ClassLabel::Mutagen)));
        }
    }

    #[test]
    fn planted_corpus_is_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = planted_corpus(&mut rng, 5).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.labels().iter().filter(|l| l.is_positive()).count(), 5);
    }
}
