//! Minimum cycle basis of the bond graph.
//!
//! Candidates are Horton cycles: for every root `v` and bond `(x, y)`, the
//! closed walk `P(v,x) + (x,y) + P(y,v)` over BFS shortest paths, kept when the
//! two paths meet only at `v`. Candidates are taken shortest first and accepted
//! when independent over GF(2) of the bond incidence vectors.

use std::collections::VecDeque;

use super::Molecule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Ring {
    /// Sorted atom indices.
    pub atoms: Vec<usize>,
    /// Sorted bond indices along the cycle.
    pub bonds: Vec<usize>,
}

/// Component id per atom, numbered in order of first appearance.
pub fn connected_components(mol: &Molecule) -> (usize, Vec<usize>) {
    let adj = mol.adjacency();
    let mut comp = vec![usize::MAX; mol.atoms.len()];
    let mut count = 0;
    for start in 0..mol.atoms.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for &e in &adj[a] {
                let b = mol.bonds[e].other(a);
                if comp[b] == usize::MAX {
                    comp[b] = count;
                    stack.push(b);
                }
            }
        }
        count += 1;
    }
    (count, comp)
}

/// Cycle space dimension |E| - |V| + c.
pub(crate) fn cycle_rank(mol: &Molecule) -> usize {
    let (c, _) = connected_components(mol);
    mol.bonds.len() + c - mol.atoms.len()
}

struct BfsTree {
    dist: Vec<usize>,
    /// (parent atom, bond used) per atom.
    parent: Vec<Option<(usize, usize)>>,
}

fn bfs(root: usize, nbrs: &[Vec<(usize, usize)>]) -> BfsTree {
    let n = nbrs.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        for &(b, e) in &nbrs[a] {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                parent[b] = Some((a, e));
                queue.push_back(b);
            }
        }
    }
    BfsTree { dist, parent }
}

impl BfsTree {
    /// Atoms and bonds on the tree path from `a` up to the root (root excluded).
    fn path(&self, mut a: usize) -> (Vec<usize>, Vec<usize>) {
        let mut atoms = Vec::new();
        let mut bonds = Vec::new();
        while let Some((p, e)) = self.parent[a] {
            atoms.push(a);
            bonds.push(e);
            a = p;
        }
        (atoms, bonds)
    }
}

type BitRow = Vec<u64>;

fn bit_row(bonds: &[usize], words: usize) -> BitRow {
    let mut row = vec![0u64; words];
    for &e in bonds {
        row[e / 64] |= 1 << (e % 64);
    }
    row
}

fn leading_bit(row: &BitRow) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// GF(2) basis kept in echelon form keyed by pivot bit.
struct Gf2Basis {
    rows: Vec<(usize, BitRow)>,
}

impl Gf2Basis {
    fn insert(&mut self, mut row: BitRow) -> bool {
        for (pivot, basis_row) in &self.rows {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                row.iter_mut().zip(basis_row).for_each(|(a, b)| *a ^= b);
            }
        }
        match leading_bit(&row) {
            Some(pivot) => {
                // keep rows reduced with respect to the new pivot
                for (_, basis_row) in self.rows.iter_mut() {
                    if basis_row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                        basis_row.iter_mut().zip(&row).for_each(|(a, b)| *a ^= b);
                    }
                }
                self.rows.push((pivot, row));
                true
            }
            None => false,
        }
    }
}

pub(crate) fn minimum_cycle_basis(mol: &Molecule) -> Vec<Ring> {
    let rank = cycle_rank(mol);
    if rank == 0 {
        return Vec::new();
    }
    let n = mol.atoms.len();
    let mut nbrs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, bond) in mol.bonds.iter().enumerate() {
        nbrs[bond.a].push((bond.b, e));
        nbrs[bond.b].push((bond.a, e));
    }
    nbrs.iter_mut().for_each(|l| l.sort_unstable());

    let mut candidates: Vec<Ring> = Vec::new();
    for root in 0..n {
        let tree = bfs(root, &nbrs);
        for (e, bond) in mol.bonds.iter().enumerate() {
            let (x, y) = (bond.a, bond.b);
            if tree.dist[x] == usize::MAX || tree.parent[y] == Some((x, e)) || tree.parent[x] == Some((y, e)) {
                continue;
            }
            let (px_atoms, px_bonds) = tree.path(x);
            let (py_atoms, py_bonds) = tree.path(y);
            if px_atoms.iter().any(|a| py_atoms.contains(a)) {
                continue;
            }
            let mut atoms: Vec<usize> = px_atoms.into_iter().chain(py_atoms).chain([root]).collect();
            let mut bonds: Vec<usize> = px_bonds.into_iter().chain(py_bonds).chain([e]).collect();
            atoms.sort_unstable();
            atoms.dedup();
            bonds.sort_unstable();
            if atoms.len() >= 3 {
                candidates.push(Ring { atoms, bonds });
            }
        }
    }
    candidates.sort_by(|a, b| a.bonds.len().cmp(&b.bonds.len()).then_with(|| a.bonds.cmp(&b.bonds)));
    candidates.dedup_by(|a, b| a.bonds == b.bonds);

    let words = mol.bonds.len().div_ceil(64);
    let mut basis = Gf2Basis { rows: Vec::new() };
    let mut rings = Vec::with_capacity(rank);
    for cand in candidates {
        if basis.insert(bit_row(&cand.bonds, words)) {
            rings.push(cand);
            if rings.len() == rank {
                break;
            }
        }
    }
    rings.sort_by(|a, b| a.atoms.cmp(&b.atoms));
    rings
}

/// Minimum cycle basis as sorted atom-index sets, ordered by smallest member.
pub fn detect_rings(mol: &Molecule) -> Vec<Vec<usize>> {
    minimum_cycle_basis(mol).into_iter().map(|r| r.atoms).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{Atom, Bond, BondOrder};

    fn carbon_graph(n: usize, edges: &[(usize, usize)]) -> Molecule {
        let atoms = (0..n).map(|i| Atom::new(6, [i as f64, 0.0, 0.0])).collect();
        let bonds = edges.iter().map(|&(a, b)| Bond::new(a, b, BondOrder::Single)).collect();
        Molecule::new("g", atoms, bonds).unwrap()
    }

    fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn benzene_has_one_ring() {
        let m = carbon_graph(6, &cycle_edges(6));
        assert_eq!(detect_rings(&m), vec![vec![0, 1, 2, 3, 4, 5]]);
    }

    #[test]
    fn butane_is_acyclic() {
        let m = carbon_graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(detect_rings(&m).is_empty());
    }

    #[test]
    fn naphthalene_two_fused_hexagons() {
        // 0-1-2-3-4-5 ring, shared edge 4-5, second ring 4-6-7-8-9-5
        let mut edges = cycle_edges(6);
        edges.extend([(4, 6), (6, 7), (7, 8), (8, 9), (9, 5)]);
        let m = carbon_graph(10, &edges);
        let rings = detect_rings(&m);
        assert_eq!(rings.len(), 2);
        assert_eq!(rings[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(rings[1], vec![4, 5, 6, 7, 8, 9]);
    }

    #[test]
    fn cubane_and_disconnected_components() {
        let cube = [
            (0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7),
        ];
        let m = carbon_graph(8, &cube);
        let rings = detect_rings(&m);
        assert_eq!(rings.len(), 12 - 8 + 1);
        assert!(rings.iter().all(|r| r.len() == 4));

        // two separate triangles plus an isolated atom
        let m = carbon_graph(7, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_eq!(connected_components(&m).0, 3);
        assert_eq!(detect_rings(&m), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn bicyclo_prefers_small_rings() {
        // norbornane-like: 7 atoms, bridges of length 2, 2, 1 between 0 and 3
        let m = carbon_graph(7, &[(0, 1), (1, 3), (0, 2), (2, 3), (0, 4), (4, 5), (5, 3), (0, 6), (6, 3)]);
        let rings = detect_rings(&m);
        assert_eq!(rings.len(), 9 - 7 + 1);
        let sizes: Vec<usize> = rings.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 4 + 4 + 5);
    }
}
