//! Molecules, their parsers, and the ring-contracted labelled graph used for
//! conflict-graph construction.

mod elements;
mod json;
mod molfile;
mod reduce;
mod rings;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::Fingerprint;

pub use elements::{atomic_number, standard_valence, symbol};
pub use json::{parse_molecule_json, MoleculeJson};
pub use molfile::{parse_molfile, parse_sdf};
pub use reduce::{
    implicit_hydrogens, reduce, BondCounts, EdgeLabel, ReducedEdge, ReducedGraph, VertexKind,
    VertexLabels,
};
pub use rings::{connected_components, detect_rings};

pub type Position = [f64; 3];

/// Covalent bond order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
}

impl BondOrder {
    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            1 => Some(BondOrder::Single),
            2 => Some(BondOrder::Double),
            3 => Some(BondOrder::Triple),
            _ => None,
        }
    }

    pub fn valence(self) -> u32 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

/// Mutagenicity class tag carried by training molecules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "mutagen")]
    Mutagen,
    #[serde(rename = "non-mutagen")]
    NonMutagen,
}

impl ClassLabel {
    pub fn is_positive(self) -> bool {
        self == ClassLabel::Mutagen
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Mutagen => "mutagen",
            ClassLabel::NonMutagen => "non-mutagen",
        })
    }
}

impl std::str::FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mutagen" | "1" | "positive" => Ok(ClassLabel::Mutagen),
            "non-mutagen" | "nonmutagen" | "0" | "negative" => Ok(ClassLabel::NonMutagen),
            other => Err(Error::Schema(format!("unknown class label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: u8,
    pub formal_charge: i32,
    pub position: Position,
    pub explicit_hydrogen: bool,
    /// Caller-supplied implicit hydrogen count; bypasses the valence table.
    pub implicit_h: Option<u32>,
}

impl Atom {
    pub fn new(element: u8, position: Position) -> Self {
        Atom {
            element,
            formal_charge: 0,
            position,
            explicit_hydrogen: element == elements::HYDROGEN,
            implicit_h: None,
        }
    }

    pub fn with_charge(mut self, charge: i32) -> Self {
        self.formal_charge = charge;
        self
    }

    pub fn symbol(&self) -> &'static str {
        symbol(self.element)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Self {
        Bond { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub name: String,
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub label: Option<ClassLabel>,
    pub fingerprint: Option<Fingerprint>,
}

impl Molecule {
    /// Builds a molecule, checking atom and bond invariants.
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self> {
        let mol = Molecule {
            name: name.into(),
            atoms,
            bonds,
            label: None,
            fingerprint: None,
        };
        mol.validate()?;
        Ok(mol)
    }

    pub fn with_label(mut self, label: ClassLabel) -> Self {
        self.label = Some(label);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::Schema("molecule has no atoms".into()));
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.element == 0 || atom.element > 118 {
                return Err(Error::Schema(format!("atom {i}: invalid atomic number {}", atom.element)));
            }
            if atom.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::Schema(format!("atom {i}: non-finite coordinate")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, bond) in self.bonds.iter().enumerate() {
            if bond.a >= self.atoms.len() || bond.b >= self.atoms.len() {
                return Err(Error::Schema(format!("bond {i}: bond index out of range")));
            }
            if bond.a == bond.b {
                return Err(Error::Schema(format!("bond {i}: self-loop on atom {}", bond.a)));
            }
            if !seen.insert((bond.a.min(bond.b), bond.a.max(bond.b))) {
                return Err(Error::Schema(format!("bond {i}: duplicate bond {}-{}", bond.a, bond.b)));
            }
        }
        Ok(())
    }

    /// Incident bond indices per atom, in bond order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for (i, bond) in self.bonds.iter().enumerate() {
            adj[bond.a].push(i);
            adj[bond.b].push(i);
        }
        adj
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.bonds
            .iter()
            .find(|bd| (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
    }
}

pub(crate) fn distance(p: &Position, q: &Position) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}
