use serde::{Deserialize, Serialize};

use super::{Atom, Bond, BondOrder, ClassLabel, Molecule};
use crate::error::{Error, Result};
use crate::similarity::Fingerprint;

/// On-disk molecule record. Bond endpoints are 0-based atom indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeJson {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<ClassLabel>,
    pub atoms: Vec<AtomJson>,
    #[serde(default)]
    pub bonds: Vec<BondJson>,
    /// Hex bit string, most significant bit first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    /// Fingerprint length when it is not a multiple of four (e.g. 166).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint_bits: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub z: u8,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub charge: i32,
    pub pos: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implicit_h: Option<i64>,
}

fn is_zero(v: &i32) -> bool {
    *v == 0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondJson {
    pub a: usize,
    pub b: usize,
    pub order: u32,
}

impl TryFrom<MoleculeJson> for Molecule {
    type Error = Error;

    fn try_from(doc: MoleculeJson) -> Result<Molecule> {
        let atoms = doc
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let pos: [f64; 3] = a.pos.as_slice().try_into().map_err(|_| {
                    Error::Schema(format!("atom {i}: position must have 3 components, got {}", a.pos.len()))
                })?;
                let implicit_h = match a.implicit_h {
                    Some(h) if h < 0 => {
                        return Err(Error::Schema(format!("atom {i}: negative implicit_h {h}")))
                    }
                    Some(h) => Some(h as u32),
                    None => None,
                };
                let mut atom = Atom::new(a.z, pos).with_charge(a.charge);
                atom.implicit_h = implicit_h;
                Ok(atom)
            })
            .collect::<Result<Vec<_>>>()?;
        let bonds = doc
            .bonds
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let order = BondOrder::from_code(b.order)
                    .ok_or_else(|| Error::Schema(format!("bond {i}: order must be 1, 2 or 3")))?;
                Ok(Bond::new(b.a, b.b, order))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut mol = Molecule::new(doc.name, atoms, bonds)?;
        mol.label = doc.label;
        mol.fingerprint = doc
            .fingerprint
            .as_deref()
            .map(|hex| Fingerprint::from_hex(hex, doc.fingerprint_bits))
            .transpose()?;
        Ok(mol)
    }
}

impl From<&Molecule> for MoleculeJson {
    fn from(m: &Molecule) -> Self {
        MoleculeJson {
            name: m.name.clone(),
            label: m.label,
            atoms: m
                .atoms
                .iter()
                .map(|a| AtomJson {
                    z: a.element,
                    charge: a.formal_charge,
                    pos: a.position.to_vec(),
                    implicit_h: a.implicit_h.map(i64::from),
                })
                .collect(),
            bonds: m
                .bonds
                .iter()
                .map(|b| BondJson { a: b.a, b: b.b, order: b.order.valence() })
                .collect(),
            fingerprint: m.fingerprint.as_ref().map(Fingerprint::to_hex),
            fingerprint_bits: m
                .fingerprint
                .as_ref()
                .filter(|f| f.len() % 4 != 0)
                .map(Fingerprint::len),
        }
    }
}

pub fn parse_molecule_json(text: &str) -> Result<Molecule> {
    let doc: MoleculeJson =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    doc.try_into()
}

impl Molecule {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MoleculeJson::from(self)).expect("molecule serializes")
    }
}
