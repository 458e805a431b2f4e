//! MDL MOL / SDF (V2000) reader.
//!
//! Counts line: `aaabbb...V2000`. Atom block: x, y, z in columns 1-10,
//! 11-20, 21-30, element symbol in 32-34, legacy charge code in 37-39.
//! Bond block: `111222ttt`. `M  CHG` lines override every legacy charge.

use super::{elements, Atom, Bond, BondOrder, ClassLabel, Molecule};
use crate::error::{Error, Result};

/// Fixed-width column slice, trimmed. Missing columns read as "".
fn column(line: &str, start: usize, end: usize) -> &str {
    let end = end.min(line.len());
    if start >= end {
        return "";
    }
    line.get(start..end).unwrap_or("").trim()
}

fn legacy_charge(code: i32) -> i32 {
    match code {
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        _ => 0,
    }
}

fn parse_counts(line: &str, lineno: usize) -> Result<(usize, usize)> {
    if line.contains("V3000") {
        return Err(Error::parse(lineno, "V3000 connection tables are not supported"));
    }
    let fixed = (column(line, 0, 3).parse::<usize>(), column(line, 3, 6).parse::<usize>());
    if let (Ok(na), Ok(nb)) = fixed {
        return Ok((na, nb));
    }
    let mut tokens = line.split_whitespace();
    match (
        tokens.next().and_then(|t| t.parse().ok()),
        tokens.next().and_then(|t| t.parse().ok()),
    ) {
        (Some(na), Some(nb)) => Ok((na, nb)),
        _ => Err(Error::parse(lineno, format!("malformed counts line {line:?}"))),
    }
}

fn parse_atom(line: &str, lineno: usize) -> Result<Atom> {
    let fixed = (|| {
        let x = column(line, 0, 10).parse::<f64>().ok()?;
        let y = column(line, 10, 20).parse::<f64>().ok()?;
        let z = column(line, 20, 30).parse::<f64>().ok()?;
        let sym = column(line, 31, 34);
        if sym.is_empty() {
            return None;
        }
        let charge = column(line, 36, 39).parse::<i32>().unwrap_or(0);
        Some(([x, y, z], sym.to_string(), charge))
    })();
    let (pos, sym, code) = match fixed {
        Some(v) => v,
        None => {
            // tolerate hand-edited files whose columns drifted
            let tok: Vec<&str> = line.split_whitespace().collect();
            let parsed = (tok.len() >= 4)
                .then(|| -> Option<_> {
                    Some((
                        [tok[0].parse().ok()?, tok[1].parse().ok()?, tok[2].parse().ok()?],
                        tok[3].to_string(),
                        tok.get(5).and_then(|t| t.parse().ok()).unwrap_or(0),
                    ))
                })
                .flatten()
                .filter(|(_, sym, _): &([f64; 3], String, i32)| sym.starts_with(|c: char| c.is_ascii_alphabetic()));
            parsed.ok_or_else(|| {
                Error::parse(lineno, format!("atom/bond count mismatch: malformed atom line {line:?}"))
            })?
        }
    };
    let z = elements::atomic_number(&sym)
        .ok_or_else(|| Error::parse(lineno, format!("unknown element symbol {sym:?}")))?;
    if pos.iter().any(|c: &f64| !c.is_finite()) {
        return Err(Error::parse(lineno, "non-finite coordinate"));
    }
    Ok(Atom::new(z, pos).with_charge(legacy_charge(code)))
}

fn parse_bond(line: &str, lineno: usize, natoms: usize) -> Result<Bond> {
    let fixed = (
        column(line, 0, 3).parse::<usize>(),
        column(line, 3, 6).parse::<usize>(),
        column(line, 6, 9).parse::<u32>(),
    );
    let (a, b, code) = match fixed {
        (Ok(a), Ok(b), Ok(t)) => (a, b, t),
        _ => {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let parsed = (tok.len() >= 3)
                .then(|| -> Option<(usize, usize, u32)> {
                    Some((tok[0].parse().ok()?, tok[1].parse().ok()?, tok[2].parse().ok()?))
                })
                .flatten();
            parsed.ok_or_else(|| {
                Error::parse(lineno, format!("atom/bond count mismatch: malformed bond line {line:?}"))
            })?
        }
    };
    if a == 0 || b == 0 || a > natoms || b > natoms {
        return Err(Error::parse(
            lineno,
            format!("bond index out of range ({a}-{b} with {natoms} atoms)"),
        ));
    }
    if a == b {
        return Err(Error::parse(lineno, format!("bond joins atom {a} to itself")));
    }
    let order = BondOrder::from_code(code)
        .ok_or_else(|| Error::parse(lineno, format!("unsupported bond code {code}")))?;
    Ok(Bond::new(a - 1, b - 1, order))
}

fn parse_charge_line(line: &str, lineno: usize, atoms: &mut [Atom]) -> Result<()> {
    let tok: Vec<&str> = line.split_whitespace().skip(2).collect();
    let count: usize = tok
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(lineno, "malformed M  CHG line"))?;
    if tok.len() < 1 + 2 * count {
        return Err(Error::parse(lineno, "M  CHG entry count does not match its pairs"));
    }
    for pair in tok[1..1 + 2 * count].chunks(2) {
        let idx: usize = pair[0]
            .parse()
            .map_err(|_| Error::parse(lineno, "malformed M  CHG atom index"))?;
        let charge: i32 = pair[1]
            .parse()
            .map_err(|_| Error::parse(lineno, "malformed M  CHG charge"))?;
        let atom = idx
            .checked_sub(1)
            .and_then(|i| atoms.get_mut(i))
            .ok_or_else(|| Error::parse(lineno, format!("M  CHG atom index {idx} out of range")))?;
        atom.formal_charge = charge;
    }
    Ok(())
}

/// Parses a single MOL block (text up to `M  END` or an SDF `$$$$`).
pub fn parse_molfile(text: &str) -> Result<Molecule> {
    parse_record(&text.lines().collect::<Vec<_>>(), 0)
}

fn parse_record(lines: &[&str], offset: usize) -> Result<Molecule> {
    let lineno = |i: usize| offset + i + 1;
    if lines.iter().all(|l| l.trim().is_empty()) {
        return Err(Error::parse(lineno(0), "empty molecule record"));
    }
    if lines.len() < 4 {
        return Err(Error::parse(lineno(lines.len()), "truncated header: expected 3 header lines and a counts line"));
    }
    let name = lines[0].trim().to_string();
    let (natoms, nbonds) = parse_counts(lines[3], lineno(3))?;
    if natoms == 0 {
        return Err(Error::parse(lineno(3), "counts line declares zero atoms"));
    }

    let atom_start = 4;
    let bond_start = atom_start + natoms;
    let prop_start = bond_start + nbonds;
    if lines.len() < prop_start {
        return Err(Error::parse(
            lineno(lines.len()),
            format!("atom/bond count mismatch: counts line declares {natoms} atoms and {nbonds} bonds but the record ends early"),
        ));
    }

    let mut atoms = lines[atom_start..bond_start]
        .iter()
        .enumerate()
        .map(|(i, l)| parse_atom(l, lineno(atom_start + i)))
        .collect::<Result<Vec<_>>>()?;
    let bonds = lines[bond_start..prop_start]
        .iter()
        .enumerate()
        .map(|(i, l)| parse_bond(l, lineno(bond_start + i), natoms))
        .collect::<Result<Vec<_>>>()?;

    let mut label = None;
    let mut charges_reset = false;
    let mut i = prop_start;
    while i < lines.len() {
        let line = lines[i];
        if line.starts_with("M  END") {
            i += 1;
            break;
        }
        if line.starts_with("M  CHG") {
            if !charges_reset {
                atoms.iter_mut().for_each(|a| a.formal_charge = 0);
                charges_reset = true;
            }
            parse_charge_line(line, lineno(i), &mut atoms)?;
        } else if !line.trim().is_empty() && !line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(Error::parse(
                lineno(i),
                format!("atom/bond count mismatch: unexpected line {line:?} after the bond block"),
            ));
        }
        i += 1;
    }

    // SDF data items: "> <field>" followed by value lines
    while i < lines.len() {
        let line = lines[i].trim();
        if let Some(field) = line.strip_prefix('>').and_then(|rest| {
            let open = rest.find('<')?;
            let close = rest[open..].find('>')? + open;
            Some(rest[open + 1..close].to_ascii_lowercase())
        }) {
            if let Some(value) = lines.get(i + 1) {
                if matches!(field.as_str(), "label" | "class" | "mutagenicity" | "activity") {
                    label = Some(value.parse::<ClassLabel>().map_err(|e| Error::parse(lineno(i + 1), e.to_string()))?);
                }
            }
        }
        i += 1;
    }

    let mut mol = Molecule::new(name, atoms, bonds).map_err(|e| Error::parse(lineno(bond_start), e.to_string()))?;
    mol.label = label;
    Ok(mol)
}

/// Parses every record of an SD file, split on `$$$$`.
pub fn parse_sdf(text: &str) -> Result<Vec<Molecule>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    let mut start = 0;
    for (i, line) in lines.iter().enumerate() {
        if line.trim_end() == "$$$$" {
            out.push(parse_record(&lines[start..i], start)?);
            start = i + 1;
        }
    }
    let tail = &lines[start..];
    if tail.iter().any(|l| !l.trim().is_empty()) || out.is_empty() {
        out.push(parse_record(tail, start)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ETHANE: &str = "\
ethane
  hand

  2  1  0  0  0  0  0  0  0  0999 V2000
    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
    1.5000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
  1  2  1  0  0  0  0
M  END
";

    #[test]
    fn two_carbon_block() {
        let m = parse_molfile(ETHANE).unwrap();
        assert_eq!(m.name, "ethane");
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.bonds, vec![Bond::new(0, 1, BondOrder::Single)]);
        assert_eq!(m.atoms[1].position, [1.5, 0.0, 0.0]);
        assert!(m.atoms.iter().all(|a| a.element == 6 && a.formal_charge == 0));
    }

    #[test]
    fn charge_property_overrides_legacy_column() {
        let text = ETHANE
            .replace(
                "    1.5000    0.0000    0.0000 C   0  0",
                "    1.5000    0.0000    0.0000 C   0  3",
            )
            .replace("M  END", "M  CHG  1   1  -1\nM  END");
        let m = parse_molfile(&text).unwrap();
        assert_eq!(m.atoms[0].formal_charge, -1);
        // legacy +1 on atom 2 is discarded once M  CHG is present
        assert_eq!(m.atoms[1].formal_charge, 0);

        let legacy_only = ETHANE.replace(
            "    1.5000    0.0000    0.0000 C   0  0",
            "    1.5000    0.0000    0.0000 C   0  3",
        );
        assert_eq!(parse_molfile(&legacy_only).unwrap().atoms[1].formal_charge, 1);
    }

    #[test]
    fn bond_index_out_of_range() {
        let mut text = String::from("six\n\n\n  6  1  0  0  0  0  0  0  0  0999 V2000\n");
        for i in 0..6 {
            text.push_str(&format!("{:10.4}    0.0000    0.0000 C   0  0  0  0\n", i as f64));
        }
        text.push_str("  1  7  1  0\nM  END\n");
        let err = parse_molfile(&text).unwrap_err().to_string();
        assert!(err.contains("bond index out of range"), "{err}");
        assert!(err.starts_with("line 11"), "{err}");
    }

    #[test]
    fn rejects_aromatic_and_unknown_symbols() {
        let aromatic = ETHANE.replace("  1  2  1  0", "  1  2  4  0");
        assert!(parse_molfile(&aromatic).unwrap_err().to_string().contains("unsupported bond code 4"));
        let unknown = ETHANE.replace(" C   0  0  0  0  0  0  0  0  0  0  0  0\n  ", " Qq  0  0  0  0  0  0  0  0  0  0  0  0\n  ");
        assert!(parse_molfile(&unknown).unwrap_err().to_string().contains("unknown element"));
    }

    #[test]
    fn count_mismatch_and_bad_counts() {
        let short = ETHANE.replace("  2  1  0", "  3  1  0");
        assert!(parse_molfile(&short).unwrap_err().to_string().contains("mismatch"));
        let extra = ETHANE.replace("  2  1  0", "  2  0  0");
        assert!(parse_molfile(&extra).unwrap_err().to_string().contains("mismatch"));
        let garbage = ETHANE.replace("  2  1  0  0  0  0  0  0  0  0999 V2000", "xx");
        assert!(parse_molfile(&garbage).unwrap_err().to_string().contains("counts line"));
        assert!(parse_molfile("").is_err());
    }

    #[test]
    fn sdf_records_and_labels() {
        let two = format!("{ETHANE}> <label>\nmutagen\n\n$$$${}\n{ETHANE}$$$$\n", "");
        let mols = parse_sdf(&two).unwrap();
        assert_eq!(mols.len(), 2);
        assert_eq!(mols[0].label, Some(ClassLabel::Mutagen));
        assert_eq!(mols[1].label, None);
    }
}
