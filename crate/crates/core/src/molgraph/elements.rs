//! Element symbols and the standard valence table used for implicit hydrogens.

const SYMBOLS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

pub const HYDROGEN: u8 = 1;
pub const NITROGEN: u8 = 7;
pub const PHOSPHORUS: u8 = 15;

/// Atomic number for a symbol, case-sensitive as written in MOL files.
pub fn atomic_number(symbol: &str) -> Option<u8> {
    SYMBOLS.iter().position(|s| *s == symbol).map(|i| i as u8 + 1)
}

pub fn symbol(atomic_number: u8) -> &'static str {
    match atomic_number {
        1..=118 => SYMBOLS[atomic_number as usize - 1],
        _ => "?",
    }
}

/// H, C, N, O, S, P and the halogens F, Cl, Br, I.
pub fn standard_valence(atomic_number: u8) -> Option<u32> {
    match atomic_number {
        1 => Some(1),
        6 => Some(4),
        7 => Some(3),
        8 => Some(2),
        16 => Some(2),
        15 => Some(3),
        9 | 17 | 35 | 53 => Some(1),
        _ => None,
    }
}

pub fn is_nitrogen_family(atomic_number: u8) -> bool {
    matches!(atomic_number, NITROGEN | PHOSPHORUS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_round_trip() {
        for z in 1..=118u8 {
            assert_eq!(atomic_number(symbol(z)), Some(z));
        }
        assert_eq!(atomic_number("Cl"), Some(17));
        assert_eq!(atomic_number("CL"), None);
        assert_eq!(atomic_number("Xx"), None);
    }
}
