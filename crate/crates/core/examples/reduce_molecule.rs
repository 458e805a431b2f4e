// Parse a V2000 molfile and contract its rings into a reduced graph.
//
// `cargo run --example reduce_molecule [path.mol]`

use cokplex::molgraph::{detect_rings, implicit_hydrogens, parse_molfile, reduce, ReducedGraph};

const DEFAULT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/naphthylammonium.mol");

pub fn run_example() -> cokplex::Result<ReducedGraph> {
    let path = std::env::args().nth(1).filter(|a| a.ends_with(".mol") || a.ends_with(".sdf"));
    let text = std::fs::read_to_string(path.as_deref().unwrap_or(DEFAULT))?;
    let mol = parse_molfile(&text)?;
    println!("{}: {} atoms, {} bonds", mol.name, mol.atoms.len(), mol.bonds.len());
    println!("implicit H: {:?}", implicit_hydrogens(&mol)?);
    println!("rings: {:?}", detect_rings(&mol));
    let graph = reduce(&mol)?;
    println!("{}", graph.to_json_pretty());
    print!("{}", graph.to_dot());
    Ok(graph)
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
