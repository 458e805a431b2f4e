// Build the conflict graph of two small molecules and inspect its edges.
//
// `cargo run --example conflict_graph`

use cokplex::conflict::{build_conflict_graph, edge_census, ConflictGraph, Layout};
use cokplex::molgraph::{reduce, Atom, Bond, BondOrder, Molecule};

fn ethane(name: &str, length: f64) -> cokplex::Result<Molecule> {
    let atoms = vec![Atom::new(6, [0.0; 3]), Atom::new(6, [length, 0.0, 0.0])];
    Molecule::new(name, atoms, vec![Bond::new(0, 1, BondOrder::Single)])
}

pub fn run_example() -> cokplex::Result<Vec<ConflictGraph>> {
    let g = reduce(&ethane("short", 1.5)?)?;
    let h = reduce(&ethane("long", 2.5)?)?;
    let mut graphs = Vec::new();
    for d_t in [0.5, 1.0, f64::INFINITY] {
        let cg = build_conflict_graph(&g, &h, &Layout::default().with_threshold(d_t));
        let census = edge_census(&cg);
        println!(
            "d_t = {d_t}: {} pairings, {} bijection, {} edge-label, {} distance edges",
            cg.len(),
            census.bijection,
            census.edge_label,
            census.distance
        );
        graphs.push(cg);
    }
    print!("{}", graphs[0].to_dot());
    Ok(graphs)
}

#[allow(dead_code)]
fn main() -> cokplex::Result<()> {
    run_example().map(|_| ())
}
