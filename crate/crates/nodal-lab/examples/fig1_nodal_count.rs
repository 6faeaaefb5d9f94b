//! Nodal counts of a 4-vertex, 5-edge graph under two diagonal potentials,
//! plus the tree verdict the count implies.

use nodal_lab::discrete::{self, DiscreteOperator};
use nodal_lab::graph::CombinatorialGraph;

fn main() {
    let graph =
        CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
    println!(
        "graph: |V| = {}, |E| = {}, beta = {}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.betti_number()
    );
    for diagonal in [[1.0, 2.0, 3.0, 4.0], [4.0, 3.0, 2.0, 1.0]] {
        let op =
            DiscreteOperator::generalized(graph.clone(), &[-1.0; 5], &diagonal).unwrap();
        let spectrum = op.spectrum().unwrap();
        let nodal = discrete::nodal_report(&op, &spectrum);
        println!("\ndiagonal {diagonal:?}");
        println!("  n  lambda      phi  nu  sigma");
        for (i, entry) in nodal.entries.iter().enumerate() {
            let e = entry.as_ref().expect("this operator is fully generic");
            println!(
                "  {}  {:+.6}  {}    {}   {}",
                i + 1,
                e.eigenvalue,
                e.phi,
                e.nu,
                e.sigma
            );
        }
        let verdict = discrete::is_tree_nodal_count(&nodal).unwrap();
        println!(
            "  nodal count says tree = {} (graph is tree = {})",
            verdict.tree_count,
            graph.is_tree()
        );
    }
}
