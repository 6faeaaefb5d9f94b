//! The arccos spectral map on unit-equilateral graphs: discrete
//! normalized-Laplacian eigenvalues generate the metric k-spectrum through
//! branch functions, and vertex traces lift the discrete eigenvectors.

use nodal_lab::discretize;
use nodal_lab::graph::CombinatorialGraph;

fn main() {
    let graphs = [
        ("path P4", CombinatorialGraph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap()),
        (
            "lasso",
            CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap(),
        ),
        (
            "C4",
            CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (3, 4)]).unwrap(),
        ),
    ];
    for (name, graph) in graphs {
        let report = discretize::verify_equilateral_connection(&graph).unwrap();
        println!("{name}: pass = {}", report.pass);
        for m in &report.mus {
            println!("  mu_{} = {:.6}", m.index, m.mu);
            for b in &m.branches {
                println!(
                    "    branch p = {}: k = {:.6}, root = {}, trace defect {:.2e}",
                    b.p, b.k, b.is_root, b.trace_defect
                );
            }
        }
        if !report.skipped.is_empty() {
            println!("  skipped (non-generic or boundary) mu: {:?}", report.skipped);
        }
        if !report.unmatched_roots.is_empty() {
            println!("  roots outside branches + pi Z: {:?}", report.unmatched_roots);
        }
        println!();
    }
}
