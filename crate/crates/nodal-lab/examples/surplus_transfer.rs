//! Even/odd branch transfer on unit-equilateral graphs: a discrete
//! eigenvalue's surplus reappears on even arccos branches and flips to
//! `beta - sigma` on odd branches, Morse indices included.

use nodal_lab::discretize;
use nodal_lab::graph::CombinatorialGraph;

fn main() {
    let graphs = [
        (
            "lasso (beta = 1)",
            CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap(),
        ),
        (
            "triangle + square (beta = 2)",
            CombinatorialGraph::new(
                6,
                &[(1, 2), (1, 3), (2, 3), (1, 4), (1, 6), (4, 5), (5, 6)],
            )
            .unwrap(),
        ),
    ];
    for (name, graph) in graphs {
        let report = discretize::verify_surplus_transfer(&graph).unwrap();
        println!("{name}: vacuous = {}, pass = {}", report.vacuous, report.pass);
        for m in &report.mus {
            println!(
                "  mu_{} = {:.6}: sigma = {}, morse = {}",
                m.index, m.mu, m.sigma_discrete, m.morse_discrete
            );
            for b in &m.branches {
                println!(
                    "    p = {}: k = {:.6}, sigma_metric = {}, morse_metric = {}, \
                     slope sign {:+}",
                    b.p, b.k, b.sigma_metric, b.morse_metric, b.slope_sign
                );
            }
        }
        println!();
    }
}
