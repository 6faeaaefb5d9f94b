//! Recovering the girth of a graph from eigenvalue-weighted sums of flux
//! Hessians, checked against a BFS oracle.

use nodal_lab::ensemble;
use nodal_lab::magnetic;

fn main() {
    let mut rng = ensemble::rng_from_seed(5);
    println!("girth from weighted Hessian traces vs BFS oracle:");
    for trial in 0..12 {
        let graph = ensemble::sample_graph(&mut rng, 8, 1, 3);
        let summary = format!(
            "|V| = {}, |E| = {}, beta = {}",
            graph.vertex_count(),
            graph.edge_count(),
            graph.betti_number()
        );
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let report = magnetic::girth_from_traces(&op).unwrap();
        println!(
            "  trial {trial:2}: {summary}; traces say {}, oracle says {} \
             (signal ladder {:?})",
            report.girth,
            report.oracle,
            report
                .signals
                .iter()
                .map(|s| format!("{s:.1e}"))
                .collect::<Vec<_>>()
        );
        assert_eq!(report.girth, report.oracle);
    }
}
