//! Nodal surplus versus Morse index of the zero-flux critical point, on one
//! fixed operator and on a seeded random batch.

use nodal_lab::ensemble;
use nodal_lab::graph::CombinatorialGraph;
use nodal_lab::magnetic;
use nodal_lab::discrete::DiscreteOperator;

fn main() {
    let graph =
        CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
    let op =
        DiscreteOperator::generalized(graph, &[-1.0; 5], &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let table = magnetic::verify_surplus_equals_morse(&op).unwrap();
    println!("fixed operator (beta = {}):", op.flux_count());
    println!("  n  lambda      sigma  morse  pass");
    for row in &table.rows {
        println!(
            "  {}  {:+.6}  {}      {}      {}",
            row.n, row.eigenvalue, row.sigma, row.morse, row.pass
        );
    }

    let mut rng = ensemble::rng_from_seed(7);
    let trials = 200;
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for _ in 0..trials {
        let graph = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let table = magnetic::verify_surplus_equals_morse(&op).unwrap();
        checked += table.rows.len();
        mismatches += table.rows.iter().filter(|r| !r.pass).count();
    }
    println!(
        "\nrandom batch: {trials} operators, {checked} generic eigenvalues, \
         {mismatches} mismatches"
    );
}
