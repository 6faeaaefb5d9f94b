//! k-spectrum and nodal data of a metric lasso: a triangle of unit edges with
//! an incommensurate tail. Non-tree structure shows up as positive surplus
//! and missing nodal domains.

use nodal_lab::graph::CombinatorialGraph;
use nodal_lab::metric::{self, k_spectrum, MetricGraph, SecularSystem};

fn main() {
    let graph = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap();
    let mg = MetricGraph::new(graph, &[1.0, 1.0, 1.0, 2.0f64.sqrt()]).unwrap();
    println!("lasso: total length {:.6}", mg.total_length());
    let system = SecularSystem::new(mg).unwrap();
    let roots = k_spectrum(&system, &[0.0], 15.0).unwrap();
    let nodal = metric::metric_nodal_report(&system, &roots).unwrap();
    println!("  n  k          phi  nu  sigma");
    for (i, entry) in nodal.entries.iter().enumerate() {
        match entry {
            Some(e) => println!(
                "  {:2} {:.6}   {:2}  {:2}   {}",
                i + 1,
                e.k,
                e.phi,
                e.nu,
                e.sigma
            ),
            None => println!("  {:2} (non-generic: multiple root or vertex zero)", i + 1),
        }
    }
    let surpluses: Vec<i64> =
        nodal.generic_entries().map(|(_, e)| e.sigma).collect();
    println!(
        "surplus values seen: {:?} (tree spectra would be all zero)",
        surpluses
    );
}
