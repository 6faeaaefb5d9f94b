//! The secular function as a function on a torus: length decomposition,
//! joint-negation symmetry, the Hessian-on-torus formula against root-tracked
//! finite differences, and Morse-index constancy on flow revisits.

use nodal_lab::graph::CombinatorialGraph;
use nodal_lab::linalg;
use nodal_lab::metric::{self, k_spectrum, MetricGraph, SecularSystem};
use nodal_lab::torus::{self, decompose_lengths, DependencySpec};
use num_rational::Rational64;

fn main() {
    let graph = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap();
    let lengths = [1.0, 1.0, 1.0, 2.0f64.sqrt()];
    let mg = MetricGraph::new(graph, &lengths).unwrap();
    let system = SecularSystem::new(mg).unwrap();

    // Three unit edges share one generator; the tail gets its own.
    let one = Rational64::from_integer(1);
    let zero = Rational64::from_integer(0);
    let spec = DependencySpec {
        coefficients: vec![vec![one, zero], vec![one, zero], vec![one, zero], vec![zero, one]],
    };
    let decomp = decompose_lengths(&lengths, &spec).unwrap();
    println!(
        "generators {:?}, periods {:?}",
        decomp.generators(),
        decomp.periods()
    );

    // Symmetry F(x; a) = F(-x; -a) at a few points.
    let mut worst = 0.0f64;
    for i in 0..200 {
        let x = [0.31 * i as f64, -0.17 * i as f64];
        let a = [0.05 * i as f64];
        let plus = torus::f_on_torus(&system, &decomp, &x, &a).unwrap();
        let minus =
            torus::f_on_torus(&system, &decomp, &[-x[0], -x[1]], &[-a[0]]).unwrap();
        worst = worst.max((plus - minus).abs() / plus.abs().max(1.0));
    }
    println!("joint-negation symmetry defect over 200 points: {worst:.3e}");

    // Hessian-on-torus vs tracked finite differences on the first roots.
    let roots = k_spectrum(&system, &[0.0], 12.0).unwrap();
    println!("\n  k          morse(torus)  morse(fd)  max entry diff");
    for (i, root) in roots.iter().enumerate().filter(|(_, r)| r.simple()).take(8) {
        let gap = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| (r.k - root.k).abs())
            .fold(root.k, f64::min);
        let fd = metric::k_hessian_fd(&system, i + 2, root.k, gap, metric::K_FD_STEP).unwrap();
        let tor = torus::torus_hessian(&system, &decomp, root.k).unwrap();
        println!(
            "  {:.6}   {}             {}          {:.3e}",
            root.k,
            tor.morse_index,
            fd.morse_index,
            linalg::max_abs(&(fd.matrix.clone() - &tor.matrix))
        );
    }

    // Flow revisits of the first simple root's neighborhood.
    let reference = roots.iter().find(|r| r.simple()).unwrap();
    let hessian = torus::torus_hessian(&system, &decomp, reference.k).unwrap();
    let x_ref = decomp.flow_point(reference.k);
    let delta = 1e-2;
    let times =
        torus::revisit_times(&decomp, &x_ref, delta, 20, reference.k + 0.5, 3.0e4);
    println!(
        "\nreference root k = {:.6} (morse {}), revisit morse indices:",
        reference.k, hessian.morse_index
    );
    let mut shown = 0;
    for t in times {
        let Some(partner) =
            torus::root_near_time(&system, &decomp, &x_ref, t, delta).unwrap()
        else {
            continue;
        };
        let h = torus::torus_hessian(&system, &decomp, partner).unwrap();
        println!("  k = {partner:12.6}: morse {}", h.morse_index);
        shown += 1;
        if shown == 10 {
            break;
        }
    }
}
