//! Acceptance gate: one test per criterion, each printing a single pass/fail
//! line. Tolerances and ensemble sizes are pinned here, not read from config.

use nodal_lab::discrete::{self, DiscreteOperator};
use nodal_lab::discretize;
use nodal_lab::ensemble;
use nodal_lab::graph::CombinatorialGraph;
use nodal_lab::linalg;
use nodal_lab::magnetic;
use nodal_lab::metric::{self, k_spectrum, MetricGraph, SecularSystem};
use nodal_lab::torus::{self, decompose_lengths, DependencySpec};
use num_rational::Rational64;
use rand::Rng;
use std::f64::consts::PI;

/// Seed of every randomized criterion; fixing it makes the gate reproducible.
const SEED: u64 = 20260824;
/// Ensemble size for the surplus/trace/tree criteria.
const ENSEMBLE_SIZE: usize = 1000;
/// Perturbative-versus-FD Hessian comparisons and their max-entry tolerance.
const FD_COMPARISONS: usize = 100;
const FD_TOL: f64 = 1e-5;
/// Relative tolerance of the two trace identities.
const TRACE_TOL: f64 = 1e-6;
/// Girth ensemble size.
const GIRTH_TRIALS: usize = 200;
/// Metric tree criterion: generic eigenvalues checked per graph.
const TREE_EIGENVALUES: usize = 50;
/// Interval root positions against n pi / L.
const INTERVAL_ROOT_TOL: f64 = 1e-9;
/// Non-tree dichotomy: generic indices inspected and minimum occurrence rate.
const DICHOTOMY_INDICES: usize = 200;
const DICHOTOMY_RATE: f64 = 0.10;
/// Secular symmetry points per graph and relative tolerance.
const SYMMETRY_POINTS: usize = 1000;
const SYMMETRY_TOL: f64 = 1e-10;
/// Hessian-on-torus comparisons and max-entry tolerance.
const TORUS_ROOTS: usize = 20;
const TORUS_HESSIAN_TOL: f64 = 1e-4;
/// Branch/root agreement and trace-lift tolerance of the equilateral map.
const BRANCH_TOL: f64 = 1e-8;
const LIFT_TOL: f64 = 1e-6;
/// Revisit statistics: reference roots, revisits per root, neighborhood size.
const REVISIT_REFERENCES: usize = 3;
const REVISITS_PER_ROOT: usize = 10;
const REVISIT_DELTA: f64 = 1e-2;

fn report(criterion: &str, pass: bool) {
    println!("criterion {criterion}: {}", if pass { "pass" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed");
}

fn fig1_graph() -> CombinatorialGraph {
    CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
}

fn fig1_operator(diagonal: &[f64]) -> DiscreteOperator {
    DiscreteOperator::generalized(fig1_graph(), &[-1.0; 5], diagonal).unwrap()
}

fn lasso_metric() -> MetricGraph {
    let g = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap();
    MetricGraph::new(g, &[1.0, 1.0, 1.0, 2.0f64.sqrt()]).unwrap()
}

fn bowtie_metric() -> MetricGraph {
    // Two triangles sharing vertex 1; incommensurate lengths.
    let g = CombinatorialGraph::new(
        5,
        &[(1, 2), (1, 3), (2, 3), (1, 4), (1, 5), (4, 5)],
    )
    .unwrap();
    MetricGraph::new(
        g,
        &[1.0, 2.0f64.sqrt(), 3.0f64.sqrt() / 2.0, 0.9, 5.0f64.sqrt() / 3.0, 1.1],
    )
    .unwrap()
}

fn lasso_decomposition() -> (SecularSystem, torus::LengthDecomposition) {
    let mg = lasso_metric();
    let lengths = mg.lengths().to_vec();
    let system = SecularSystem::new(mg).unwrap();
    let one = Rational64::from_integer(1);
    let zero = Rational64::from_integer(0);
    let spec = DependencySpec {
        coefficients: vec![vec![one, zero], vec![one, zero], vec![one, zero], vec![zero, one]],
    };
    (system, decompose_lengths(&lengths, &spec).unwrap())
}

fn phi_sequence(op: &DiscreteOperator) -> Vec<usize> {
    let spectrum = op.spectrum().unwrap();
    let nodal = discrete::nodal_report(op, &spectrum);
    nodal
        .entries
        .iter()
        .map(|e| e.as_ref().expect("criterion graph is fully generic").phi)
        .collect()
}

#[test]
fn criterion_01_fig1_nodal_counts() {
    let first = phi_sequence(&fig1_operator(&[1.0, 2.0, 3.0, 4.0]));
    let second = phi_sequence(&fig1_operator(&[4.0, 3.0, 2.0, 1.0]));
    report(
        "01 (fig1 nodal counts)",
        first == vec![0, 2, 3, 3] && second == vec![0, 3, 3, 4],
    );
}

#[test]
fn criterion_02_surplus_equals_morse() {
    let mut rng = ensemble::rng_from_seed(SEED);
    let mut mismatch = 0usize;
    let mut fd_done = 0usize;
    let mut fd_worst = 0.0f64;
    for _ in 0..ENSEMBLE_SIZE {
        let graph = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let spectrum = op.spectrum().unwrap();
        let nodal = discrete::nodal_report(&op, &spectrum);
        for (idx, entry) in nodal.entries.iter().enumerate() {
            let Some(entry) = entry else { continue };
            let hessian = magnetic::hessian_perturbative(&op, &spectrum, idx + 1).unwrap();
            if entry.sigma != hessian.morse_index as i64 {
                mismatch += 1;
            }
            if fd_done < FD_COMPARISONS && op.graph().vertex_count() <= 7 {
                match magnetic::hessian_fd(&op, idx + 1, magnetic::FD_STEP) {
                    Ok(fd) => {
                        fd_worst = fd_worst
                            .max(linalg::max_abs(&(fd.matrix - &hessian.matrix)));
                        fd_done += 1;
                    }
                    Err(magnetic::MagneticError::GapTooSmall { .. }) => {}
                    Err(e) => panic!("unexpected FD failure: {e}"),
                }
            }
        }
    }
    println!(
        "  surplus=morse mismatches: {mismatch}; fd comparisons: {fd_done}, \
         worst entry diff {fd_worst:.3e}"
    );
    report(
        "02 (surplus = morse on ensemble)",
        mismatch == 0 && fd_done == FD_COMPARISONS && fd_worst < FD_TOL,
    );
}

#[test]
fn criterion_03_trace_identities() {
    let mut rng = ensemble::rng_from_seed(SEED);
    let mut computed = 0usize;
    let mut failures = 0usize;
    for _ in 0..ENSEMBLE_SIZE {
        let graph = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        match magnetic::trace_identities(&op) {
            Ok(r) => {
                computed += 1;
                let plain = linalg::max_abs(&r.sum_hessians) / r.scale.max(f64::MIN_POSITIVE);
                let weighted = linalg::max_abs(&r.weighted_sum)
                    / r.weighted_scale.max(f64::MIN_POSITIVE);
                if op.flux_count() > 0 && (plain > TRACE_TOL || weighted > TRACE_TOL) {
                    failures += 1;
                }
            }
            Err(magnetic::MagneticError::DegenerateSpectrum) => {}
            Err(e) => panic!("unexpected trace failure: {e}"),
        }
    }
    println!("  computed on {computed}/{ENSEMBLE_SIZE} operators, failures: {failures}");
    report(
        "03 (trace identities on ensemble)",
        failures == 0 && computed >= ENSEMBLE_SIZE * 99 / 100,
    );
}

#[test]
fn criterion_04_tree_inverse_theorem() {
    let mut rng = ensemble::rng_from_seed(SEED);
    let mut wrong_verdicts = 0usize;
    let mut trees_seen = 0usize;
    let mut cycles_seen = 0usize;
    for _ in 0..ENSEMBLE_SIZE {
        let graph = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let spectrum = op.spectrum().unwrap();
        let nodal = discrete::nodal_report(&op, &spectrum);
        if !nodal.all_generic() {
            continue;
        }
        let verdict = discrete::is_tree_nodal_count(&nodal).unwrap();
        let is_tree = op.graph().is_tree();
        if is_tree {
            trees_seen += 1;
        } else {
            cycles_seen += 1;
        }
        if verdict.tree_count != is_tree {
            wrong_verdicts += 1;
        }
    }
    println!("  trees: {trees_seen}, non-trees: {cycles_seen}, wrong verdicts: {wrong_verdicts}");
    report(
        "04 (tree inverse theorem on ensemble)",
        wrong_verdicts == 0 && trees_seen > 0 && cycles_seen > 0,
    );
}

#[test]
fn criterion_05_girth_from_traces() {
    let mut rng = ensemble::rng_from_seed(SEED);
    let mut agree = 0usize;
    for _ in 0..GIRTH_TRIALS {
        let graph = ensemble::sample_graph(&mut rng, 8, 1, 3);
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let r = magnetic::girth_from_traces(&op).unwrap();
        if r.girth == r.oracle {
            agree += 1;
        }
    }
    println!("  agreement: {agree}/{GIRTH_TRIALS}");
    report("05 (girth from traces)", agree == GIRTH_TRIALS);
}

#[test]
fn criterion_06_forbidden_surplus_shapes() {
    let mut rng = ensemble::rng_from_seed(SEED);
    let mut violations = 0usize;
    let mut inspected = 0usize;
    for _ in 0..ENSEMBLE_SIZE {
        let graph = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let beta = graph.betti_number();
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let spectrum = op.spectrum().unwrap();
        let nodal = discrete::nodal_report(&op, &spectrum);
        if beta == 0 || !nodal.all_generic() {
            continue;
        }
        inspected += 1;
        let sigmas: Vec<i64> =
            nodal.entries.iter().map(|e| e.as_ref().unwrap().sigma).collect();
        if !magnetic::forbidden_surplus_check(&sigmas, beta) {
            violations += 1;
        }
    }
    println!("  inspected {inspected} fully generic cycle graphs, violations: {violations}");
    report(
        "06 (forbidden surplus shapes)",
        violations == 0 && inspected > ENSEMBLE_SIZE / 2,
    );
}

#[test]
fn criterion_07_metric_tree_counts() {
    // Interval of length pi: roots at n pi / L = n.
    let interval_graph = CombinatorialGraph::new(2, &[(1, 2)]).unwrap();
    let interval = MetricGraph::new(interval_graph, &[PI]).unwrap();
    let system = SecularSystem::new(interval).unwrap();
    let roots = k_spectrum(&system, &[], (TREE_EIGENVALUES + 2) as f64).unwrap();
    let mut interval_ok = roots.len() >= TREE_EIGENVALUES;
    for (i, root) in roots.iter().take(TREE_EIGENVALUES).enumerate() {
        interval_ok &= (root.k - (i + 1) as f64).abs() < INTERVAL_ROOT_TOL;
    }

    let mut tree_ok = true;
    let mut rng = ensemble::rng_from_seed(SEED);
    let sturm = |mg: MetricGraph| -> bool {
        let total = mg.total_length();
        let system = SecularSystem::new(mg).unwrap();
        let k_max = PI * (TREE_EIGENVALUES as f64 + 10.0) / total;
        let roots = k_spectrum(&system, &[], k_max).unwrap();
        let nodal = metric::metric_nodal_report(&system, &roots).unwrap();
        let mut checked = 0;
        for (n, entry) in nodal.generic_entries() {
            if checked == TREE_EIGENVALUES {
                break;
            }
            if entry.sigma != 0 || entry.nu != n {
                return false;
            }
            checked += 1;
        }
        checked == TREE_EIGENVALUES
    };
    for _ in 0..2 {
        let tree = ensemble::random_tree(&mut rng, 6);
        let lengths: Vec<f64> =
            (0..tree.edge_count()).map(|_| rng.gen_range(0.5..1.5)).collect();
        tree_ok &= sturm(MetricGraph::new(tree, &lengths).unwrap());
    }
    report("07 (metric sturm on interval and trees)", interval_ok && tree_ok);
}

#[test]
fn criterion_08_metric_nontree_dichotomy() {
    let check = |mg: MetricGraph| -> bool {
        let total = mg.total_length();
        let system = SecularSystem::new(mg).unwrap();
        let flux = vec![0.0; system.flux_count()];
        // Generous window: the bowtie loses many roots to vertex-vanishing
        // eigenfunctions and degeneracies before reaching the index quota.
        let k_max = PI * (2.5 * DICHOTOMY_INDICES as f64 + 20.0) / total;
        let roots = k_spectrum(&system, &flux, k_max).unwrap();
        let nodal = metric::metric_nodal_report(&system, &roots).unwrap();
        let mut surplus_hits = 0usize;
        let mut domain_hits = 0usize;
        let mut seen = 0usize;
        for (n, entry) in nodal.generic_entries() {
            if seen == DICHOTOMY_INDICES {
                break;
            }
            seen += 1;
            if entry.sigma > 0 {
                surplus_hits += 1;
            }
            if entry.nu < n {
                domain_hits += 1;
            }
        }
        println!(
            "  surplus>0 on {surplus_hits}/{seen}, nu<n on {domain_hits}/{seen}"
        );
        let need = (DICHOTOMY_RATE * seen as f64).ceil() as usize;
        seen == DICHOTOMY_INDICES && surplus_hits >= need && domain_hits >= need
    };
    let lasso_ok = check(lasso_metric());
    let bowtie_ok = check(bowtie_metric());
    report("08 (non-tree dichotomy, lasso and bowtie)", lasso_ok && bowtie_ok);
}

#[test]
fn criterion_09_secular_symmetry() {
    let mut rng = ensemble::rng_from_seed(SEED);
    let mut check = |mg: MetricGraph| -> bool {
        let lengths = mg.lengths().to_vec();
        let system = SecularSystem::new(mg).unwrap();
        let decomp =
            decompose_lengths(&lengths, &DependencySpec::incommensurate(lengths.len()))
                .unwrap();
        let beta = system.flux_count();
        // Joint negation is even or odd depending on the sign of det S; the
        // bowtie's scattering determinant is negative, so its realified
        // secular value flips sign globally.
        let sign = system.negation_sign();
        let mut worst = 0.0f64;
        for _ in 0..SYMMETRY_POINTS {
            let x: Vec<f64> =
                (0..lengths.len()).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let alpha: Vec<f64> = (0..beta).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let plus = torus::f_on_torus(&system, &decomp, &x, &alpha).unwrap();
            let neg_x: Vec<f64> = x.iter().map(|&v| -v).collect();
            let neg_a: Vec<f64> = alpha.iter().map(|&v| -v).collect();
            let minus = torus::f_on_torus(&system, &decomp, &neg_x, &neg_a).unwrap();
            worst = worst.max((plus - sign * minus).abs() / plus.abs().max(1.0));
        }
        println!("  worst symmetry defect {worst:.3e}");
        worst < SYMMETRY_TOL
    };
    let lasso_ok = check(lasso_metric());
    let bowtie_ok = check(bowtie_metric());
    report("09 (secular symmetry)", lasso_ok && bowtie_ok);
}

#[test]
fn criterion_10_hessian_on_torus() {
    let (system, decomp) = lasso_decomposition();
    let roots = k_spectrum(&system, &[0.0], 25.0).unwrap();
    let mut compared = 0usize;
    let mut worst = 0.0f64;
    let mut morse_agree = true;
    for (i, root) in roots.iter().enumerate() {
        if compared == TORUS_ROOTS {
            break;
        }
        if !root.simple() {
            continue;
        }
        let gap = roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| (r.k - root.k).abs())
            .fold(root.k, f64::min);
        let direct =
            metric::k_hessian_fd(&system, i + 2, root.k, gap, metric::K_FD_STEP).unwrap();
        let via_torus = torus::torus_hessian(&system, &decomp, root.k).unwrap();
        worst = worst.max(linalg::max_abs(&(direct.matrix.clone() - &via_torus.matrix)));
        morse_agree &= direct.morse_index == via_torus.morse_index;
        compared += 1;
    }
    println!("  compared {compared} roots, worst entry diff {worst:.3e}");
    report(
        "10 (hessian on torus)",
        compared == TORUS_ROOTS && worst < TORUS_HESSIAN_TOL && morse_agree,
    );
}

#[test]
fn criterion_11_equilateral_spectral_map() {
    let star = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
    let lasso = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap();
    let c4 = CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (3, 4)]).unwrap();
    let mut all_pass = true;
    for (name, graph) in [("star", star), ("lasso", lasso), ("c4", c4)] {
        let r = discretize::verify_equilateral_connection(&graph).unwrap();
        let branch_ok = r.mus.iter().all(|m| {
            m.branches.iter().all(|b| b.is_root && b.trace_defect <= LIFT_TOL)
        });
        let _ = BRANCH_TOL; // pinned inside verify_equilateral_connection
        println!(
            "  {name}: {} generic mu, unmatched roots {:?}",
            r.mus.len(),
            r.unmatched_roots
        );
        all_pass &= r.pass && branch_ok;
    }
    report("11 (equilateral spectral map)", all_pass);
}

#[test]
fn criterion_12_surplus_transfer() {
    let lasso = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap();
    let triangle_square = CombinatorialGraph::new(
        6,
        &[(1, 2), (1, 3), (2, 3), (1, 4), (1, 6), (4, 5), (5, 6)],
    )
    .unwrap();
    let mut all_pass = true;
    for (name, graph, beta) in [("lasso", lasso, 1i64), ("triangle-square", triangle_square, 2)] {
        let r = discretize::verify_surplus_transfer(&graph).unwrap();
        let alternation = r.mus.iter().all(|m| {
            m.branches.iter().all(|b| {
                let want = if b.p % 2 == 0 {
                    m.sigma_discrete
                } else {
                    beta - m.sigma_discrete
                };
                b.sigma_metric == want
            })
        });
        println!("  {name}: {} generic mu, vacuous = {}", r.mus.len(), r.vacuous);
        all_pass &= r.pass && !r.vacuous && alternation;
    }
    report("12 (surplus transfer)", all_pass);
}

#[test]
fn criterion_13_torus_revisit_invariants() {
    let (system, decomp) = lasso_decomposition();
    let roots = k_spectrum(&system, &[0.0], 10.0).unwrap();
    let mut references = 0usize;
    let mut all_agree = true;
    for root in roots.iter().filter(|r| r.simple()) {
        if references == REVISIT_REFERENCES {
            break;
        }
        let Ok(hessian) = torus::torus_hessian(&system, &decomp, root.k) else { continue };
        let x_ref = decomp.flow_point(root.k);
        let times = torus::revisit_times(
            &decomp,
            &x_ref,
            REVISIT_DELTA,
            5 * REVISITS_PER_ROOT,
            root.k + 0.5,
            5.0e4,
        );
        let mut verified = 0usize;
        for t in times {
            if verified == REVISITS_PER_ROOT {
                break;
            }
            let Some(partner) =
                torus::root_near_time(&system, &decomp, &x_ref, t, REVISIT_DELTA).unwrap()
            else {
                continue;
            };
            let Ok(h) = torus::torus_hessian(&system, &decomp, partner) else { continue };
            if h.morse_index != hessian.morse_index {
                all_agree = false;
            }
            verified += 1;
        }
        println!(
            "  reference k = {:.6}: morse {}, verified {verified} revisits",
            root.k, hessian.morse_index
        );
        if verified < REVISITS_PER_ROOT {
            all_agree = false;
        }
        references += 1;
    }
    report(
        "13 (revisit morse constancy)",
        references == REVISIT_REFERENCES && all_agree,
    );
}
