//! Command-line front door: load graphs and operators from JSON, run any
//! verification or experiment, and emit CSV/JSON reports.
//!
//! Exit codes: 0 = all checks pass, 1 = a falsification was found,
//! 2 = input or usage error (single-line diagnostic on stderr).

use crate::discrete::{self};
use crate::discretize;
use crate::ensemble;
use crate::io;
use crate::linalg;
use crate::magnetic;
use crate::metric::{self, k_spectrum, SecularSystem};
use crate::torus::{self, decompose_lengths, DependencySpec};
use clap::{Parser, Subcommand};
use rand::Rng;
use std::error::Error;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nodal-lab",
    about = "Nodal counts, magnetic Hessians, and secular spectra on graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and genericity flags of a discrete operator.
    Spectrum {
        /// Operator JSON.
        #[arg(long)]
        input: PathBuf,
        /// Output directory (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also emit a flux sweep of all eigenvalue curves with this many
        /// sample points over one period.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Nodal counts, domains, and surplus of a discrete operator.
    Nodal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Surplus-versus-Morse table of a discrete operator.
    SurplusMorse {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Does the nodal count certify a tree? Cross-checked against topology.
    TreeTest {
        #[arg(long)]
        input: PathBuf,
    },
    /// Vanishing of the plain and eigenvalue-weighted Hessian sums.
    TraceIdentities {
        #[arg(long)]
        input: PathBuf,
        /// Relative tolerance for both sums.
        #[arg(long = "tol-trace")]
        tol_trace: Option<f64>,
    },
    /// Girth recovery from weighted Hessian traces, against a BFS oracle.
    Girth {
        #[arg(long)]
        input: PathBuf,
        /// Relative threshold separating cancellation from signal.
        #[arg(long = "tol-girth")]
        tol_girth: Option<f64>,
    },
    /// k-spectrum, nodal data, and Morse indices of a metric graph.
    MetricSpectrum {
        /// Metric-graph JSON.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scan ceiling; chosen from the total length when absent.
        #[arg(long)]
        kmax: Option<f64>,
    },
    /// Secular symmetry and the Hessian-on-torus formula.
    TorusCheck {
        #[arg(long)]
        input: PathBuf,
        /// Decomposition JSON; fully incommensurate lengths when absent.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Number of simple roots on which to compare Hessians.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative tolerance of the joint-negation symmetry.
        #[arg(long = "tol-symmetry")]
        tol_symmetry: Option<f64>,
        /// Max-entry tolerance between the two Hessian routes.
        #[arg(long = "tol-hessian")]
        tol_hessian: Option<f64>,
    },
    /// Surplus frequency histogram over the metric spectrum.
    SurplusStats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of generic eigenvalues to collect.
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Integer discretizations admitted by a length decomposition.
    Discretize {
        #[arg(long)]
        input: PathBuf,
        /// Decomposition JSON with the rational coefficient matrix.
        #[arg(long)]
        decomposition: PathBuf,
        /// Max entry of the enumerated subdivision vectors.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilateral spectral map: branches, Dirichlet set, trace lifting.
    EquilateralCheck {
        /// Graph JSON; the unit-equilateral metric graph is built on it.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = discretize::P_MAX)]
        pmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property sweep over seeded generalized Laplacians.
    Ensemble {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "ensemble-size", default_value_t = 100)]
        ensemble_size: usize,
    },
}

type CliResult = Result<bool, Box<dyn Error>>;

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(out: &Option<PathBuf>, name: &str, contents: &str) -> Result<(), Box<dyn Error>> {
    match out {
        None => print!("{contents}"),
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, contents)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn load_decomposition(
    lengths: &[f64],
    path: &Option<PathBuf>,
) -> Result<torus::LengthDecomposition, Box<dyn Error>> {
    let spec = match path {
        Some(p) => io::load_dependency_spec(p)?,
        None => DependencySpec::incommensurate(lengths.len()),
    };
    Ok(decompose_lengths(lengths, &spec)?)
}

fn execute(command: Command) -> CliResult {
    match command {
        Command::Spectrum { input, out, sweep } => {
            let op = io::load_operator(&input)?;
            let spectrum = op.spectrum()?;
            let mut csv = String::from("n,lambda,generic\n");
            for (i, &lambda) in spectrum.eigenvalues.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{:.12e},{}\n",
                    i + 1,
                    lambda,
                    spectrum.generic_flags[i]
                ));
            }
            emit(&out, "spectrum.csv", &csv)?;
            if let Some(points) = sweep {
                emit(&out, "flux_sweep.csv", &io::flux_sweep_csv(&op, points)?)?;
            }
            Ok(true)
        }
        Command::Nodal { input, out } => {
            let op = io::load_operator(&input)?;
            let spectrum = op.spectrum()?;
            let report = discrete::nodal_report(&op, &spectrum);
            emit(&out, "nodal.csv", &io::nodal_csv(&spectrum.eigenvalues, &report))?;
            Ok(true)
        }
        Command::SurplusMorse { input, out } => {
            let op = io::load_operator(&input)?;
            let table = magnetic::verify_surplus_equals_morse(&op)?;
            emit(&out, "surplus_morse.csv", &io::surplus_morse_csv(&table))?;
            println!(
                "surplus-morse: {} generic rows, {} skipped, pass = {}",
                table.rows.len(),
                table.skipped.len(),
                table.all_pass
            );
            Ok(table.all_pass)
        }
        Command::TreeTest { input } => {
            let op = io::load_operator(&input)?;
            let spectrum = op.spectrum()?;
            let report = discrete::nodal_report(&op, &spectrum);
            let verdict = discrete::is_tree_nodal_count(&report)?;
            let is_tree = op.graph().is_tree();
            println!(
                "tree-test: nodal count says tree = {}, topology says tree = {}",
                verdict.tree_count, is_tree
            );
            Ok(verdict.tree_count == is_tree)
        }
        Command::TraceIdentities { input, tol_trace } => {
            let op = io::load_operator(&input)?;
            let report = magnetic::trace_identities(&op)?;
            let tol = tol_trace.unwrap_or(magnetic::TRACE_TOL);
            let plain = linalg::max_abs(&report.sum_hessians)
                / report.scale.max(f64::MIN_POSITIVE);
            let weighted = linalg::max_abs(&report.weighted_sum)
                / report.weighted_scale.max(f64::MIN_POSITIVE);
            let pass = op.flux_count() == 0 || (plain < tol && weighted < tol);
            println!(
                "trace-identities: |sum H| = {plain:.3e}, |sum lambda H| = {weighted:.3e}, \
                 tol = {tol:.1e}, pass = {pass}"
            );
            Ok(pass)
        }
        Command::Girth { input, tol_girth } => {
            let op = io::load_operator(&input)?;
            let threshold = tol_girth.unwrap_or(magnetic::GIRTH_THRESHOLD);
            let report = magnetic::girth_from_traces_with_threshold(&op, threshold)?;
            let pass = report.girth == report.oracle;
            println!(
                "girth: traces say {}, BFS oracle says {}, pass = {pass}",
                report.girth, report.oracle
            );
            Ok(pass)
        }
        Command::MetricSpectrum { input, out, kmax } => {
            let mg = io::load_metric_graph(&input)?;
            let neumann = mg.is_neumann();
            let total = mg.total_length();
            let system = SecularSystem::new(mg)?;
            let k_max = kmax.unwrap_or(std::f64::consts::PI * 25.0 / total);
            let flux = vec![0.0; system.flux_count()];
            let roots = k_spectrum(&system, &flux, k_max)?;
            if !neumann {
                let mut csv = String::from("n,k,lambda,multiplicity\n");
                let mut n = 1;
                for root in &roots {
                    for _ in 0..root.multiplicity {
                        csv.push_str(&format!(
                            "{n},{:.12e},{:.12e},{}\n",
                            root.k,
                            root.k * root.k,
                            root.multiplicity
                        ));
                        n += 1;
                    }
                }
                emit(&out, "metric_spectrum.csv", &csv)?;
                return Ok(true);
            }
            let report = metric::metric_nodal_report(&system, &roots)?;
            let morse = metric_morse_column(&system, &roots, &report)?;
            emit(&out, "metric_spectrum.csv", &io::metric_spectrum_csv(&report, &morse))?;
            Ok(true)
        }
        Command::TorusCheck { input, decomposition, n, seed, tol_symmetry, tol_hessian } => {
            let mg = io::load_metric_graph(&input)?;
            let lengths = mg.lengths().to_vec();
            let total = mg.total_length();
            let system = SecularSystem::new(mg)?;
            let decomp = load_decomposition(&lengths, &decomposition)?;
            let beta = system.flux_count();
            let sym_tol = tol_symmetry.unwrap_or(1e-10);
            let hess_tol = tol_hessian.unwrap_or(1e-4);

            // Symmetry F(x; a) = F(-x; -a) at seeded random points.
            let mut rng = ensemble::rng_from_seed(seed);
            let dim = decomp.generator_count();
            let mut worst = 0.0f64;
            for _ in 0..1000 {
                let x: Vec<f64> =
                    (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect();
                let alpha: Vec<f64> =
                    (0..beta).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let plus = torus::f_on_torus(&system, &decomp, &x, &alpha)?;
                let neg_x: Vec<f64> = x.iter().map(|&v| -v).collect();
                let neg_a: Vec<f64> = alpha.iter().map(|&v| -v).collect();
                let minus = torus::f_on_torus(&system, &decomp, &neg_x, &neg_a)?;
                worst = worst.max((plus - minus).abs() / plus.abs().max(1.0));
            }
            let sym_pass = worst < sym_tol;

            // Torus Hessian against the root-tracked FD Hessian.
            let k_max = std::f64::consts::PI * (1.5 * n as f64 + 4.0) / total;
            let roots = k_spectrum(&system, &vec![0.0; beta], k_max)?;
            let mut compared = 0;
            let mut worst_h = 0.0f64;
            let mut morse_agree = true;
            for (i, root) in roots.iter().enumerate() {
                if compared == n {
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
                    metric::k_hessian_fd(&system, i + 2, root.k, gap, metric::K_FD_STEP)?;
                let via_torus = torus::torus_hessian(&system, &decomp, root.k)?;
                worst_h = worst_h
                    .max(linalg::max_abs(&(direct.matrix.clone() - &via_torus.matrix)));
                morse_agree &= direct.morse_index == via_torus.morse_index;
                compared += 1;
            }
            let hess_pass = compared > 0 && worst_h < hess_tol && morse_agree;
            println!(
                "torus-check: symmetry defect {worst:.3e} (tol {sym_tol:.1e}), \
                 hessian defect {worst_h:.3e} on {compared} roots (tol {hess_tol:.1e}), \
                 morse agree = {morse_agree}"
            );
            Ok(sym_pass && hess_pass)
        }
        Command::SurplusStats { input, out, n } => {
            let mg = io::load_metric_graph(&input)?;
            let system = SecularSystem::new(mg)?;
            let histogram = torus::surplus_statistics(&system, n)?;
            emit(&out, "surplus_stats.csv", &io::surplus_stats_csv(&histogram))?;
            let pass = histogram.symmetric && histogram.not_single_valued;
            println!(
                "surplus-stats: counts {:?}, symmetric = {}, spread = {}",
                histogram.counts, histogram.symmetric, histogram.not_single_valued
            );
            Ok(pass)
        }
        Command::Discretize { input, decomposition, n, out } => {
            let mg = io::load_metric_graph(&input)?;
            let decomp = load_decomposition(mg.lengths(), &Some(decomposition))?;
            let points = discretize::enumerate_discretizations(&decomp, n)?;
            let json = serde_json::json!({
                "decomposition": serde_json::to_value(
                    io::DecompositionJson::from_decomposition(&decomp)
                )?,
                "discretizations": points,
            });
            emit(&out, "discretizations.json", &format!("{:#}\n", json))?;
            Ok(true)
        }
        Command::EquilateralCheck { input, pmax, out } => {
            let graph = io::load_graph(&input)?;
            let report = discretize::verify_equilateral_connection_with(&graph, pmax)?;
            let json = serde_json::json!({
                "pass": report.pass,
                "skipped_mu": report.skipped,
                "unmatched_roots": report.unmatched_roots,
                "mus": report
                    .mus
                    .iter()
                    .map(|m| {
                        serde_json::json!({
                            "index": m.index,
                            "mu": m.mu,
                            "branches": m
                                .branches
                                .iter()
                                .map(|b| serde_json::json!({
                                    "p": b.p,
                                    "k": b.k,
                                    "is_root": b.is_root,
                                    "trace_defect": b.trace_defect,
                                }))
                                .collect::<Vec<_>>(),
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            emit(&out, "equilateral_check.json", &format!("{:#}\n", json))?;
            Ok(report.pass)
        }
        Command::Ensemble { seed, ensemble_size } => run_ensemble(seed, ensemble_size),
    }
}

fn metric_morse_column(
    system: &SecularSystem,
    roots: &[metric::KRoot],
    report: &metric::MetricNodalReport,
) -> Result<Vec<Option<usize>>, Box<dyn Error>> {
    let beta = system.flux_count();
    let mut morse = vec![None; report.entries.len()];
    for (i, entry) in report.entries.iter().enumerate() {
        let Some(entry) = entry else { continue };
        if i == 0 {
            // Constant mode: the flux Hessian of k = 0 is not tracked.
            continue;
        }
        if beta == 0 {
            morse[i] = Some(0);
            continue;
        }
        let gap = roots
            .iter()
            .map(|r| (r.k - entry.k).abs())
            .filter(|&d| d > 1e-9)
            .fold(entry.k, f64::min);
        let hessian =
            metric::k_hessian_fd(system, i + 1, entry.k, gap, metric::K_FD_STEP)?;
        morse[i] = Some(hessian.morse_index);
    }
    Ok(morse)
}

fn run_ensemble(seed: u64, size: usize) -> CliResult {
    let mut rng = ensemble::rng_from_seed(seed);
    let mut surplus_failures = 0usize;
    let mut forbidden_failures = 0usize;
    let mut tree_failures = 0usize;
    let mut trace_failures = 0usize;
    let mut fully_generic = 0usize;
    for _ in 0..size {
        let graph = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let beta = graph.betti_number();
        let op = ensemble::random_generalized_laplacian(&mut rng, graph);
        let spectrum = op.spectrum()?;
        let report = discrete::nodal_report(&op, &spectrum);
        for (idx, entry) in report.entries.iter().enumerate() {
            let Some(entry) = entry else { continue };
            let hessian = magnetic::hessian_perturbative(&op, &spectrum, idx + 1)?;
            if entry.sigma != hessian.morse_index as i64 {
                surplus_failures += 1;
            }
        }
        if report.all_generic() {
            fully_generic += 1;
            let sigmas: Vec<i64> =
                report.entries.iter().map(|e| e.as_ref().unwrap().sigma).collect();
            if !magnetic::forbidden_surplus_check(&sigmas, beta) {
                forbidden_failures += 1;
            }
            let verdict = discrete::is_tree_nodal_count(&report)?;
            if verdict.tree_count != op.graph().is_tree() {
                tree_failures += 1;
            }
            if !magnetic::trace_identities(&op)?.pass {
                trace_failures += 1;
            }
        }
    }
    let pass = surplus_failures == 0
        && forbidden_failures == 0
        && tree_failures == 0
        && trace_failures == 0;
    println!(
        "ensemble: {size} trials ({fully_generic} fully generic), failures: \
         surplus-morse {surplus_failures}, forbidden-shape {forbidden_failures}, \
         tree-test {tree_failures}, trace {trace_failures}, pass = {pass}"
    );
    Ok(pass)
}
