//! The bridge between metric and discrete spectra on equilateral graphs: the
//! random-walk transition matrix, integer discretizations of a length
//! decomposition, the arccos branch map between normalized-Laplacian
//! eigenvalues and metric wavenumbers, vertex-trace lifting, and the even/odd
//! branch transfer of nodal surplus and Morse index.

use crate::discrete::{self, DiscreteError, DiscreteOperator};
use crate::graph::{CombinatorialGraph, GraphError, SubdivisionMap};
use crate::magnetic::{self, MagneticError};
use crate::metric::{
    self, eigenfunction, k_spectrum, metric_nodal_report, MetricError, MetricGraph,
    SecularSystem,
};
use crate::torus::{LengthDecomposition, TorusError};
use nalgebra::DMatrix;
use num_rational::Rational64;
use thiserror::Error;

/// Margin around 0 and 2 inside which a normalized-Laplacian eigenvalue has no
/// arccos branch.
pub const MU_EDGE_TOL: f64 = 1e-9;
/// Agreement required between a branch value and a located metric root.
pub const BRANCH_ROOT_TOL: f64 = 1e-8;
/// Agreement required between metric vertex traces and the lifted discrete
/// eigenvector, after least-squares scaling.
pub const TRACE_LIFT_TOL: f64 = 1e-6;
/// Verification ceiling: branches `p = 0..=3` exercise both parities twice.
pub const P_MAX: usize = 3;

#[derive(Debug, Error)]
pub enum DiscretizeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Discrete(#[from] DiscreteError),
    #[error(transparent)]
    Magnetic(#[from] MagneticError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("eigenvalue {mu} is outside (0, 2); no arccos branch exists")]
    MuOutOfRange { mu: f64 },
    #[error("no integer point with entries <= {bound}; smallest feasible max entry is {hint:?}")]
    BoundTooSmall { bound: usize, hint: Option<usize> },
    #[error("subdivision counts {j:?} are not in the rational image of the decomposition")]
    NotInImage { j: Vec<usize> },
}

/// Row-stochastic random-walk matrix: `P[u][v] = 1/deg(u)` on edges.
///
/// Satisfies `P = I - D^{-1/2} L_norm D^{1/2}`, so `(mu, f)` of the normalized
/// Laplacian corresponds to the eigenpair `(1 - mu, D^{-1/2} f)` of `P`.
pub fn transition_matrix(graph: &CombinatorialGraph) -> DMatrix<f64> {
    let n = graph.vertex_count();
    let mut p = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in graph.edges() {
        p[(u - 1, v - 1)] = 1.0 / graph.degree(u) as f64;
        p[(v - 1, u - 1)] = 1.0 / graph.degree(v) as f64;
    }
    p
}

/// Exact consistency of `r x = j` over the rationals.
fn in_rational_image(coefficients: &[Vec<Rational64>], j: &[usize]) -> bool {
    let rows = coefficients.len();
    let cols = coefficients[0].len();
    let mut aug: Vec<Vec<Rational64>> = (0..rows)
        .map(|e| {
            let mut row = coefficients[e].clone();
            row.push(Rational64::from_integer(j[e] as i64));
            row
        })
        .collect();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| aug[r][col] != Rational64::from_integer(0)) else {
            continue;
        };
        aug.swap(row, p);
        let pv = aug[row][col];
        for r in 0..rows {
            if r != row && aug[r][col] != Rational64::from_integer(0) {
                let factor = aug[r][col] / pv;
                for c in col..=cols {
                    let sub = factor * aug[row][c];
                    aug[r][c] -= sub;
                }
            }
        }
        row += 1;
        if row == rows {
            break;
        }
    }
    // Consistent iff no eliminated row keeps a nonzero right-hand side.
    (row..rows).all(|r| aug[r][cols] == Rational64::from_integer(0))
}

fn image_points(decomp: &LengthDecomposition, bound: usize) -> Vec<Vec<usize>> {
    let edges = decomp.coefficients().len();
    let full_rank = decomp.generator_count() == edges;
    let mut j = vec![1usize; edges];
    let mut out = Vec::new();
    loop {
        if full_rank || in_rational_image(decomp.coefficients(), &j) {
            out.push(j.clone());
        }
        // Odometer over {1..bound}^edges.
        let mut pos = edges;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if j[pos] < bound {
                j[pos] += 1;
                break;
            }
            j[pos] = 1;
        }
    }
}

/// All integer vectors `j` with `1 <= j_e <= bound` lying in the rational
/// image of the decomposition's coefficient matrix.
pub fn enumerate_discretizations(
    decomp: &LengthDecomposition,
    bound: usize,
) -> Result<Vec<Vec<usize>>, DiscretizeError> {
    let points = image_points(decomp, bound);
    if !points.is_empty() {
        return Ok(points);
    }
    // Estimate the smallest feasible scale by widening the box a few times.
    let mut hint = None;
    let mut wide = bound.max(1);
    for _ in 0..6 {
        wide *= 2;
        let candidates = image_points(decomp, wide);
        if let Some(best) = candidates
            .iter()
            .map(|j| j.iter().copied().max().unwrap_or(0))
            .min()
        {
            hint = Some(best);
            break;
        }
    }
    Err(DiscretizeError::BoundTooSmall { bound, hint })
}

/// A metric graph together with one admissible integer discretization: edge
/// `e` splits into `j_e` unit pieces.
#[derive(Debug, Clone)]
pub struct DiscretizedVersion {
    pub source: MetricGraph,
    pub j: Vec<usize>,
    pub graph: CombinatorialGraph,
    pub map: SubdivisionMap,
}

impl DiscretizedVersion {
    pub fn new(
        source: &MetricGraph,
        decomp: &LengthDecomposition,
        j: &[usize],
    ) -> Result<Self, DiscretizeError> {
        if j.len() != source.graph().edge_count()
            || j.iter().any(|&c| c == 0)
            || !in_rational_image(decomp.coefficients(), j)
        {
            return Err(DiscretizeError::NotInImage { j: j.to_vec() });
        }
        let (graph, map) = source.graph().subdivide(j)?;
        Ok(Self { source: source.clone(), j: j.to_vec(), graph, map })
    }

    /// The unit-equilateral metric graph carried by the subdivided skeleton.
    pub fn equilateral(&self) -> Result<MetricGraph, MetricError> {
        MetricGraph::new(self.graph.clone(), &vec![1.0; self.graph.edge_count()])
    }
}

/// Wavenumbers `b_p(1 - mu)` of the arccos branch map, `p = 0..=p_max`;
/// branch `p` lands in `(p pi, (p+1) pi)` and the list is strictly increasing.
pub fn arccos_branches(mu: f64, p_max: usize) -> Result<Vec<f64>, DiscretizeError> {
    if !(mu > MU_EDGE_TOL && mu < 2.0 - MU_EDGE_TOL) {
        return Err(DiscretizeError::MuOutOfRange { mu });
    }
    let a = (1.0 - mu).acos();
    Ok((0..=p_max)
        .map(|p| {
            if p % 2 == 0 {
                p as f64 * std::f64::consts::PI + a
            } else {
                (p + 1) as f64 * std::f64::consts::PI - a
            }
        })
        .collect())
}

/// Per-branch outcome of the equilateral spectral connection.
#[derive(Debug, Clone)]
pub struct BranchCheck {
    pub p: usize,
    pub k: f64,
    pub is_root: bool,
    /// Sup defect of vertex traces against the lifted eigenvector, relative.
    pub trace_defect: f64,
}

/// Outcome for one generic normalized-Laplacian eigenvalue.
#[derive(Debug, Clone)]
pub struct MuReport {
    /// 1-based eigenvalue index.
    pub index: usize,
    pub mu: f64,
    pub branches: Vec<BranchCheck>,
}

/// Equilateral connection report for a unit-equilateral graph.
#[derive(Debug, Clone)]
pub struct EquilateralReport {
    pub mus: Vec<MuReport>,
    /// Non-generic eigenvalues (degenerate, vertex-vanishing, or mu in {0,2}).
    pub skipped: Vec<f64>,
    /// Metric roots below the ceiling matched by no branch and no `pi n`.
    pub unmatched_roots: Vec<f64>,
    pub pass: bool,
}

/// Verifies, on the unit-equilateral metric graph over `graph`, that arccos
/// branches of generic normalized-Laplacian eigenvalues are metric roots, that
/// vertex traces lift the discrete eigenvectors through `D^{-1/2}`, and that
/// every metric root is either a branch value or a multiple of pi.
pub fn verify_equilateral_connection(
    graph: &CombinatorialGraph,
) -> Result<EquilateralReport, DiscretizeError> {
    verify_equilateral_connection_with(graph, P_MAX)
}

/// As [`verify_equilateral_connection`], with an explicit branch ceiling.
pub fn verify_equilateral_connection_with(
    graph: &CombinatorialGraph,
    p_max: usize,
) -> Result<EquilateralReport, DiscretizeError> {
    let op = DiscreteOperator::normalized(graph.clone());
    let spectrum = op.spectrum()?;
    let mg = MetricGraph::new(graph.clone(), &vec![1.0; graph.edge_count()])?;
    let system = SecularSystem::new(mg)?;
    let k_max = (p_max + 1) as f64 * std::f64::consts::PI + 0.3;
    let flux = vec![0.0; system.flux_count()];
    let roots = k_spectrum(&system, &flux, k_max)?;

    let degrees: Vec<f64> = (1..=graph.vertex_count()).map(|v| graph.degree(v) as f64).collect();
    let mut mus = Vec::new();
    let mut skipped = Vec::new();
    for (idx, &mu) in spectrum.eigenvalues.iter().enumerate() {
        let interior = mu > MU_EDGE_TOL && mu < 2.0 - MU_EDGE_TOL;
        if !interior || !spectrum.generic_flags[idx] {
            skipped.push(mu);
            continue;
        }
        let lifted: Vec<f64> = spectrum
            .real_vector(idx + 1)
            .iter()
            .zip(&degrees)
            .map(|(&f, &d)| f / d.sqrt())
            .collect();
        let mut branches = Vec::new();
        for (p, k) in arccos_branches(mu, p_max)?.into_iter().enumerate() {
            let tol = BRANCH_ROOT_TOL * k.max(1.0);
            let is_root = roots.iter().any(|r| (r.k - k).abs() < tol);
            let trace_defect = if is_root {
                let pair = eigenfunction(&system, k)?;
                // Least-squares scale of the lift onto the measured traces.
                let num: f64 =
                    pair.vertex_values.iter().zip(&lifted).map(|(&v, &g)| v * g).sum();
                let den: f64 = lifted.iter().map(|&g| g * g).sum();
                let scale = num / den;
                let amp =
                    pair.vertex_values.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-300);
                pair.vertex_values
                    .iter()
                    .zip(&lifted)
                    .map(|(&v, &g)| (v - scale * g).abs())
                    .fold(0.0f64, f64::max)
                    / amp
            } else {
                f64::INFINITY
            };
            branches.push(BranchCheck { p, k, is_root, trace_defect });
        }
        mus.push(MuReport { index: idx + 1, mu, branches });
    }

    // Completeness: every root must be a branch value of some interior mu
    // (generic or not) or lie in pi Z.
    let p_span = (k_max / std::f64::consts::PI).ceil() as usize;
    let mut unmatched_roots = Vec::new();
    for root in &roots {
        let tol = BRANCH_ROOT_TOL * root.k.max(1.0);
        let near_pi = (root.k / std::f64::consts::PI).round() * std::f64::consts::PI;
        let mut matched = (root.k - near_pi).abs() < tol;
        if !matched {
            'outer: for &mu in &spectrum.eigenvalues {
                if !(mu > MU_EDGE_TOL && mu < 2.0 - MU_EDGE_TOL) {
                    continue;
                }
                for k in arccos_branches(mu, p_span)? {
                    if (root.k - k).abs() < tol {
                        matched = true;
                        break 'outer;
                    }
                }
            }
        }
        if !matched {
            unmatched_roots.push(root.k);
        }
    }

    let pass = unmatched_roots.is_empty()
        && mus.iter().all(|m| {
            m.branches.iter().all(|b| b.is_root && b.trace_defect <= TRACE_LIFT_TOL)
        });
    Ok(EquilateralReport { mus, skipped, unmatched_roots, pass })
}

/// One arccos branch of one generic eigenvalue in the transfer report.
#[derive(Debug, Clone)]
pub struct TransferBranch {
    pub p: usize,
    pub k: f64,
    pub sigma_metric: i64,
    pub morse_metric: usize,
    /// Sign of `d k_p / d mu`; must equal `(-1)^p`.
    pub slope_sign: i32,
    pub pass: bool,
}

/// Transfer data for one generic normalized-Laplacian eigenvalue.
#[derive(Debug, Clone)]
pub struct TransferMu {
    pub index: usize,
    pub mu: f64,
    pub sigma_discrete: i64,
    pub morse_discrete: usize,
    pub branches: Vec<TransferBranch>,
}

/// Even/odd branch transfer report on a unit-equilateral graph.
#[derive(Debug, Clone)]
pub struct SurplusTransferReport {
    /// True when no generic eigenvalue exists to transfer (or beta = 0).
    pub vacuous: bool,
    pub mus: Vec<TransferMu>,
    pub pass: bool,
}

/// Verifies that each generic discrete eigenvalue hands its surplus and Morse
/// index to the metric eigenvalues on even arccos branches and the
/// complementary values `beta - sigma`, `beta - morse` on odd branches, and
/// that branch slopes alternate in sign with parity.
pub fn verify_surplus_transfer(
    graph: &CombinatorialGraph,
) -> Result<SurplusTransferReport, DiscretizeError> {
    verify_surplus_transfer_with(graph, P_MAX)
}

/// As [`verify_surplus_transfer`], with an explicit branch ceiling.
pub fn verify_surplus_transfer_with(
    graph: &CombinatorialGraph,
    p_max: usize,
) -> Result<SurplusTransferReport, DiscretizeError> {
    let beta = graph.betti_number();
    if beta == 0 {
        return Ok(SurplusTransferReport { vacuous: true, mus: Vec::new(), pass: true });
    }
    let op = DiscreteOperator::normalized(graph.clone());
    let spectrum = op.spectrum()?;
    let nodal = discrete::nodal_report(&op, &spectrum);
    let mg = MetricGraph::new(graph.clone(), &vec![1.0; graph.edge_count()])?;
    let system = SecularSystem::new(mg)?;
    let k_max = (p_max + 1) as f64 * std::f64::consts::PI + 0.3;
    let flux = vec![0.0; beta];
    let roots = k_spectrum(&system, &flux, k_max)?;
    let metric_nodal = metric_nodal_report(&system, &roots)?;

    let mut mus = Vec::new();
    let mut pass = true;
    for (idx, &mu) in spectrum.eigenvalues.iter().enumerate() {
        let interior = mu > MU_EDGE_TOL && mu < 2.0 - MU_EDGE_TOL;
        if !interior || !spectrum.generic_flags[idx] {
            continue;
        }
        let Some(entry) = nodal.entries[idx].as_ref() else { continue };
        let sigma = entry.sigma;
        let morse = magnetic::hessian_perturbative(&op, &spectrum, idx + 1)?.morse_index;
        let mut branches = Vec::new();
        for (p, k) in arccos_branches(mu, p_max)?.into_iter().enumerate() {
            let tol = BRANCH_ROOT_TOL * k.max(1.0);
            let found = metric_nodal
                .entries
                .iter()
                .enumerate()
                .find_map(|(i, e)| {
                    e.as_ref().filter(|e| (e.k - k).abs() < tol).map(|e| (i + 1, e))
                });
            let Some((n_metric, metric_entry)) = found else {
                pass = false;
                branches.push(TransferBranch {
                    p,
                    k,
                    sigma_metric: i64::MIN,
                    morse_metric: usize::MAX,
                    slope_sign: 0,
                    pass: false,
                });
                continue;
            };
            let gap = roots
                .iter()
                .map(|r| (r.k - k).abs())
                .filter(|&d| d > tol)
                .fold(k, f64::min);
            let hessian =
                metric::k_hessian_fd(&system, n_metric, metric_entry.k, gap, metric::K_FD_STEP)?;
            let h = 1e-5;
            let slope = arccos_branches(mu + h, p_max)?[p] - arccos_branches(mu - h, p_max)?[p];
            let slope_sign = if slope > 0.0 { 1 } else { -1 };
            let parity_sign = if p % 2 == 0 { 1 } else { -1 };
            let (want_sigma, want_morse) = if p % 2 == 0 {
                (sigma, morse)
            } else {
                (beta as i64 - sigma, beta - morse)
            };
            let branch_pass = metric_entry.sigma == want_sigma
                && hessian.morse_index == want_morse
                && slope_sign == parity_sign;
            pass &= branch_pass;
            branches.push(TransferBranch {
                p,
                k,
                sigma_metric: metric_entry.sigma,
                morse_metric: hessian.morse_index,
                slope_sign,
                pass: branch_pass,
            });
        }
        mus.push(TransferMu {
            index: idx + 1,
            mu,
            sigma_discrete: sigma,
            morse_discrete: morse,
            branches,
        });
    }
    if mus.is_empty() {
        return Ok(SurplusTransferReport { vacuous: true, mus, pass: true });
    }
    Ok(SurplusTransferReport { vacuous: false, mus, pass })
}

/// Directional derivatives of the secular function along the homotopy from
/// the flow direction (lengths) to an integer discretization direction.
#[derive(Debug, Clone)]
pub struct DirectionalSignReport {
    /// Per root: `(k, constant_nonzero_sign)`.
    pub per_root: Vec<(f64, bool)>,
    pub pass: bool,
}

/// At each given simple root, checks that `d(t) . grad F` with
/// `d(t) = t j + (1 - t) l` keeps one nonzero sign for `t` in `{0, 1/4, 1/2,
/// 3/4, 1}`, where `F` is the secular function in edge-length space.
pub fn directional_derivative_sign_check(
    system: &SecularSystem,
    j: &[usize],
    roots: &[f64],
) -> Result<DirectionalSignReport, DiscretizeError> {
    let lengths = system.metric_graph().lengths().to_vec();
    let flux = vec![0.0; system.flux_count()];
    let mut per_root = Vec::new();
    let mut pass = true;
    for &k in roots {
        let x: Vec<f64> = lengths.iter().map(|&l| k * l).collect();
        let mut derivs = Vec::new();
        for step in 0..=4 {
            let t = step as f64 / 4.0;
            let dir: Vec<f64> = j
                .iter()
                .zip(&lengths)
                .map(|(&ji, &l)| t * ji as f64 + (1.0 - t) * l)
                .collect();
            let norm = dir.iter().fold(0.0f64, |m, &d| m.max(d.abs()));
            let h = 1e-6;
            let shift = |s: f64| -> Vec<f64> {
                x.iter().zip(&dir).map(|(&xi, &di)| xi + s * h * di / norm).collect()
            };
            let plus = system.secular_value_with_lengths(1.0, &shift(1.0), &flux)?;
            let minus = system.secular_value_with_lengths(1.0, &shift(-1.0), &flux)?;
            derivs.push((plus - minus) / (2.0 * h));
        }
        let scale = derivs.iter().fold(0.0f64, |m, &d| m.max(d.abs()));
        let ok = scale > 0.0
            && derivs.iter().all(|&d| d.abs() > 1e-8 * scale)
            && derivs.iter().all(|&d| d.signum() == derivs[0].signum());
        pass &= ok;
        per_root.push((k, ok));
    }
    Ok(DirectionalSignReport { per_root, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::eigensystem;
    use crate::linalg;
    use crate::torus::{decompose_lengths, DependencySpec};
    use nalgebra::Complex;
    use std::f64::consts::PI;

    fn lasso_graph() -> CombinatorialGraph {
        CombinatorialGraph::new(4, &[(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap()
    }

    #[test]
    fn transition_matrix_small_graphs() {
        let k2 = CombinatorialGraph::new(2, &[(1, 2)]).unwrap();
        let p = transition_matrix(&k2);
        assert_eq!(p, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let c3 = CombinatorialGraph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        let p = transition_matrix(&c3);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.0 } else { 0.5 };
                assert!((p[(i, j)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn transition_matrix_is_similar_to_normalized_laplacian() {
        let g = CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        let p = transition_matrix(&g);
        for v in 1..=4 {
            let row_sum: f64 = p.row(v - 1).iter().sum();
            assert!((row_sum - 1.0).abs() < 1e-14);
        }
        let op = DiscreteOperator::normalized(g.clone());
        let n = g.vertex_count();
        let mut d_half = DMatrix::<f64>::zeros(n, n);
        let mut d_half_inv = DMatrix::<f64>::zeros(n, n);
        for v in 1..=n {
            d_half[(v - 1, v - 1)] = (g.degree(v) as f64).sqrt();
            d_half_inv[(v - 1, v - 1)] = 1.0 / (g.degree(v) as f64).sqrt();
        }
        let identity = DMatrix::<f64>::identity(n, n);
        let similar = identity - d_half_inv * op.base() * d_half;
        assert!(linalg::max_abs(&(similar - &p)) < 1e-12);
        // Eigenpair correspondence: (mu, f) -> (1 - mu, D^{-1/2} f).
        let base = op.base().map(|x| Complex::new(x, 0.0));
        let spectrum = eigensystem(&base).unwrap();
        for i in 0..n {
            let f = spectrum.real_vector(i + 1);
            let lifted: Vec<f64> = (0..n)
                .map(|v| f[v] / (g.degree(v + 1) as f64).sqrt())
                .collect();
            let image: Vec<f64> = (0..n)
                .map(|u| (0..n).map(|v| p[(u, v)] * lifted[v]).sum())
                .collect();
            for v in 0..n {
                let want = (1.0 - spectrum.eigenvalues[i]) * lifted[v];
                assert!((image[v] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn arccos_branch_values() {
        let ks = arccos_branches(1.0, 3).unwrap();
        for (p, k) in ks.iter().enumerate() {
            assert!((k - (PI / 2.0 + p as f64 * PI)).abs() < 1e-14);
        }
        let ks = arccos_branches(1.5, 3).unwrap();
        let want = [2.0 * PI / 3.0, 4.0 * PI / 3.0, 8.0 * PI / 3.0, 10.0 * PI / 3.0];
        for (k, w) in ks.iter().zip(want) {
            assert!((k - w).abs() < 1e-13);
        }
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
        for bad in [0.0, 2.0, -0.1, 2.3] {
            assert!(matches!(
                arccos_branches(bad, 3),
                Err(DiscretizeError::MuOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn incommensurate_image_is_everything() {
        let d = decompose_lengths(
            &[2.0f64.sqrt(), 3.0f64.sqrt()],
            &DependencySpec::incommensurate(2),
        )
        .unwrap();
        let points = enumerate_discretizations(&d, 3).unwrap();
        assert_eq!(points.len(), 9);
    }

    #[test]
    fn rational_ray_image() {
        let d = decompose_lengths(
            &[1.0, 2.0],
            &DependencySpec::all_rational(&[
                Rational64::from_integer(1),
                Rational64::from_integer(2),
            ]),
        )
        .unwrap();
        let points = enumerate_discretizations(&d, 4).unwrap();
        assert_eq!(points, vec![vec![1, 2], vec![2, 4]]);
        match enumerate_discretizations(&d, 1) {
            Err(DiscretizeError::BoundTooSmall { bound: 1, hint: Some(2) }) => {}
            other => panic!("expected bound hint, got {other:?}"),
        }
    }

    #[test]
    fn two_generator_image() {
        // lengths (sqrt2, 2 sqrt2, sqrt3): members are (m, 2m, p).
        let one = Rational64::from_integer(1);
        let zero = Rational64::from_integer(0);
        let two = Rational64::from_integer(2);
        let spec = DependencySpec {
            coefficients: vec![vec![one, zero], vec![two, zero], vec![zero, one]],
        };
        let d = decompose_lengths(&[2.0f64.sqrt(), 2.0 * 2.0f64.sqrt(), 3.0f64.sqrt()], &spec)
            .unwrap();
        let points = enumerate_discretizations(&d, 4).unwrap();
        assert_eq!(points.len(), 8);
        for j in &points {
            assert_eq!(j[1], 2 * j[0]);
        }
    }

    #[test]
    fn discretized_version_preserves_betti() {
        let g = lasso_graph();
        let lengths = [1.0, 1.0, 1.0, 2.0f64.sqrt()];
        let mg = MetricGraph::new(g, &lengths).unwrap();
        let one = Rational64::from_integer(1);
        let zero = Rational64::from_integer(0);
        let spec = DependencySpec {
            coefficients: vec![vec![one, zero], vec![one, zero], vec![one, zero], vec![zero, one]],
        };
        let d = decompose_lengths(&lengths, &spec).unwrap();
        let version = DiscretizedVersion::new(&mg, &d, &[2, 2, 2, 3]).unwrap();
        assert_eq!(version.graph.betti_number(), 1);
        assert_eq!(version.graph.vertex_count(), 4 + 1 + 1 + 1 + 2);
        assert!(matches!(
            DiscretizedVersion::new(&mg, &d, &[1, 2, 1, 1]),
            Err(DiscretizeError::NotInImage { .. })
        ));
    }

    #[test]
    fn star_equilateral_connection_passes() {
        // K_{1,3} has spectrum {0, 1, 1, 2}: the interior eigenvalue is
        // double, so the branch checks are vacuous but the root-set
        // completeness still has to hold.
        let star = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let report = verify_equilateral_connection(&star).unwrap();
        assert!(report.pass, "unmatched {:?}", report.unmatched_roots);
        assert!(report.mus.is_empty());
        assert_eq!(report.skipped.iter().filter(|&&m| (m - 1.0).abs() < 1e-9).count(), 2);
    }

    #[test]
    fn path_equilateral_connection_passes() {
        // P4 has spectrum {0, 1/2, 3/2, 2} with generic interior eigenvalues.
        let path = CombinatorialGraph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let report = verify_equilateral_connection(&path).unwrap();
        assert!(report.pass, "unmatched {:?}", report.unmatched_roots);
        assert_eq!(report.mus.len(), 2);
        for m in &report.mus {
            for b in &m.branches {
                assert!(b.is_root && b.trace_defect <= TRACE_LIFT_TOL);
            }
        }
    }

    #[test]
    fn lasso_equilateral_connection_passes() {
        let report = verify_equilateral_connection(&lasso_graph()).unwrap();
        assert!(report.pass, "unmatched {:?}", report.unmatched_roots);
        assert!(!report.mus.is_empty());
    }

    #[test]
    fn lasso_surplus_transfer_alternates() {
        let report = verify_surplus_transfer(&lasso_graph()).unwrap();
        assert!(!report.vacuous);
        assert!(report.pass);
        for m in &report.mus {
            for b in &m.branches {
                let parity = if b.p % 2 == 0 { 1 } else { -1 };
                assert_eq!(b.slope_sign, parity);
                let want = if b.p % 2 == 0 {
                    m.sigma_discrete
                } else {
                    1 - m.sigma_discrete
                };
                assert_eq!(b.sigma_metric, want);
            }
        }
    }

    #[test]
    fn tree_surplus_transfer_is_vacuous() {
        let tree = CombinatorialGraph::new(4, &[(1, 2), (2, 3), (2, 4)]).unwrap();
        let report = verify_surplus_transfer(&tree).unwrap();
        assert!(report.vacuous && report.pass);
    }

    #[test]
    fn triangle_square_surplus_transfer() {
        // Two independent cycles sharing one vertex: beta = 2.
        let g = CombinatorialGraph::new(
            6,
            &[(1, 2), (1, 3), (2, 3), (1, 4), (1, 6), (4, 5), (5, 6)],
        )
        .unwrap();
        let report = verify_surplus_transfer(&g).unwrap();
        assert!(!report.vacuous);
        assert!(report.pass);
        for m in &report.mus {
            for b in &m.branches {
                let want = if b.p % 2 == 0 {
                    m.sigma_discrete
                } else {
                    2 - m.sigma_discrete
                };
                assert_eq!(b.sigma_metric, want);
                let want_morse = if b.p % 2 == 0 {
                    m.morse_discrete
                } else {
                    2 - m.morse_discrete
                };
                assert_eq!(b.morse_metric, want_morse);
            }
        }
    }

    #[test]
    fn lasso_directional_signs_are_constant() {
        let g = lasso_graph();
        let lengths = [1.0, 1.0, 1.0, 2.0f64.sqrt()];
        let mg = MetricGraph::new(g, &lengths).unwrap();
        let system = SecularSystem::new(mg).unwrap();
        let roots = k_spectrum(&system, &[0.0], 18.0).unwrap();
        let simple: Vec<f64> =
            roots.iter().filter(|r| r.simple()).map(|r| r.k).take(20).collect();
        assert!(simple.len() >= 15);
        let report = directional_derivative_sign_check(&system, &[1, 1, 1, 1], &simple).unwrap();
        assert!(report.pass, "failures: {:?}", report.per_root);
    }
}
