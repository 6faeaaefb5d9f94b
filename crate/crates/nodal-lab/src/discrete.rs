//! Discrete Schrödinger operators on graphs: normalized and generalized
//! Laplacians, magnetic flux via a chord gauge, genericity-flagged spectra,
//! and nodal point/domain counts.
//!
//! The magnetic gauge puts the whole flux of basis cycle `i` on its chord
//! edge: entry `(u,v)` (with `u < v`) is multiplied by `e^{i alpha_i}` and
//! `(v,u)` by its conjugate, leaving tree edges and the diagonal untouched.
//! The flux through basis cycle `i` then equals `alpha_i`.

use crate::graph::{CombinatorialGraph, CycleBasis, DisjointSets};
use crate::linalg::{self, LinalgError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Relative gap under which an eigenvalue is treated as non-simple.
pub const SIMPLICITY_TOL: f64 = 1e-8;
/// Relative eigenvector-entry magnitude under which a vertex counts as a zero.
pub const VERTEX_ZERO_TOL: f64 = 1e-8;
/// Residual contract of the eigensolver, relative to the spectral scale.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum DiscreteError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("edge weight {weight} on edge {edge} must be strictly negative")]
    NonNegativeEdgeWeight { edge: usize, weight: f64 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("flux vector has {got} entries but the graph has beta = {expected}")]
    FluxDimension { expected: usize, got: usize },
    #[error("eigenpair {index} violates the residual bound: {residual:.3e} > {bound:.3e}")]
    ResidualBound { index: usize, residual: f64, bound: f64 },
    #[error("eigenvalue {index} (1-based) is not generic: {reason}")]
    NonGeneric { index: usize, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Normalized,
    Generalized,
}

/// A real symmetric base matrix together with the cycle-basis gauge that
/// defines its magnetic deformation.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    graph: CombinatorialGraph,
    kind: OperatorKind,
    base: DMatrix<f64>,
    gauge: CycleBasis,
}

impl DiscreteOperator {
    /// Normalized Laplacian: diagonal 1, entry `(u,v) = -1/sqrt(d_u d_v)`.
    pub fn normalized(graph: CombinatorialGraph) -> Self {
        let n = graph.vertex_count();
        let mut base = DMatrix::<f64>::identity(n, n);
        for &(u, v) in graph.edges() {
            let w = -1.0 / ((graph.degree(u) * graph.degree(v)) as f64).sqrt();
            base[(u - 1, v - 1)] = w;
            base[(v - 1, u - 1)] = w;
        }
        let gauge = graph.cycle_basis();
        Self { graph, kind: OperatorKind::Normalized, base, gauge }
    }

    /// Generalized Laplacian: prescribed strictly negative off-diagonals on
    /// edges and a free diagonal.
    pub fn generalized(
        graph: CombinatorialGraph,
        edge_weights: &[f64],
        diagonal: &[f64],
    ) -> Result<Self, DiscreteError> {
        if edge_weights.len() != graph.edge_count() {
            return Err(DiscreteError::LengthMismatch {
                expected: graph.edge_count(),
                got: edge_weights.len(),
            });
        }
        if diagonal.len() != graph.vertex_count() {
            return Err(DiscreteError::LengthMismatch {
                expected: graph.vertex_count(),
                got: diagonal.len(),
            });
        }
        if let Some((edge, &weight)) =
            edge_weights.iter().enumerate().find(|(_, &w)| w >= 0.0 || !w.is_finite())
        {
            return Err(DiscreteError::NonNegativeEdgeWeight { edge, weight });
        }
        let n = graph.vertex_count();
        let mut base = DMatrix::<f64>::zeros(n, n);
        for (i, &d) in diagonal.iter().enumerate() {
            base[(i, i)] = d;
        }
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            base[(u - 1, v - 1)] = edge_weights[e];
            base[(v - 1, u - 1)] = edge_weights[e];
        }
        let gauge = graph.cycle_basis();
        Ok(Self { graph, kind: OperatorKind::Generalized, base, gauge })
    }

    pub fn graph(&self) -> &CombinatorialGraph {
        &self.graph
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn base(&self) -> &DMatrix<f64> {
        &self.base
    }

    pub fn gauge(&self) -> &CycleBasis {
        &self.gauge
    }

    /// Number of flux parameters, the graph's first Betti number.
    pub fn flux_count(&self) -> usize {
        self.gauge.chords.len()
    }

    /// The magnetic matrix `L(alpha)`; Hermitian for any real fluxes.
    pub fn flux_matrix(&self, flux: &[f64]) -> Result<DMatrix<Complex64>, DiscreteError> {
        if flux.len() != self.flux_count() {
            return Err(DiscreteError::FluxDimension {
                expected: self.flux_count(),
                got: flux.len(),
            });
        }
        let mut m = self.base.map(|x| Complex64::new(x, 0.0));
        for (i, &e) in self.gauge.chords.iter().enumerate() {
            let (u, v) = self.graph.edges()[e];
            let phase = Complex64::from_polar(1.0, flux[i]);
            m[(u - 1, v - 1)] *= phase;
            m[(v - 1, u - 1)] *= phase.conj();
        }
        Ok(m)
    }

    /// Convenience: spectrum of `L(alpha)`.
    pub fn spectrum_at(&self, flux: &[f64]) -> Result<DiscreteSpectrum, DiscreteError> {
        eigensystem(&self.flux_matrix(flux)?)
    }

    /// Spectrum of the zero-flux (real) operator.
    pub fn spectrum(&self) -> Result<DiscreteSpectrum, DiscreteError> {
        self.spectrum_at(&vec![0.0; self.flux_count()])
    }
}

/// Ascending eigenvalues, orthonormal eigenvectors, and genericity flags.
#[derive(Debug, Clone)]
pub struct DiscreteSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns match `eigenvalues`; largest-magnitude entry real positive.
    pub eigenvectors: DMatrix<Complex64>,
    /// True iff the eigenvalue is simple and its eigenvector avoids zero on
    /// every vertex.
    pub generic_flags: Vec<bool>,
}

impl DiscreteSpectrum {
    /// 1-based indices of the generic eigenvalues, ascending.
    pub fn generic_set(&self) -> Vec<usize> {
        self.generic_flags
            .iter()
            .enumerate()
            .filter_map(|(i, &g)| g.then_some(i + 1))
            .collect()
    }

    pub fn all_simple(&self) -> bool {
        let spread = spectral_spread(&self.eigenvalues);
        self.eigenvalues.windows(2).all(|w| w[1] - w[0] > SIMPLICITY_TOL * spread)
    }

    /// Real eigenvector column; valid for zero-flux spectra where the phase
    /// convention makes columns exactly real.
    pub fn real_vector(&self, n: usize) -> Vec<f64> {
        self.eigenvectors.column(n - 1).iter().map(|z| z.re).collect()
    }
}

fn spectral_spread(eigenvalues: &[f64]) -> f64 {
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    (max - min).max(f64::MIN_POSITIVE)
}

/// Diagonalizes a Hermitian matrix and attaches genericity flags.
pub fn eigensystem(matrix: &DMatrix<Complex64>) -> Result<DiscreteSpectrum, DiscreteError> {
    let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(matrix)?;
    let n = eigenvalues.len();
    let scale = eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    for k in 0..n {
        let v = eigenvectors.column(k);
        let residual = (matrix * v - v.map(|z| z * eigenvalues[k])).norm();
        let bound = RESIDUAL_TOL * scale;
        if residual > bound {
            return Err(DiscreteError::ResidualBound { index: k + 1, residual, bound });
        }
    }
    let spread = spectral_spread(&eigenvalues);
    let generic_flags = (0..n)
        .map(|k| {
            let simple = (k == 0 || eigenvalues[k] - eigenvalues[k - 1] > SIMPLICITY_TOL * spread)
                && (k == n - 1 || eigenvalues[k + 1] - eigenvalues[k] > SIMPLICITY_TOL * spread);
            let col = eigenvectors.column(k);
            let max_entry = col.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            let min_entry = col.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            simple && min_entry > VERTEX_ZERO_TOL * max_entry
        })
        .collect();
    Ok(DiscreteSpectrum { eigenvalues, eigenvectors, generic_flags })
}

/// Nodal data of one generic eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalEntry {
    pub eigenvalue: f64,
    /// Edge indices whose endpoint values have strictly opposite signs.
    pub sign_change_edges: Vec<usize>,
    /// `phi_n = |Phi_n|`.
    pub phi: usize,
    /// Nodal domain count: components after deleting the sign-change edges.
    pub nu: usize,
    /// Surplus `phi_n - (n-1)`; may be negative only if the lower nodal bound
    /// fails, which the laboratory treats as a falsification.
    pub sigma: i64,
}

/// Per-eigenvalue nodal data; non-generic indices are absent, not zeroed.
#[derive(Debug, Clone)]
pub struct NodalReport {
    pub entries: Vec<Option<NodalEntry>>,
}

impl NodalReport {
    pub fn phi_sequence(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(|e| e.as_ref().map(|x| x.phi)).collect()
    }

    pub fn surplus_sequence(&self) -> Vec<Option<i64>> {
        self.entries.iter().map(|e| e.as_ref().map(|x| x.sigma)).collect()
    }

    pub fn all_generic(&self) -> bool {
        self.entries.iter().all(|e| e.is_some())
    }
}

/// Nodal counts of the zero-flux operator. `spectrum` must come from
/// `op.spectrum()`; eigenvectors are real there by the phase convention.
pub fn nodal_report(op: &DiscreteOperator, spectrum: &DiscreteSpectrum) -> NodalReport {
    let graph = op.graph();
    let entries = (0..spectrum.eigenvalues.len())
        .map(|k| {
            if !spectrum.generic_flags[k] {
                return None;
            }
            let f = spectrum.real_vector(k + 1);
            let sign_change_edges: Vec<usize> = graph
                .edges()
                .iter()
                .enumerate()
                .filter_map(|(e, &(u, v))| (f[u - 1] * f[v - 1] < 0.0).then_some(e))
                .collect();
            let mut sets = DisjointSets::new(graph.vertex_count());
            for (e, &(u, v)) in graph.edges().iter().enumerate() {
                if !sign_change_edges.contains(&e) {
                    sets.union(u - 1, v - 1);
                }
            }
            let phi = sign_change_edges.len();
            Some(NodalEntry {
                eigenvalue: spectrum.eigenvalues[k],
                sign_change_edges,
                phi,
                nu: sets.component_count(),
                sigma: phi as i64 - k as i64,
            })
        })
        .collect();
    NodalReport { entries }
}

/// Verdict of the tree inverse test on a fully generic nodal report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVerdict {
    /// True iff `phi_n = n-1` for every index.
    pub tree_count: bool,
    /// First 1-based index with `phi_n != n-1`, when present.
    pub witness: Option<usize>,
}

/// Does the nodal count look like a tree's? Refuses when any eigenvalue is
/// non-generic, since the underlying statement assumes a fully generic
/// spectrum.
pub fn is_tree_nodal_count(report: &NodalReport) -> Result<TreeVerdict, DiscreteError> {
    for (k, entry) in report.entries.iter().enumerate() {
        if entry.is_none() {
            return Err(DiscreteError::NonGeneric {
                index: k + 1,
                reason: "tree test requires every eigenvalue to be generic",
            });
        }
    }
    let witness = report
        .entries
        .iter()
        .enumerate()
        .find(|(k, e)| e.as_ref().unwrap().phi != *k)
        .map(|(k, _)| k + 1);
    Ok(TreeVerdict { tree_count: witness.is_none(), witness })
}
