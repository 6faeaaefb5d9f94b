//! Metric (quantum) graphs through the bond-scattering secular function:
//! k-spectrum root search, eigenfunction reconstruction on edges, metric
//! nodal counts, and flux Hessians of the k-eigenvalues.
//!
//! The secular function is `F(k) = Re[ e^{-ik sum(l)} c det(I - e^{i Phi} S) ]`
//! with `Phi = A + k E`; the unimodular prefactor rotates the determinant onto
//! the real axis (`c = 1` when `det S > 0`, `c = -i` otherwise) and the
//! imaginary residue is asserted, not discarded. The magnetic matrix `A`
//! carries the full flux `+/- alpha_i` on the two directions of chord edge
//! `i`, matching the discrete chord gauge so that cross-module comparisons
//! share one flux coordinate.

use crate::graph::{CombinatorialGraph, DisjointSets, GraphError};
use crate::linalg::{self, LinalgError};
use crate::magnetic::MagneticHessian;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Imaginary residue allowed after the prefactor rotation, relative.
pub const REALNESS_TOL: f64 = 1e-9;
/// Bisection / minimization tolerance in k, absolute.
pub const ROOT_TOL: f64 = 1e-12;
/// Relative singular-value cutoff defining root multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-5;
/// Metric genericity: vertex values below this fraction of the max are zeros.
pub const METRIC_VERTEX_ZERO_TOL: f64 = 1e-6;
/// Reconstructed traces must agree across incident edges to this, relative.
pub const TRACE_CONTINUITY_TOL: f64 = 1e-8;
/// FD step for flux Hessians of k; one Richardson level is applied.
pub const K_FD_STEP: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expected {expected} edge lengths, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    BadLength { edge: usize, length: f64 },
    #[error("expected {expected} vertex conditions, got {got}")]
    ConditionMismatch { expected: usize, got: usize },
    #[error("flux vector has {got} entries but the graph has beta = {expected}")]
    FluxDimension { expected: usize, got: usize },
    #[error("secular value at k = {k} has imaginary residue {im:.3e} (scale {scale:.3e})")]
    ComplexResidue { k: f64, im: f64, scale: f64 },
    #[error("k = {k} is not a simple root (multiplicity {multiplicity})")]
    NonSimpleRoot { k: f64, multiplicity: usize },
    #[error("root count {found} violates the Weyl estimate {expected:.1} +/- {slack} on (0, {kmax}]")]
    WeylMismatch { found: usize, expected: f64, slack: usize, kmax: f64 },
    #[error("reconstructed traces disagree at vertex {vertex} (spread {spread:.3e})")]
    TraceDiscontinuity { vertex: usize, spread: f64 },
    #[error("eigenfunction cannot be rotated onto the real axis (defect {defect:.3e})")]
    NotRealizable { defect: f64 },
    #[error("eigenfunction vanishes on edge {edge}; zero count undefined")]
    EdgeVanishing { edge: usize },
    #[error("eigenfunction zero within tolerance of an endpoint of edge {edge}")]
    ZeroAtEndpoint { edge: usize },
    #[error("lost the root near k = {k} while tracking it in flux")]
    RootTracking { k: f64 },
    #[error("gradient of k_n is {value:.3e}; not a critical point")]
    GradientNotZero { value: f64 },
    #[error("metric nodal counting requires an all-Neumann graph")]
    NotNeumann,
    #[error("only {found} generic eigenvalues below the extended scan ceiling; need {want}")]
    TooFewGeneric { found: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexCondition {
    Neumann,
    Dirichlet,
}

/// A combinatorial graph with positive edge lengths and vertex conditions.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    graph: CombinatorialGraph,
    lengths: Vec<f64>,
    conditions: Vec<VertexCondition>,
}

impl MetricGraph {
    /// All-Neumann metric graph.
    pub fn new(graph: CombinatorialGraph, lengths: &[f64]) -> Result<Self, MetricError> {
        let conditions = vec![VertexCondition::Neumann; graph.vertex_count()];
        Self::with_conditions(graph, lengths, &conditions)
    }

    pub fn with_conditions(
        graph: CombinatorialGraph,
        lengths: &[f64],
        conditions: &[VertexCondition],
    ) -> Result<Self, MetricError> {
        if lengths.len() != graph.edge_count() {
            return Err(MetricError::LengthMismatch {
                expected: graph.edge_count(),
                got: lengths.len(),
            });
        }
        if let Some((edge, &length)) =
            lengths.iter().enumerate().find(|(_, &l)| !(l.is_finite() && l > 0.0))
        {
            return Err(MetricError::BadLength { edge, length });
        }
        if conditions.len() != graph.vertex_count() {
            return Err(MetricError::ConditionMismatch {
                expected: graph.vertex_count(),
                got: conditions.len(),
            });
        }
        Ok(Self { graph, lengths: lengths.to_vec(), conditions: conditions.to_vec() })
    }

    pub fn graph(&self) -> &CombinatorialGraph {
        &self.graph
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn conditions(&self) -> &[VertexCondition] {
        &self.conditions
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn is_neumann(&self) -> bool {
        self.conditions.iter().all(|&c| c == VertexCondition::Neumann)
    }
}

/// Constant bond-scattering data of a metric graph, plus the prefactor that
/// makes the secular determinant real.
#[derive(Debug, Clone)]
pub struct SecularSystem {
    mg: MetricGraph,
    /// `2|E| x 2|E|` real orthogonal-stochastic bond scattering matrix.
    s: DMatrix<f64>,
    /// `c` in the secular prefactor: `1` if `det S > 0`, `-i` otherwise.
    prefactor: Complex64,
    /// Forward bond index of each chord, in chord order; carries `+alpha_i`.
    chord_bonds: Vec<usize>,
}

impl SecularSystem {
    pub fn new(mg: MetricGraph) -> Result<Self, MetricError> {
        let g = mg.graph().clone();
        let b = g.bond_count();
        let mut s = DMatrix::<f64>::zeros(b, b);
        // S_{b', b} scatters bond b into bond b' across v = t(b) = o(b').
        for bond in 0..b {
            let v = g.bond_terminus(bond);
            match mg.conditions()[v - 1] {
                VertexCondition::Neumann => {
                    let d = g.degree(v) as f64;
                    for &(_, e) in g.incident(v) {
                        // The outgoing bond on edge e at v.
                        let fwd = e;
                        let out = if g.bond_origin(fwd) == v { fwd } else { g.bond_reverse(fwd) };
                        s[(out, bond)] += 2.0 / d;
                    }
                    s[(g.bond_reverse(bond), bond)] -= 1.0;
                }
                VertexCondition::Dirichlet => {
                    s[(g.bond_reverse(bond), bond)] = -1.0;
                }
            }
        }
        let det = linalg::complex_det(&s.map(|x| Complex64::new(x, 0.0))).re;
        let prefactor = if det > 0.0 { Complex64::ONE } else { -Complex64::I };
        let chord_bonds = g.cycle_basis().chords.clone();
        Ok(Self { mg, s, prefactor, chord_bonds })
    }

    pub fn metric_graph(&self) -> &MetricGraph {
        &self.mg
    }

    /// The sign `s` in the joint-negation symmetry
    /// `F(-k, -alpha) = s F(k, alpha)` (lengths and flux negated together):
    /// `+1` when `det S > 0`, `-1` when the rotation onto the real axis uses
    /// the imaginary prefactor, which conjugates to its own negative. The
    /// sign cancels in every Hessian and Morse quantity built from `F`.
    pub fn negation_sign(&self) -> f64 {
        if self.prefactor.im == 0.0 { 1.0 } else { -1.0 }
    }

    pub fn graph(&self) -> &CombinatorialGraph {
        self.mg.graph()
    }

    pub fn scattering_matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// Number of flux parameters (chords of the cycle basis).
    pub fn flux_count(&self) -> usize {
        self.chord_bonds.len()
    }

    fn check_flux(&self, flux: &[f64]) -> Result<(), MetricError> {
        if flux.len() != self.flux_count() {
            return Err(MetricError::FluxDimension {
                expected: self.flux_count(),
                got: flux.len(),
            });
        }
        Ok(())
    }

    /// Per-bond phases `Phi_b = k l_e(b) + A_b` for given lengths and fluxes.
    fn phases(&self, k: f64, lengths: &[f64], flux: &[f64]) -> DVector<f64> {
        let g = self.graph();
        let b = g.bond_count();
        let mut phi = DVector::<f64>::zeros(b);
        for bond in 0..b {
            phi[bond] = k * lengths[g.bond_edge(bond)];
        }
        for (i, &fwd) in self.chord_bonds.iter().enumerate() {
            phi[fwd] += flux[i];
            phi[g.bond_reverse(fwd)] -= flux[i];
        }
        phi
    }

    /// `M(k) = I - e^{i Phi} S`, the matrix whose null space carries the bond
    /// amplitudes of an eigenfunction.
    pub fn bond_matrix(&self, k: f64, flux: &[f64]) -> Result<DMatrix<Complex64>, MetricError> {
        self.check_flux(flux)?;
        self.bond_matrix_with_lengths(k, self.mg.lengths(), flux)
    }

    fn bond_matrix_with_lengths(
        &self,
        k: f64,
        lengths: &[f64],
        flux: &[f64],
    ) -> Result<DMatrix<Complex64>, MetricError> {
        let b = self.graph().bond_count();
        let phi = self.phases(k, lengths, flux);
        let mut m = DMatrix::<Complex64>::zeros(b, b);
        for row in 0..b {
            let phase = Complex64::from_polar(1.0, phi[row]);
            for col in 0..b {
                m[(row, col)] = -phase * self.s[(row, col)];
            }
            m[(row, row)] += Complex64::ONE;
        }
        Ok(m)
    }

    /// The real secular value at `k` and flux `alpha`.
    pub fn secular_value(&self, k: f64, flux: &[f64]) -> Result<f64, MetricError> {
        self.check_flux(flux)?;
        self.secular_value_with_lengths(k, self.mg.lengths(), flux)
    }

    /// Secular value with the edge lengths overridden; the lift used by the
    /// torus formalism, where lengths range over a whole linear image.
    pub fn secular_value_with_lengths(
        &self,
        k: f64,
        lengths: &[f64],
        flux: &[f64],
    ) -> Result<f64, MetricError> {
        let m = self.bond_matrix_with_lengths(k, lengths, flux)?;
        let det = linalg::complex_det(&m);
        // tr(Phi)/2 = k sum(l): the magnetic phases cancel in the trace.
        let half_trace: f64 = k * lengths.iter().sum::<f64>();
        let rotated = Complex64::from_polar(1.0, -half_trace) * self.prefactor * det;
        let scale = rotated.norm();
        if rotated.im.abs() > REALNESS_TOL * scale + 1e-12 {
            return Err(MetricError::ComplexResidue { k, im: rotated.im, scale });
        }
        Ok(rotated.re)
    }

    /// Multiplicity of `k` as a spectral point: the numerical null dimension
    /// of `M(k)`.
    pub fn multiplicity(&self, k: f64, flux: &[f64]) -> Result<usize, MetricError> {
        let m = self.bond_matrix(k, flux)?;
        let (dim, _) = linalg::null_space(&m, MULTIPLICITY_TOL)?;
        Ok(dim)
    }
}

/// One point of the k-spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRoot {
    pub k: f64,
    pub multiplicity: usize,
}

impl KRoot {
    pub fn simple(&self) -> bool {
        self.multiplicity == 1
    }
}

fn golden_min<F: FnMut(f64) -> Result<f64, MetricError>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64), MetricError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let tol = ROOT_TOL.max(8.0 * f64::EPSILON * b.abs());
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    Ok((mid, f(mid)?))
}

fn bisect<F: FnMut(f64) -> Result<f64, MetricError>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
) -> Result<f64, MetricError> {
    // Absolute tolerance floored at a few ulps so brackets far from the
    // origin, where 1e-12 is below the f64 spacing, still terminate.
    let tol = ROOT_TOL.max(8.0 * f64::EPSILON * b.abs());
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// All roots of the secular function in `(0, k_max]`, ascending, with
/// multiplicity from the null dimension of `M(k)`. Sign changes are bisected;
/// even-multiplicity roots are caught by a dip detector on `|F|`.
pub fn k_spectrum(
    system: &SecularSystem,
    flux: &[f64],
    k_max: f64,
) -> Result<Vec<KRoot>, MetricError> {
    system.check_flux(flux)?;
    let total = system.metric_graph().total_length();
    let step = std::f64::consts::PI / (20.0 * total);
    let count = (k_max / step).ceil() as usize;
    let mut ks = Vec::with_capacity(count + 1);
    let mut fs = Vec::with_capacity(count + 1);
    for i in 1..=count {
        let k = (i as f64 * step).min(k_max);
        ks.push(k);
        fs.push(system.secular_value(k, flux)?);
        if k >= k_max {
            break;
        }
    }
    let n = ks.len();
    let mut roots: Vec<f64> = Vec::new();

    // Sign-change brackets.
    for i in 0..n - 1 {
        if fs[i] * fs[i + 1] < 0.0 {
            let root =
                bisect(|k| system.secular_value(k, flux), ks[i], ks[i + 1], fs[i])?;
            roots.push(root);
        }
    }

    // Dip detector for roots the grid cannot bracket.
    for i in 1..n - 1 {
        let local: f64 = (i.saturating_sub(5)..(i + 6).min(n))
            .map(|j| fs[j].abs())
            .fold(0.0, f64::max);
        let is_dip = fs[i].abs() <= fs[i - 1].abs() && fs[i].abs() < fs[i + 1].abs();
        let no_bracket = fs[i - 1] * fs[i] > 0.0 && fs[i] * fs[i + 1] > 0.0;
        // A sample landing on a root defeats the sign products on both
        // sides; the commensurate grid (step pi / 20 L) makes this a real
        // occurrence, not a measure-zero one.
        let on_grid_zero = fs[i].abs() < 1e-9 * local;
        // A close pair hiding in one grid cell can leave a sampled dip of
        // sizable magnitude, so the filter is loose; the refined scan then
        // decides whether the valley actually reaches zero.
        if !(on_grid_zero || (is_dip && no_bracket && fs[i].abs() < 0.5 * local)) {
            continue;
        }
        if on_grid_zero {
            roots.push(ks[i]);
        }
        // Refined subgrid first: a pair of crossings can hide between two
        // samples, and |f| is not unimodal there, so golden-section alone
        // can land on the wrong side of a zero.
        let sub = 80;
        let mut found_pair = false;
        let mut pk = ks[i - 1];
        let mut pf = fs[i - 1];
        for j in 1..=sub {
            let k = ks[i - 1] + (ks[i + 1] - ks[i - 1]) * j as f64 / sub as f64;
            let f = system.secular_value(k, flux)?;
            if pf * f < 0.0 {
                roots.push(bisect(|k| system.secular_value(k, flux), pk, k, pf)?);
                found_pair = true;
            }
            pk = k;
            pf = f;
        }
        if found_pair || on_grid_zero {
            continue;
        }
        // No crossing at all: only an even-order zero can remain.
        let (kmin, fmin_abs) =
            golden_min(|k| system.secular_value(k, flux).map(f64::abs), ks[i - 1], ks[i + 1])?;
        if fmin_abs < 1e-9 * local.max(f64::MIN_POSITIVE) {
            roots.push(kmin);
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut out = Vec::with_capacity(roots.len());
    for k in roots {
        let multiplicity = system.multiplicity(k, flux)?.max(1);
        out.push(KRoot { k, multiplicity });
    }

    // Weyl sanity: the counting function cannot stray far from k L / pi.
    let found: usize = out.iter().map(|r| r.multiplicity).sum();
    let expected = k_max * total / std::f64::consts::PI;
    let g = system.graph();
    let slack = g.vertex_count() + g.betti_number() + 2;
    if (found as f64 - expected).abs() > slack as f64 {
        return Err(MetricError::WeylMismatch { found, expected, slack, kmax: k_max });
    }
    Ok(out)
}

/// An eigenfunction at a simple root, reduced to real cosine data per edge.
#[derive(Debug, Clone)]
pub struct MetricEigenpair {
    pub k: f64,
    /// Phase-fixed bond amplitudes; `a_b` is measured at the terminal end.
    pub amplitudes: DVector<Complex64>,
    /// Per-vertex values; normalized so the largest in magnitude is +1.
    pub vertex_values: Vec<f64>,
    /// Per edge `(C, theta)`: `f|_e(x) = C cos(kx - theta)` with `C >= 0`.
    pub edge_cosines: Vec<(f64, f64)>,
    /// Simple root with no vertex zero.
    pub generic: bool,
}

/// Reconstructs the eigenfunction at a simple zero-flux root.
pub fn eigenfunction(system: &SecularSystem, k: f64) -> Result<MetricEigenpair, MetricError> {
    let flux = vec![0.0; system.flux_count()];
    let m = system.bond_matrix(k, &flux)?;
    let (dim, basis) = linalg::null_space(&m, MULTIPLICITY_TOL)?;
    if dim != 1 {
        return Err(MetricError::NonSimpleRoot { k, multiplicity: dim });
    }
    let mut a: DVector<Complex64> = basis.column(0).into_owned();
    let g = system.graph();
    let mg = system.metric_graph();
    let edges = g.edge_count();

    // Per edge, the traveling components u = a_fwd e^{-ikl} and w = a_rev
    // must satisfy w = conj(u) for a real eigenfunction; a global phase
    // rotation achieves this at a simple eigenvalue.
    let u_of = |a: &DVector<Complex64>, e: usize| {
        a[e] * Complex64::from_polar(1.0, -k * mg.lengths()[e])
    };
    let best = (0..edges)
        .max_by(|&i, &j| {
            let pi = (u_of(&a, i) * a[g.bond_reverse(i)]).norm();
            let pj = (u_of(&a, j) * a[g.bond_reverse(j)]).norm();
            pi.partial_cmp(&pj).unwrap()
        })
        .expect("graphs have at least one edge");
    let u = u_of(&a, best);
    let w = a[g.bond_reverse(best)];
    if u.norm() > 0.0 && w.norm() > 0.0 {
        // e^{2 i psi} = conj(u) / w.
        let psi = 0.5 * (u.conj() / w).arg();
        let rot = Complex64::from_polar(1.0, psi);
        for x in a.iter_mut() {
            *x *= rot;
        }
    }
    let amp_scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut defect = 0.0f64;
    for e in 0..edges {
        let u = u_of(&a, e);
        let w = a[g.bond_reverse(e)];
        defect = defect.max((w - u.conj()).norm());
    }
    if defect > 1e-6 * amp_scale {
        return Err(MetricError::NotRealizable { defect });
    }

    // Vertex traces from incoming bonds: f(v) = a_b + a_rev(b) e^{-i k l}.
    let mut vertex_values = vec![0.0f64; g.vertex_count()];
    for v in 1..=g.vertex_count() {
        let mut vals = Vec::new();
        for &(_, e) in g.incident(v) {
            let incoming = if g.bond_terminus(e) == v { e } else { g.bond_reverse(e) };
            let val = a[incoming]
                + a[g.bond_reverse(incoming)]
                    * Complex64::from_polar(1.0, -k * mg.lengths()[e]);
            vals.push(val);
        }
        let spread = vals
            .iter()
            .flat_map(|x| vals.iter().map(move |y| (x - y).norm()))
            .fold(0.0f64, f64::max);
        if spread > TRACE_CONTINUITY_TOL * amp_scale.max(1e-300) {
            return Err(MetricError::TraceDiscontinuity { vertex: v, spread });
        }
        let mean: Complex64 = vals.iter().sum::<Complex64>() / vals.len() as f64;
        vertex_values[v - 1] = mean.re;
    }

    // Normalize: the largest-magnitude vertex value becomes +1; if all
    // vertex values vanish the mode is non-generic and we fall back to the
    // amplitude scale with positive leading coefficient.
    let pivot_val = vertex_values
        .iter()
        .copied()
        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .unwrap();
    let scale = if pivot_val.abs() > 1e-9 * amp_scale { 1.0 / pivot_val } else { 1.0 / amp_scale };
    for x in a.iter_mut() {
        *x *= scale;
    }
    for v in vertex_values.iter_mut() {
        *v *= scale;
    }

    let edge_cosines: Vec<(f64, f64)> = (0..edges)
        .map(|e| {
            let u = u_of(&a, e);
            let c = 2.0 * u.norm();
            let mut theta = -u.arg();
            if theta < 0.0 {
                theta += 2.0 * std::f64::consts::PI;
            }
            (c, theta)
        })
        .collect();

    // Genericity compares vertex values against the eigenfunction's sup norm
    // (max cosine amplitude), not merely against each other: loop modes can
    // vanish at every vertex simultaneously.
    let sup: f64 = edge_cosines.iter().map(|&(c, _)| c).fold(0.0f64, f64::max);
    let min_v = vertex_values.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
    let generic = sup > 0.0 && min_v > METRIC_VERTEX_ZERO_TOL * sup;

    Ok(MetricEigenpair { k, amplitudes: a, vertex_values, edge_cosines, generic })
}

/// Interior zeros of `C cos(kx - theta)` on `(0, l)`; errors when the mode
/// vanishes on the edge or a zero sits on an endpoint.
pub fn count_edge_zeros(
    c: f64,
    theta: f64,
    k: f64,
    l: f64,
    amplitude_scale: f64,
    edge: usize,
) -> Result<usize, MetricError> {
    if c <= 1e-9 * amplitude_scale.max(f64::MIN_POSITIVE) {
        return Err(MetricError::EdgeVanishing { edge });
    }
    let pi = std::f64::consts::PI;
    let guard = 1e-9 * l.max(1.0 / k);
    let mut count = 0;
    // Zeros at x = (theta + pi/2 + m pi) / k; scan the m window around (0,l).
    let m_lo = ((-theta - 0.5 * pi) / pi).floor() as i64 - 2;
    let m_hi = (((k * l) - theta - 0.5 * pi) / pi).ceil() as i64 + 2;
    for m in m_lo..=m_hi {
        let x = (theta + 0.5 * pi + m as f64 * pi) / k;
        if x > guard && x < l - guard {
            count += 1;
        } else if (x.abs() <= guard && x > -guard) || ((x - l).abs() <= guard) {
            return Err(MetricError::ZeroAtEndpoint { edge });
        }
    }
    Ok(count)
}

impl MetricEigenpair {
    /// Zeros of the eigenfunction strictly inside edge `e`.
    pub fn zeros_on_edge(
        &self,
        system: &SecularSystem,
        e: usize,
    ) -> Result<usize, MetricError> {
        let (c, theta) = self.edge_cosines[e];
        let amp = self.edge_cosines.iter().map(|&(c, _)| c).fold(0.0f64, f64::max);
        count_edge_zeros(c, theta, self.k, system.metric_graph().lengths()[e], amp, e)
    }
}

/// Nodal data of one generic metric eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricNodalEntry {
    pub k: f64,
    pub phi: usize,
    pub nu: usize,
    pub sigma: i64,
}

/// Per-index metric nodal data; `entries[0]` is the constant mode `n = 1`.
/// Non-generic indices (multiple roots, vertex zeros) are absent.
#[derive(Debug, Clone)]
pub struct MetricNodalReport {
    pub entries: Vec<Option<MetricNodalEntry>>,
}

impl MetricNodalReport {
    pub fn generic_entries(&self) -> impl Iterator<Item = (usize, &MetricNodalEntry)> {
        self.entries.iter().enumerate().filter_map(|(i, e)| e.as_ref().map(|x| (i + 1, x)))
    }
}

/// Builds the nodal report from a computed spectrum. Indexing starts at the
/// constant mode: `n = 1` has `k = 0`, `phi = 0`, `nu = 1`.
pub fn metric_nodal_report(
    system: &SecularSystem,
    roots: &[KRoot],
) -> Result<MetricNodalReport, MetricError> {
    if !system.metric_graph().is_neumann() {
        return Err(MetricError::NotNeumann);
    }
    let g = system.graph();
    let mut entries: Vec<Option<MetricNodalEntry>> =
        vec![Some(MetricNodalEntry { k: 0.0, phi: 0, nu: 1, sigma: 0 })];
    for root in roots {
        if !root.simple() {
            for _ in 0..root.multiplicity {
                entries.push(None);
            }
            continue;
        }
        let n = entries.len() + 1;
        let pair = eigenfunction(system, root.k)?;
        if !pair.generic {
            entries.push(None);
            continue;
        }
        let mut phi = 0usize;
        let mut per_edge = Vec::with_capacity(g.edge_count());
        let mut ok = true;
        for e in 0..g.edge_count() {
            match pair.zeros_on_edge(system, e) {
                Ok(z) => {
                    phi += z;
                    per_edge.push(z);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            entries.push(None);
            continue;
        }
        // Nodal domains: each edge splits into (zeros + 1) segments; endpoint
        // segments merge with their vertices.
        let verts = g.vertex_count();
        let total_segments: usize = per_edge.iter().map(|z| z + 1).sum();
        let mut sets = DisjointSets::new(verts + total_segments);
        let mut seg_base = verts;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let segs = per_edge[e] + 1;
            sets.union(seg_base, u - 1);
            sets.union(seg_base + segs - 1, v - 1);
            seg_base += segs;
        }
        let nu = sets.component_count();
        entries.push(Some(MetricNodalEntry {
            k: root.k,
            phi,
            nu,
            sigma: phi as i64 - (n as i64 - 1),
        }));
    }
    Ok(MetricNodalReport { entries })
}

/// Finds the root of `F(.; alpha)` inside a window around `center`.
fn track_root(
    system: &SecularSystem,
    flux: &[f64],
    center: f64,
    window: f64,
) -> Result<f64, MetricError> {
    let mut w = window;
    for _ in 0..2 {
        let a = center - w;
        let b = center + w;
        let fa = system.secular_value(a, flux)?;
        let fb = system.secular_value(b, flux)?;
        if fa * fb < 0.0 {
            return bisect(|k| system.secular_value(k, flux), a, b, fa);
        }
        w *= 3.0;
    }
    Err(MetricError::RootTracking { k: center })
}

/// FD Hessian of `k_n(alpha)` at zero flux with one Richardson level.
/// `gap` is the distance to the nearest other root, bounding the tracking
/// window.
pub fn k_hessian_fd(
    system: &SecularSystem,
    n_index: usize,
    k_n: f64,
    gap: f64,
    step: f64,
) -> Result<MagneticHessian, MetricError> {
    let beta = system.flux_count();
    let window = (gap / 3.0).min(0.2).max(20.0 * step * step);
    let value = |assign: &[(usize, f64)]| -> Result<f64, MetricError> {
        let mut flux = vec![0.0; beta];
        for &(i, x) in assign {
            flux[i] = x;
        }
        track_root(system, &flux, k_n, window)
    };
    let hessian_at_step = |h: f64| -> Result<DMatrix<f64>, MetricError> {
        let mut m = DMatrix::<f64>::zeros(beta, beta);
        for i in 0..beta {
            let plus = value(&[(i, h)])?;
            let minus = value(&[(i, -h)])?;
            m[(i, i)] = (plus + minus - 2.0 * k_n) / (h * h);
            let grad = (plus - minus) / (2.0 * h);
            if grad.abs() > 1e-6 {
                return Err(MetricError::GradientNotZero { value: grad });
            }
            for j in (i + 1)..beta {
                let pp = value(&[(i, h), (j, h)])?;
                let mm = value(&[(i, -h), (j, -h)])?;
                let pm = value(&[(i, h), (j, -h)])?;
                let mp = value(&[(i, -h), (j, h)])?;
                let mixed = (pp + mm - pm - mp) / (4.0 * h * h);
                m[(i, j)] = mixed;
                m[(j, i)] = mixed;
            }
        }
        Ok(m)
    };
    let coarse = hessian_at_step(step)?;
    let fine = hessian_at_step(0.5 * step)?;
    let matrix = (fine * 4.0 - coarse) / 3.0;
    Ok(crate::magnetic::finish_hessian(n_index, matrix))
}
