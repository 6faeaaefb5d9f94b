//! Flux Hessians of discrete eigenvalues at zero flux, Morse indices, the
//! surplus/Morse comparison, trace-invariant identities, forbidden surplus
//! shapes, and girth recovery from magnetic data.
//!
//! Two independent Hessian routes are kept side by side: a second-order
//! perturbation formula (exact up to eigensolver noise) and Richardson-
//! extrapolated central differences of the tracked eigenvalue. Their
//! agreement is itself one of the laboratory's invariants.

use crate::discrete::{nodal_report, DiscreteError, DiscreteOperator, DiscreteSpectrum};
use crate::linalg;
use nalgebra::DMatrix;
use thiserror::Error;

/// Central-difference step; one Richardson level (h and h/2) is applied.
pub const FD_STEP: f64 = 1e-3;
/// First flux derivatives must vanish below this at the critical point.
pub const GRADIENT_TOL: f64 = 1e-6;
/// `|det H|` at or below this marks a degenerate critical point.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Trace identities must vanish below this, relative to the summand scale.
pub const TRACE_TOL: f64 = 1e-6;
/// Girth signal threshold, relative to the non-cancelling summand scale.
pub const GIRTH_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum MagneticError {
    #[error(transparent)]
    Discrete(#[from] DiscreteError),
    #[error("eigenvalue {index} is degenerate; its flux Hessian is undefined")]
    Degenerate { index: usize },
    #[error("eigenvalue {index} gap {gap:.3e} is below the safe tracking bound {bound:.3e}")]
    GapTooSmall { index: usize, gap: f64, bound: f64 },
    #[error("gradient of eigenvalue {index} is {value:.3e}, not a critical point")]
    GradientNotZero { index: usize, value: f64 },
    #[error("spectrum has a degenerate pair; per-index Hessians are undefined")]
    DegenerateSpectrum,
    #[error("graph is a tree; girth from traces needs beta > 0")]
    TreeInput,
    #[error("girth signal at k = {k} is within a decade of the threshold (ratio {ratio:.3e})")]
    AmbiguousGirthSignal { k: usize, ratio: f64 },
    #[error("no trace signal found up to k = {kmax}")]
    NoGirthSignal { kmax: usize },
}

/// Flux Hessian of one eigenvalue at zero flux.
#[derive(Debug, Clone)]
pub struct MagneticHessian {
    /// 1-based eigenvalue index.
    pub eigen_index: usize,
    pub matrix: DMatrix<f64>,
    /// Count of negative Hessian eigenvalues; 0 for the empty (tree) Hessian.
    pub morse_index: usize,
    /// True iff `|det H|` is at or below the degeneracy tolerance.
    pub degenerate: bool,
}

pub(crate) fn finish_hessian(eigen_index: usize, mut matrix: DMatrix<f64>) -> MagneticHessian {
    let beta = matrix.nrows();
    // Symmetrize: mixed partials commute, FD noise does not.
    for i in 0..beta {
        for j in (i + 1)..beta {
            let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg;
        }
    }
    let morse_index = linalg::negative_count(&matrix).expect("symmetric by construction");
    let degenerate = if beta == 0 {
        false
    } else {
        let (vals, _) = linalg::symmetric_eigen(&matrix).expect("symmetric by construction");
        vals.iter().product::<f64>().abs() <= DEGENERACY_TOL
    };
    MagneticHessian { eigen_index, matrix, morse_index, degenerate }
}

/// Second-order perturbation Hessian of `lambda_n` at zero flux.
///
/// With the chord gauge, `dL/d alpha_i` lives on chord edge `i = {u,v}` with
/// entries `+/- i L_{uv}`, and `d^2 L/d alpha_i^2` is `-L` restricted to that
/// edge; cross second derivatives vanish. For real eigenvectors everything
/// collapses to real arithmetic.
pub fn hessian_perturbative(
    op: &DiscreteOperator,
    spectrum: &DiscreteSpectrum,
    n: usize,
) -> Result<MagneticHessian, MagneticError> {
    let beta = op.flux_count();
    let dim = spectrum.eigenvalues.len();
    let spread = (spectrum.eigenvalues[dim - 1] - spectrum.eigenvalues[0]).max(f64::MIN_POSITIVE);
    let lambda = spectrum.eigenvalues[n - 1];
    for m in 0..dim {
        if m != n - 1 && (spectrum.eigenvalues[m] - lambda).abs() <= 1e-8 * spread {
            return Err(MagneticError::Degenerate { index: n });
        }
    }
    let f: Vec<f64> = spectrum.real_vector(n);
    let chords = &op.gauge().chords;
    let mut matrix = DMatrix::<f64>::zeros(beta, beta);
    // b[i][m] = <f_n, dL_i f_m> / i  (a real number for real eigenvectors).
    let mut b = vec![vec![0.0; dim]; beta];
    for (i, &e) in chords.iter().enumerate() {
        let (u, v) = op.graph().edges()[e];
        let w = op.base()[(u - 1, v - 1)];
        for m in 0..dim {
            let g = spectrum.real_vector(m + 1);
            b[i][m] = w * (f[u - 1] * g[v - 1] - f[v - 1] * g[u - 1]);
        }
        matrix[(i, i)] = -2.0 * w * f[u - 1] * f[v - 1];
    }
    for i in 0..beta {
        for j in 0..beta {
            let mut sum = 0.0;
            for m in 0..dim {
                if m != n - 1 {
                    sum += b[i][m] * b[j][m] / (lambda - spectrum.eigenvalues[m]);
                }
            }
            matrix[(i, j)] += 2.0 * sum;
        }
    }
    Ok(finish_hessian(n, matrix))
}

fn tracked_eigenvalue(
    op: &DiscreteOperator,
    flux: &[f64],
    n: usize,
) -> Result<f64, MagneticError> {
    let spec = op.spectrum_at(flux)?;
    Ok(spec.eigenvalues[n - 1])
}

/// Finite-difference Hessian of `lambda_n(alpha)` at zero flux, with one
/// Richardson extrapolation level. Tracking is by sorted order, so the
/// eigenvalue's gaps must dominate the stencil perturbation.
pub fn hessian_fd(
    op: &DiscreteOperator,
    n: usize,
    step: f64,
) -> Result<MagneticHessian, MagneticError> {
    let beta = op.flux_count();
    let spectrum = op.spectrum()?;
    let dim = spectrum.eigenvalues.len();
    let lambda = spectrum.eigenvalues[n - 1];
    let bound = 10.0 * step * step;
    for m in 0..dim {
        if m != n - 1 {
            let gap = (spectrum.eigenvalues[m] - lambda).abs();
            if gap < bound {
                return Err(MagneticError::GapTooSmall { index: n, gap, bound });
            }
        }
    }
    let value = |flux: &[f64]| tracked_eigenvalue(op, flux, n);
    let at = |assign: &[(usize, f64)]| -> Result<f64, MagneticError> {
        let mut flux = vec![0.0; beta];
        for &(i, x) in assign {
            flux[i] = x;
        }
        value(&flux)
    };

    let hessian_at_step = |h: f64| -> Result<DMatrix<f64>, MagneticError> {
        let base = lambda;
        let mut m = DMatrix::<f64>::zeros(beta, beta);
        for i in 0..beta {
            let plus = at(&[(i, h)])?;
            let minus = at(&[(i, -h)])?;
            m[(i, i)] = (plus + minus - 2.0 * base) / (h * h);
            let grad = (plus - minus) / (2.0 * h);
            if grad.abs() > GRADIENT_TOL {
                return Err(MagneticError::GradientNotZero { index: n, value: grad });
            }
            for j in (i + 1)..beta {
                let pp = at(&[(i, h), (j, h)])?;
                let mm = at(&[(i, -h), (j, -h)])?;
                let pm = at(&[(i, h), (j, -h)])?;
                let mp = at(&[(i, -h), (j, h)])?;
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
    Ok(finish_hessian(n, matrix))
}

/// One row of the surplus-versus-Morse comparison table.
#[derive(Debug, Clone)]
pub struct SurplusMorseRow {
    pub n: usize,
    pub eigenvalue: f64,
    pub sigma: i64,
    pub morse: usize,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SurplusMorseTable {
    pub rows: Vec<SurplusMorseRow>,
    /// 1-based indices skipped because they are not generic.
    pub skipped: Vec<usize>,
    pub all_pass: bool,
}

/// Compares the nodal surplus with the Morse index of the zero-flux critical
/// point, per generic eigenvalue, using the perturbative Hessian.
pub fn verify_surplus_equals_morse(
    op: &DiscreteOperator,
) -> Result<SurplusMorseTable, MagneticError> {
    let spectrum = op.spectrum()?;
    let report = nodal_report(op, &spectrum);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (k, entry) in report.entries.iter().enumerate() {
        match entry {
            None => skipped.push(k + 1),
            Some(e) => {
                let hess = hessian_perturbative(op, &spectrum, k + 1)?;
                rows.push(SurplusMorseRow {
                    n: k + 1,
                    eigenvalue: e.eigenvalue,
                    sigma: e.sigma,
                    morse: hess.morse_index,
                    pass: e.sigma == hess.morse_index as i64,
                });
            }
        }
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(SurplusMorseTable { rows, skipped, all_pass })
}

#[derive(Debug, Clone)]
pub struct TraceIdentityReport {
    /// `sum_n H_n`, which must vanish.
    pub sum_hessians: DMatrix<f64>,
    /// `sum_n lambda_n H_n`, which must vanish.
    pub weighted_sum: DMatrix<f64>,
    /// Max-norm scales of the two non-cancelling sums, for relative checks.
    pub scale: f64,
    pub weighted_scale: f64,
    pub pass: bool,
}

/// Verifies that the Hessians summed over the whole spectrum cancel, both
/// plainly and weighted by eigenvalue.
pub fn trace_identities(op: &DiscreteOperator) -> Result<TraceIdentityReport, MagneticError> {
    let spectrum = op.spectrum()?;
    if !spectrum.all_simple() {
        return Err(MagneticError::DegenerateSpectrum);
    }
    let beta = op.flux_count();
    let mut sum = DMatrix::<f64>::zeros(beta, beta);
    let mut weighted = DMatrix::<f64>::zeros(beta, beta);
    let mut scale = 0.0f64;
    let mut weighted_scale = 0.0f64;
    for n in 1..=spectrum.eigenvalues.len() {
        let h = hessian_perturbative(op, &spectrum, n)?;
        let hmax = linalg::max_abs(&h.matrix);
        scale += hmax;
        weighted_scale += spectrum.eigenvalues[n - 1].abs() * hmax;
        sum += &h.matrix;
        weighted += &h.matrix * spectrum.eigenvalues[n - 1];
    }
    let pass = beta == 0
        || (linalg::max_abs(&sum) < TRACE_TOL * scale.max(f64::MIN_POSITIVE)
            && linalg::max_abs(&weighted) < TRACE_TOL * weighted_scale.max(f64::MIN_POSITIVE));
    Ok(TraceIdentityReport { sum_hessians: sum, weighted_sum: weighted, scale, weighted_scale, pass })
}

/// True iff the surplus sequence is consistent with the forbidden-shape rule:
/// for `beta > 0` a fully generic spectrum cannot produce a monotone step
/// sequence `(0,...,0,beta,...,beta)` — including the all-zero and all-beta
/// degenerate forms of that shape.
pub fn forbidden_surplus_check(surplus: &[i64], beta: usize) -> bool {
    if beta == 0 {
        return true;
    }
    let b = beta as i64;
    let mut split_ok = false;
    for m in 0..=surplus.len() {
        let head_zero = surplus[..m].iter().all(|&s| s == 0);
        let tail_beta = surplus[m..].iter().all(|&s| s == b);
        if head_zero && tail_beta {
            split_ok = true;
            break;
        }
    }
    !split_ok
}

#[derive(Debug, Clone)]
pub struct GirthReport {
    /// Smallest k with a non-vanishing Hessian trace sum.
    pub girth: usize,
    /// Max-norms of `sum_n lambda^{k-1} H_n` for k = 2..=girth.
    pub signals: Vec<f64>,
    /// Scalar variant `sum_n lambda^{k-1} trace H_n` at the girth.
    pub scalar_signal: f64,
    /// Independent BFS oracle value.
    pub oracle: usize,
}

/// Recovers the girth as the smallest `k >= 2` for which
/// `sum_n lambda_n^{k-1} H_n` fails to cancel.
pub fn girth_from_traces(op: &DiscreteOperator) -> Result<GirthReport, MagneticError> {
    girth_from_traces_with_threshold(op, GIRTH_THRESHOLD)
}

pub fn girth_from_traces_with_threshold(
    op: &DiscreteOperator,
    threshold: f64,
) -> Result<GirthReport, MagneticError> {
    if op.flux_count() == 0 {
        return Err(MagneticError::TreeInput);
    }
    let spectrum = op.spectrum()?;
    if !spectrum.all_simple() {
        return Err(MagneticError::DegenerateSpectrum);
    }
    let dim = spectrum.eigenvalues.len();
    let hessians: Vec<MagneticHessian> =
        (1..=dim).map(|n| hessian_perturbative(op, &spectrum, n)).collect::<Result<_, _>>()?;
    let oracle = op.graph().girth().expect("beta > 0 implies a cycle");
    let kmax = op.graph().vertex_count() + 1;
    let mut signals = Vec::new();
    for k in 2..=kmax {
        let beta = op.flux_count();
        let mut sum = DMatrix::<f64>::zeros(beta, beta);
        let mut scalar = 0.0;
        let mut scale = 0.0f64;
        for (h, &lambda) in hessians.iter().zip(&spectrum.eigenvalues) {
            let w = lambda.powi(k as i32 - 1);
            sum += &h.matrix * w;
            scalar += w * h.matrix.trace();
            scale += w.abs() * linalg::max_abs(&h.matrix);
        }
        let signal = linalg::max_abs(&sum);
        signals.push(signal);
        let scale = scale.max(f64::MIN_POSITIVE);
        let ratio = signal / (threshold * scale);
        if ratio > 1.0 {
            if ratio < 10.0 {
                return Err(MagneticError::AmbiguousGirthSignal { k, ratio });
            }
            return Ok(GirthReport { girth: k, signals, scalar_signal: scalar, oracle });
        } else if ratio > 0.1 {
            return Err(MagneticError::AmbiguousGirthSignal { k, ratio });
        }
    }
    Err(MagneticError::NoGirthSignal { kmax })
}
