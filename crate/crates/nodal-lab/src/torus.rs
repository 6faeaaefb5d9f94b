//! Length decompositions over rational coefficients, the secular function on
//! the induced torus, the linear flow `k -> k xi`, the Hessian-on-torus
//! formula, revisit statistics, and surplus frequency histograms.
//!
//! Incommensurability is declared, not detected: floating-point lengths cannot
//! certify irrationality, so the rational coefficient matrix is authoritative
//! input and all lattice data (periods, integer images) is computed from it
//! exactly.

use crate::magnetic::MagneticHessian;
use crate::metric::{
    self, k_spectrum, metric_nodal_report, MetricError, SecularSystem,
};
use nalgebra::DMatrix;
use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

/// Reconstruction tolerance of `L(xi) = l`, relative.
pub const DECOMPOSITION_TOL: f64 = 1e-10;
/// FD step in flux for the torus Hessian; one Richardson level is applied.
pub const TORUS_FD_STEP: f64 = 1e-3;
/// Step in k for the flow derivative `xi . grad F = dF/dk`.
pub const K_DERIVATIVE_STEP: f64 = 1e-6;
/// Torus max-norm radius for revisit statistics.
pub const REVISIT_DELTA: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("coefficient matrix must be {edges} x |I| with |I| >= 1; got {rows} x {cols}")]
    BadShape { edges: usize, rows: usize, cols: usize },
    #[error("coefficient matrix does not have full column rank over the rationals")]
    RankDeficient,
    #[error("declared relations are inconsistent with length {edge}: residual {residual:.3e}")]
    InconsistentLengths { edge: usize, residual: f64 },
    #[error("generator {index} solved to the non-positive value {value}")]
    NonPositiveGenerator { index: usize, value: f64 },
    #[error("flow derivative at k = {k} is {value:.3e}; root is not simple enough")]
    DerivativeVanishes { k: f64, value: f64 },
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("only {found} generic eigenvalues found, need {want} (ceiling already extended)")]
    TooFewGeneric { found: usize, want: usize },
    #[error("surplus statistics need N >= 50, got {n}")]
    SampleTooSmall { n: usize },
}

/// Declared rational structure of the edge lengths: an `|E| x |I|` matrix `r`
/// with `l_e = sum_i r[e][i] * xi_i` for positive generators `xi` that are
/// (by declaration) linearly independent over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencySpec {
    pub coefficients: Vec<Vec<Rational64>>,
}

impl DependencySpec {
    /// Fully incommensurate lengths: identity coefficients, `xi = l`.
    pub fn incommensurate(edges: usize) -> Self {
        let coefficients = (0..edges)
            .map(|e| {
                (0..edges)
                    .map(|i| if i == e { Rational64::from_integer(1) } else { Rational64::from_integer(0) })
                    .collect()
            })
            .collect();
        Self { coefficients }
    }

    /// All lengths rational multiples of one generator: `l_e = ratios[e] xi`.
    pub fn all_rational(ratios: &[Rational64]) -> Self {
        Self { coefficients: ratios.iter().map(|&r| vec![r]).collect() }
    }
}

/// A validated decomposition `l = L(xi)` together with the torus periods.
#[derive(Debug, Clone)]
pub struct LengthDecomposition {
    generators: Vec<f64>,
    coefficients: Vec<Vec<Rational64>>,
    periods: Vec<f64>,
}

/// Exact rank over the rationals by fraction-free elimination.
fn rational_rank(matrix: &[Vec<Rational64>]) -> usize {
    let mut m: Vec<Vec<Rational64>> = matrix.to_vec();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| m[r][col] != Rational64::from_integer(0));
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        let pv = m[row][col];
        for r in 0..rows {
            if r != row && m[r][col] != Rational64::from_integer(0) {
                let factor = m[r][col] / pv;
                for c in col..cols {
                    let sub = factor * m[row][c];
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Solves for the generators and validates the declared relations against the
/// numeric lengths.
pub fn decompose_lengths(
    lengths: &[f64],
    spec: &DependencySpec,
) -> Result<LengthDecomposition, TorusError> {
    let edges = lengths.len();
    let rows = spec.coefficients.len();
    let cols = spec.coefficients.first().map_or(0, |r| r.len());
    if rows != edges || cols == 0 || spec.coefficients.iter().any(|r| r.len() != cols) {
        return Err(TorusError::BadShape { edges, rows, cols });
    }
    if rational_rank(&spec.coefficients) != cols {
        return Err(TorusError::RankDeficient);
    }

    // Least-squares solve in f64 (the system is consistent by declaration;
    // the normal equations are well conditioned at desk scale).
    let r = DMatrix::<f64>::from_fn(edges, cols, |e, i| {
        let q = spec.coefficients[e][i];
        *q.numer() as f64 / *q.denom() as f64
    });
    let rhs = nalgebra::DVector::<f64>::from_column_slice(lengths);
    let normal = r.transpose() * &r;
    let b = r.transpose() * &rhs;
    let generators_vec = normal
        .lu()
        .solve(&b)
        .expect("full column rank makes the normal matrix invertible");
    let generators: Vec<f64> = generators_vec.iter().copied().collect();
    for (i, &g) in generators.iter().enumerate() {
        if !(g.is_finite() && g > 0.0) {
            return Err(TorusError::NonPositiveGenerator { index: i, value: g });
        }
    }
    for e in 0..edges {
        let recon: f64 = (0..cols)
            .map(|i| {
                let q = spec.coefficients[e][i];
                (*q.numer() as f64 / *q.denom() as f64) * generators[i]
            })
            .sum();
        let residual = (recon - lengths[e]).abs();
        if residual > DECOMPOSITION_TOL * lengths[e].abs().max(1.0) {
            return Err(TorusError::InconsistentLengths { edge: e, residual });
        }
    }

    // Period of coordinate i: the smallest T = p/q > 0 with T r[e][i] integer
    // for all e, scaled by 2 pi. Exact rational arithmetic.
    let periods = (0..cols)
        .map(|i| {
            let mut denom_lcm: i64 = 1;
            let mut numer_gcd: i64 = 0;
            for e in 0..edges {
                let q = spec.coefficients[e][i];
                if q != Rational64::from_integer(0) {
                    denom_lcm = denom_lcm.lcm(q.denom());
                    numer_gcd = numer_gcd.gcd(&q.numer().abs());
                }
            }
            2.0 * std::f64::consts::PI * denom_lcm as f64 / numer_gcd as f64
        })
        .collect();

    Ok(LengthDecomposition { generators, coefficients: spec.coefficients.clone(), periods })
}

impl LengthDecomposition {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[f64] {
        &self.generators
    }

    pub fn coefficients(&self) -> &[Vec<Rational64>] {
        &self.coefficients
    }

    /// Per-coordinate torus periods (rational multiples of 2 pi).
    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// The linear map `L(x)`: per-edge lengths generated by coordinates `x`.
    pub fn lengths_of(&self, x: &[f64]) -> Result<Vec<f64>, TorusError> {
        if x.len() != self.generator_count() {
            return Err(TorusError::DimensionMismatch {
                expected: self.generator_count(),
                got: x.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .map(|(q, &xi)| (*q.numer() as f64 / *q.denom() as f64) * xi)
                    .sum()
            })
            .collect())
    }

    /// The flow position `k xi` reduced modulo the periods.
    pub fn flow_point(&self, k: f64) -> TorusPoint {
        let coords = self
            .generators
            .iter()
            .zip(&self.periods)
            .map(|(&xi, &p)| (k * xi).rem_euclid(p))
            .collect();
        TorusPoint { coords }
    }

    /// Max-norm distance on the torus, respecting wraparound.
    pub fn distance(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        a.coords
            .iter()
            .zip(&b.coords)
            .zip(&self.periods)
            .map(|((&x, &y), &p)| {
                let d = (x - y).rem_euclid(p);
                d.min(p - d)
            })
            .fold(0.0f64, f64::max)
    }

    /// The antipode `-x` on the torus.
    pub fn negate(&self, x: &TorusPoint) -> TorusPoint {
        TorusPoint {
            coords: x.coords.iter().zip(&self.periods).map(|(&c, &p)| (-c).rem_euclid(p)).collect(),
        }
    }
}

/// A point of the torus, coordinates within `[0, period_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    pub coords: Vec<f64>,
}

/// `F(x; alpha) = secular value at k = 1 with lengths L(x)`.
pub fn f_on_torus(
    system: &SecularSystem,
    decomp: &LengthDecomposition,
    x: &[f64],
    flux: &[f64],
) -> Result<f64, TorusError> {
    let lengths = decomp.lengths_of(x)?;
    Ok(system.secular_value_with_lengths(1.0, &lengths, flux)?)
}

/// `dF/dk` along the flow at `k`, by Richardson-extrapolated central
/// differences; equals `xi . grad F` by homogeneity.
pub fn flow_derivative(
    system: &SecularSystem,
    k: f64,
    flux: &[f64],
) -> Result<f64, TorusError> {
    let d = |h: f64| -> Result<f64, TorusError> {
        let plus = system.secular_value(k + h, flux)?;
        let minus = system.secular_value(k - h, flux)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let coarse = d(K_DERIVATIVE_STEP)?;
    let fine = d(0.5 * K_DERIVATIVE_STEP)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Flux Hessian of `k_n` from the torus formula `H_k = -H_F / (xi . grad F)`
/// evaluated at the flow point of a simple root.
pub fn torus_hessian(
    system: &SecularSystem,
    decomp: &LengthDecomposition,
    k_root: f64,
) -> Result<MagneticHessian, TorusError> {
    let beta = system.flux_count();
    let zero = vec![0.0; beta];
    let dfdk = flow_derivative(system, k_root, &zero)?;
    // Scale reference: the secular value a quarter-oscillation away.
    let scale = system
        .secular_value(k_root + 0.25, &zero)?
        .abs()
        .max(system.secular_value(k_root - 0.25, &zero)?.abs())
        .max(f64::MIN_POSITIVE);
    if dfdk.abs() < 1e-8 * scale {
        return Err(TorusError::DerivativeVanishes { k: k_root, value: dfdk });
    }
    let value = |assign: &[(usize, f64)]| -> Result<f64, TorusError> {
        let mut flux = vec![0.0; beta];
        for &(i, x) in assign {
            flux[i] = x;
        }
        Ok(system.secular_value(k_root, &flux)?)
    };
    let f0 = value(&[])?;
    let hessian_at_step = |h: f64| -> Result<DMatrix<f64>, TorusError> {
        let mut m = DMatrix::<f64>::zeros(beta, beta);
        for i in 0..beta {
            let plus = value(&[(i, h)])?;
            let minus = value(&[(i, -h)])?;
            m[(i, i)] = (plus + minus - 2.0 * f0) / (h * h);
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
    let coarse = hessian_at_step(TORUS_FD_STEP)?;
    let fine = hessian_at_step(0.5 * TORUS_FD_STEP)?;
    let h_f = (fine * 4.0 - coarse) / 3.0;
    let matrix = -h_f / dfdk;
    let _ = decomp; // the flow point is implicit: F(k xi; alpha) = F~(k; l; alpha)
    Ok(crate::magnetic::finish_hessian(0, matrix))
}

/// Times `k` in `(k_min, k_cap]` at which the flow returns within `delta`
/// (max-norm) of `x_ref`, one representative per visit, earliest first.
pub fn revisit_times(
    decomp: &LengthDecomposition,
    x_ref: &TorusPoint,
    delta: f64,
    want: usize,
    k_min: f64,
    k_cap: f64,
) -> Vec<f64> {
    let gens = decomp.generators();
    let periods = decomp.periods();
    let speed = gens.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1e-12);
    let dt = delta / (4.0 * speed);
    let mut out = Vec::new();

    // A visit needs every coordinate within delta, so it can only happen
    // while the slowest-recurring coordinate is aligned with its target.
    // Stepping window-to-window along that pivot skips the (typically vast)
    // stretches where the pivot alone rules a visit out.
    let pivot = (0..gens.len())
        .filter(|&i| gens[i].abs() > 1e-12)
        .min_by(|&a, &b| {
            (gens[a].abs() / periods[a])
                .partial_cmp(&(gens[b].abs() / periods[b]))
                .unwrap()
        });
    let windows: Box<dyn Iterator<Item = (f64, f64)>> = match pivot {
        Some(p) if 2.0 * delta < periods[p] => {
            let s = gens[p].abs();
            let period = periods[p];
            let target = if gens[p] > 0.0 {
                x_ref.coords[p]
            } else {
                (period - x_ref.coords[p]).rem_euclid(period)
            };
            let stride = period / s;
            let base = target / s;
            let half = delta / s;
            let first = ((k_min - base - half) / stride).floor() as i64;
            Box::new((first..).map(move |n| {
                let center = base + n as f64 * stride;
                (center - half, center + half)
            }))
        }
        // Near-stationary flow or a delta wider than a period: the window
        // structure degenerates, scan densely.
        _ => Box::new(std::iter::once((k_min, k_cap))),
    };

    for (lo, hi) in windows {
        if lo > k_cap || out.len() >= want {
            break;
        }
        let lo = lo.max(k_min);
        let hi = hi.min(k_cap);
        let mut in_visit = false;
        let mut best_k = 0.0;
        let mut best_d = f64::INFINITY;
        let mut k = lo;
        while k <= hi {
            let d = decomp.distance(&decomp.flow_point(k), x_ref);
            if d < delta {
                if d < best_d {
                    best_d = d;
                    best_k = k;
                }
                in_visit = true;
            } else if in_visit {
                in_visit = false;
                out.push(best_k);
                if out.len() >= want {
                    return out;
                }
                best_d = f64::INFINITY;
            }
            k += dt;
        }
        if in_visit {
            out.push(best_k);
        }
    }
    out
}

/// Locates the secular root realizing a revisit: the zero of `F` nearest to
/// `t` whose flow point stays within `delta` of the visited neighborhood.
pub fn root_near_time(
    system: &SecularSystem,
    decomp: &LengthDecomposition,
    x_ref: &TorusPoint,
    t: f64,
    delta: f64,
) -> Result<Option<f64>, TorusError> {
    let speed = decomp.generators().iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1e-12);
    let w = 2.0 * delta / speed;
    let zero = vec![0.0; system.flux_count()];
    let steps = 100;
    let mut prev_k = t - w;
    let mut prev_f = system.secular_value(prev_k, &zero)?;
    let mut best: Option<f64> = None;
    for i in 1..=steps {
        let k = t - w + 2.0 * w * i as f64 / steps as f64;
        let f = system.secular_value(k, &zero)?;
        if prev_f * f < 0.0 {
            let mut a = prev_k;
            let mut b = k;
            let mut fa = prev_f;
            // Tolerance floored at a few ulps: revisit times sit far from the
            // origin, where an absolute 1e-12 is below the f64 spacing.
            let tol = metric::ROOT_TOL.max(8.0 * f64::EPSILON * b.abs());
            while b - a > tol {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = system.secular_value(mid, &zero)?;
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let root = 0.5 * (a + b);
            if decomp.distance(&decomp.flow_point(root), x_ref) < 2.0 * delta {
                let closer = best.map_or(true, |r: f64| (root - t).abs() < (r - t).abs());
                if closer {
                    best = Some(root);
                }
            }
        }
        prev_k = k;
        prev_f = f;
    }
    Ok(best)
}

/// Surplus histogram over the first `n_target` generic metric eigenvalues.
#[derive(Debug, Clone)]
pub struct SurplusHistogram {
    /// `counts[s]` = number of generic eigenvalues with surplus `s`.
    pub counts: Vec<usize>,
    /// Every observed surplus has its mirror `beta - s` observed too.
    pub symmetric: bool,
    /// Mass is spread over more than one value (beta > 0).
    pub not_single_valued: bool,
}

/// Computes surplus frequencies by scanning the k-spectrum until `n_target`
/// generic eigenvalues are collected; extends the scan ceiling once.
pub fn surplus_statistics(
    system: &SecularSystem,
    n_target: usize,
) -> Result<SurplusHistogram, TorusError> {
    if n_target < 50 {
        return Err(TorusError::SampleTooSmall { n: n_target });
    }
    let beta = system.graph().betti_number();
    let total = system.metric_graph().total_length();
    let mut k_max = std::f64::consts::PI * (1.4 * n_target as f64 + 10.0) / total;
    for attempt in 0..3 {
        let roots = k_spectrum(system, &vec![0.0; system.flux_count()], k_max)?;
        let report = metric_nodal_report(system, &roots)?;
        let mut counts = vec![0usize; beta + 1];
        let mut collected = 0;
        for (_, entry) in report.generic_entries() {
            if entry.sigma < 0 || entry.sigma > beta as i64 {
                // Out-of-bound surplus would falsify the nodal bounds; let the
                // caller see it rather than fold it into a histogram.
                continue;
            }
            counts[entry.sigma as usize] += 1;
            collected += 1;
            if collected == n_target {
                break;
            }
        }
        if collected < n_target {
            if attempt < 2 {
                k_max *= 1.5;
                continue;
            }
            return Err(TorusError::TooFewGeneric { found: collected, want: n_target });
        }
        // Support symmetry with a finite-horizon guard: a surplus value seen
        // only a handful of times (e.g. the lowest eigenvalue) may have its
        // mirror still beyond k_max, so only values carrying at least two
        // hits and 1% of the sample demand a mirror.
        let established = |c: usize| c >= 2.max(n_target / 100);
        let symmetric =
            (0..=beta).all(|s| !established(counts[s]) || counts[beta - s] > 0);
        let not_single_valued =
            beta == 0 || counts.iter().filter(|&&c| c > 0).count() > 1;
        return Ok(SurplusHistogram { counts, symmetric, not_single_valued });
    }
    unreachable!("loop either returns or errors");
}
