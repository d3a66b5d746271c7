//! Partial-correlation graphs from sparse precision-matrix estimates.
//!
//! Covariance inputs come from the sample covariance or from the skeptic
//! (sine-transformed Kendall's tau) correlation. Precision matrices come from
//! the graphical lasso or a ridge inverse, and edges are read off by
//! thresholding `|K_ij|`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::config::EdgeRule;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::selection::{soft_threshold_scalar, support_graph, threshold_graph};

/// Eigenvalue floor used when repairing an indefinite skeptic matrix.
pub const PSD_FLOOR: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-9;

/// Symmetric positive semi-definite `p x p` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    /// Checks squareness, finiteness, symmetry and a non-negative diagonal.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::DimensionMismatch(values.nrows(), values.ncols()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "covariance has non-finite entries".into(),
            ));
        }
        let p = values.nrows();
        for i in 0..p {
            if values[(i, i)] < 0.0 {
                return Err(Error::InvalidParameter(format!("negative variance at {i}")));
            }
            for j in 0..i {
                let (a, b) = (values[(i, j)], values[(j, i)]);
                if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidParameter(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self(values))
    }

    pub fn p(&self) -> usize {
        self.0.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// A precision-matrix estimate and the diagnostics of the solver that made it.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionEstimate {
    pub values: DMatrix<f64>,
    pub lambda: f64,
    pub iterations: usize,
    /// Largest violation of the optimality conditions (glasso) or of
    /// `(S + eps I) K = I` (ridge).
    pub kkt_residual: f64,
}

impl PrecisionEstimate {
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_positive_definite(&self) -> bool {
        Cholesky::new(self.values.clone()).is_some()
    }

    /// Graph of the nonzero off-diagonal entries.
    pub fn support(&self) -> Graph {
        support_graph(&self.values)
    }
}

/// Penalty, selection threshold and solver controls for the PG path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgConfig {
    pub lambda: f64,
    pub t_n: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl PgConfig {
    /// `lambda = sqrt(log p / n)` and `t_n = 2 sqrt(log p / n)`.
    pub fn defaults_for(n: usize, p: usize) -> Self {
        let rate = default_rate(n, p);
        Self {
            lambda: rate,
            t_n: 2.0 * rate,
            tol: 1e-7,
            max_iter: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::NegativeLambda(self.lambda));
        }
        check_threshold(self.t_n)?;
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// `sqrt(log p / n)`.
pub fn default_rate(n: usize, p: usize) -> f64 {
    ((p as f64).ln() / n as f64).sqrt()
}

fn check_threshold(t_n: f64) -> Result<()> {
    if !(t_n > 0.0 && t_n.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "threshold t_n must be positive, got {t_n}"
        )));
    }
    Ok(())
}

/// Unbiased sample covariance, `1/(n-1)` normalization.
pub fn sample_covariance(data: &DataMatrix) -> CovarianceMatrix {
    let (n, p) = (data.n(), data.p());
    let x = DMatrix::from_row_slice(n, p, data.values());
    let means = x.row_mean();
    let mut centered = x;
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    let mut s = centered.transpose() * &centered / (n as f64 - 1.0);
    symmetrize(&mut s);
    CovarianceMatrix(s)
}

/// Pearson correlation matrix. Constant columns get zero correlations.
pub fn sample_correlation(data: &DataMatrix) -> CovarianceMatrix {
    let s = sample_covariance(data).into_inner();
    let p = s.nrows();
    let sd: Vec<f64> = (0..p).map(|i| s[(i, i)].sqrt()).collect();
    let r = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else if sd[i] > 0.0 && sd[j] > 0.0 {
            (s[(i, j)] / (sd[i] * sd[j])).clamp(-1.0, 1.0)
        } else {
            0.0
        }
    });
    CovarianceMatrix(r)
}

/// Kendall's tau-b. Returns 0 when either input is constant.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for a in 0..n {
        for b in a + 1..n {
            let dx = (x[a] - x[b]).partial_cmp(&0.0).unwrap();
            let dy = (y[a] - y[b]).partial_cmp(&0.0).unwrap();
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {}
                (Equal, _) => ties_x += 1,
                (_, Equal) => ties_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let denom =
        (((concordant + discordant + ties_x) * (concordant + discordant + ties_y)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (concordant - discordant) as f64 / denom
    }
}

/// Skeptic correlation `sin(pi/2 * tau_ij)`, repaired to be PSD when needed.
pub fn npn_skeptic(data: &DataMatrix) -> CovarianceMatrix {
    let p = data.p();
    let columns: Vec<Vec<f64>> = (0..p).map(|c| data.column(c)).collect();
    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|a| (a + 1..p).map(move |b| (a, b)))
        .collect();
    let taus: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| kendall_tau(&columns[a], &columns[b]))
        .collect();
    let mut r = DMatrix::identity(p, p);
    for (&(a, b), &tau) in pairs.iter().zip(&taus) {
        let v = (FRAC_PI_2 * tau).sin();
        r[(a, b)] = v;
        r[(b, a)] = v;
    }
    let min_eig = SymmetricEigen::new(r.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < 0.0 {
        r = project_psd(&r, PSD_FLOOR);
        // back to unit diagonal
        let d: Vec<f64> = (0..p).map(|i| r[(i, i)].sqrt()).collect();
        r = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0
            } else {
                r[(i, j)] / (d[i] * d[j])
            }
        });
    }
    CovarianceMatrix(r)
}

/// Clips eigenvalues of a symmetric matrix from below at `floor`.
pub fn project_psd(m: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let clipped = eig.eigenvalues.map(|l| l.max(floor));
    let mut out =
        &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    symmetrize(&mut out);
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest violation of the optimality conditions of
/// `max_K log det K - tr(SK) - lambda * sum_{i != j} |K_ij|`
/// at `k`, with `W = K^{-1}`:
/// `W_ii = S_ii`, `W_ij - S_ij = lambda sign(K_ij)` where `K_ij != 0`,
/// and `|W_ij - S_ij| <= lambda` elsewhere.
///
/// Infinite when `k` is singular.
pub fn kkt_residual(s: &DMatrix<f64>, k: &DMatrix<f64>, lambda: f64) -> f64 {
    let Some(w) = k.clone().try_inverse() else {
        return f64::INFINITY;
    };
    let p = s.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let gap = w[(i, j)] - s[(i, j)];
            let v = if i == j {
                gap.abs()
            } else if k[(i, j)] != 0.0 {
                (gap - lambda * k[(i, j)].signum()).abs()
            } else {
                (gap.abs() - lambda).max(0.0)
            };
            worst = worst.max(v);
        }
    }
    worst
}

/// Solver state carried between penalties along a path.
#[derive(Debug, Clone)]
struct GlassoState {
    /// Working covariance, converges to `K^{-1}`.
    w: DMatrix<f64>,
    /// Column `j` holds the lasso coefficients of block `j`; `beta[(j, j)]` unused.
    beta: DMatrix<f64>,
}

impl GlassoState {
    fn cold(s: &DMatrix<f64>) -> Self {
        let p = s.nrows();
        Self {
            w: s.clone(),
            beta: DMatrix::zeros(p, p),
        }
    }
}

/// Graphical lasso with an off-diagonal L1 penalty.
///
/// Block coordinate descent over columns of the working covariance, each
/// block solved by coordinate-descent lasso. Stops when the largest change
/// of the working covariance in a sweep is below `tol * mean|diag S|`.
/// `lambda = 0` returns the exact inverse of `s`.
pub fn glasso(s: &CovarianceMatrix, config: &PgConfig) -> Result<PrecisionEstimate> {
    let mut state = None;
    glasso_step(s, config.lambda, config, &mut state)
}

/// Solves a decreasing sequence of penalties with warm starts.
pub fn glasso_path(
    s: &CovarianceMatrix,
    lambdas: &[f64],
    config: &PgConfig,
) -> Result<Vec<PrecisionEstimate>> {
    let mut state = None;
    lambdas
        .iter()
        .map(|&lambda| glasso_step(s, lambda, config, &mut state))
        .collect()
}

/// `count` log-spaced penalties from the largest off-diagonal `|S_ij|` down
/// to `ratio` times it.
pub fn lambda_path(s: &CovarianceMatrix, count: usize, ratio: f64) -> Vec<f64> {
    let m = s.values();
    let p = m.nrows();
    let mut lambda_max: f64 = 0.0;
    for i in 0..p {
        for j in 0..i {
            lambda_max = lambda_max.max(m[(i, j)].abs());
        }
    }
    match count {
        0 => vec![],
        1 => vec![lambda_max],
        _ => (0..count)
            .map(|k| lambda_max * ratio.powf(k as f64 / (count - 1) as f64))
            .collect(),
    }
}

fn glasso_step(
    s: &CovarianceMatrix,
    lambda: f64,
    config: &PgConfig,
    warm: &mut Option<GlassoState>,
) -> Result<PrecisionEstimate> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::NegativeLambda(lambda));
    }
    let sm = s.values();
    let p = sm.nrows();
    if lambda == 0.0 {
        let chol = Cholesky::new(sm.clone()).ok_or(Error::SingularInput)?;
        let mut k = chol.inverse();
        symmetrize(&mut k);
        let kkt = kkt_residual(sm, &k, 0.0);
        return Ok(PrecisionEstimate {
            values: k,
            lambda,
            iterations: 0,
            kkt_residual: kkt,
        });
    }
    if (0..p).any(|i| sm[(i, i)] <= 0.0) {
        return Err(Error::SingularInput);
    }

    let mut state = warm.take().unwrap_or_else(|| GlassoState::cold(sm));
    let scale = (0..p).map(|i| sm[(i, i)].abs()).sum::<f64>() / p as f64;
    let threshold = config.tol * scale;
    let mut gradient = vec![0.0; p];
    let mut iterations = 0;
    let mut last_delta = f64::INFINITY;

    while iterations < config.max_iter {
        iterations += 1;
        let mut delta: f64 = 0.0;
        for j in 0..p {
            lasso_block(
                sm,
                &state.w,
                &mut state.beta,
                j,
                lambda,
                threshold,
                &mut gradient,
            );
            for k in (0..p).filter(|&k| k != j) {
                let new = gradient[k];
                delta = delta.max((new - state.w[(k, j)]).abs());
                state.w[(k, j)] = new;
                state.w[(j, k)] = new;
            }
        }
        last_delta = delta;
        if delta < threshold {
            break;
        }
    }

    let k = precision_from_state(&state);
    let kkt = kkt_residual(sm, &k, lambda);
    *warm = Some(state);
    if last_delta >= threshold {
        return Err(Error::NotConverged {
            max_iter: config.max_iter,
            last_delta,
            kkt_residual: kkt,
        });
    }
    Ok(PrecisionEstimate {
        values: k,
        lambda,
        iterations,
        kkt_residual: kkt,
    })
}

/// Coordinate descent for
/// `min_b 1/2 b' W11 b - b' s12 + lambda |b|_1`
/// where `W11` is `w` without row and column `j`. On return
/// `gradient[k] = (W11 b)_k` for `k != j`.
fn lasso_block(
    s: &DMatrix<f64>,
    w: &DMatrix<f64>,
    beta: &mut DMatrix<f64>,
    j: usize,
    lambda: f64,
    tol: f64,
    gradient: &mut [f64],
) {
    let p = s.nrows();
    for k in 0..p {
        gradient[k] = if k == j {
            0.0
        } else {
            (0..p)
                .filter(|&l| l != j)
                .map(|l| w[(k, l)] * beta[(l, j)])
                .sum()
        };
    }
    const MAX_SWEEPS: usize = 10_000;
    for _ in 0..MAX_SWEEPS {
        let mut biggest: f64 = 0.0;
        for k in (0..p).filter(|&k| k != j) {
            let old = beta[(k, j)];
            let wkk = w[(k, k)];
            let partial = s[(k, j)] - (gradient[k] - wkk * old);
            let new = soft_threshold_scalar(partial, lambda) / wkk;
            if new != old {
                let step = new - old;
                beta[(k, j)] = new;
                for l in (0..p).filter(|&l| l != j) {
                    gradient[l] += w[(l, k)] * step;
                }
                biggest = biggest.max(step.abs() * wkk);
            }
        }
        if biggest < tol {
            break;
        }
    }
    // refresh to remove accumulated drift
    for k in (0..p).filter(|&k| k != j) {
        gradient[k] = (0..p)
            .filter(|&l| l != j)
            .map(|l| w[(k, l)] * beta[(l, j)])
            .sum();
    }
}

fn precision_from_state(state: &GlassoState) -> DMatrix<f64> {
    let p = state.w.nrows();
    let mut k = DMatrix::zeros(p, p);
    for j in 0..p {
        let explained: f64 = (0..p)
            .filter(|&l| l != j)
            .map(|l| state.w[(l, j)] * state.beta[(l, j)])
            .sum();
        let kjj = 1.0 / (state.w[(j, j)] - explained);
        k[(j, j)] = kjj;
        for l in (0..p).filter(|&l| l != j) {
            k[(l, j)] = -state.beta[(l, j)] * kjj;
        }
    }
    symmetrize(&mut k);
    k
}

/// `(S + eps I)^{-1}`.
pub fn ridge_precision(s: &CovarianceMatrix, epsilon: f64) -> Result<PrecisionEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "ridge epsilon must be positive, got {epsilon}"
        )));
    }
    let p = s.p();
    let shifted = s.values() + DMatrix::identity(p, p) * epsilon;
    let chol = Cholesky::new(shifted.clone()).ok_or(Error::SingularInput)?;
    let mut k = chol.inverse();
    symmetrize(&mut k);
    let residual = (&shifted * &k - DMatrix::identity(p, p)).amax();
    Ok(PrecisionEstimate {
        values: k,
        lambda: 0.0,
        iterations: 0,
        kkt_residual: residual,
    })
}

/// Edges `{i, j}` with `|K_ij| >= t_n`.
pub fn pg_select(k: &PrecisionEstimate, t_n: f64) -> Result<Graph> {
    check_threshold(t_n)?;
    Ok(threshold_graph(&k.values, t_n, EdgeRule::AtLeast))
}
