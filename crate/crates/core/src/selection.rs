//! From a coefficient matrix to a graph: symmetrization, soft-thresholding
//! and the threshold edge rule.

use nalgebra::DMatrix;

use crate::codec::{codec_matrix, CodecOptions};
use crate::config::{EdgeRule, SelectionConfig};
use crate::data::DataMatrix;
use crate::dep::DepMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Symmetric matrix shrunk off the diagonal by `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedMatrix {
    pub values: DMatrix<f64>,
    pub lambda: f64,
}

impl ThresholdedMatrix {
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    /// Graph of the nonzero off-diagonal entries.
    pub fn support(&self) -> Graph {
        support_graph(&self.values)
    }
}

/// `out[i][j] = max(|r[i][j]|, |r[j][i]|)` off the diagonal; diagonal kept.
pub fn symmetrize_max(r: &DepMatrix) -> DMatrix<f64> {
    let v = r.values();
    let p = v.nrows();
    DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            v[(i, i)]
        } else {
            v[(i, j)].abs().max(v[(j, i)].abs())
        }
    })
}

#[inline]
pub fn soft_threshold_scalar(x: f64, lambda: f64) -> f64 {
    x.signum() * (x.abs() - lambda).max(0.0)
}

/// Closed-form minimizer of `1/2 ||m - S||_F^2 + lambda * sum_{i != j} |S_ij|`.
pub fn soft_threshold(m: &DMatrix<f64>, lambda: f64) -> Result<ThresholdedMatrix> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::NegativeLambda(lambda));
    }
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let values = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i == j {
            m[(i, j)]
        } else {
            soft_threshold_scalar(m[(i, j)], lambda)
        }
    });
    Ok(ThresholdedMatrix { values, lambda })
}

/// Edges `{i, j}` with `|m[i][j]|` admitted by `config.rule` against `config.lambda`.
///
/// Reads the upper triangle only; `m` is expected to be symmetric.
pub fn select_edges(m: &DMatrix<f64>, config: &SelectionConfig) -> Graph {
    threshold_graph(m, config.lambda, config.rule)
}

pub(crate) fn threshold_graph(m: &DMatrix<f64>, threshold: f64, rule: EdgeRule) -> Graph {
    let p = m.nrows();
    let mut g = Graph::empty(p);
    for i in 0..p {
        for j in i + 1..p {
            if rule.admits(m[(i, j)].abs(), threshold) {
                g.add_edge(i, j).expect("in range");
            }
        }
    }
    g
}

/// Graph of nonzero upper-triangle entries.
pub fn support_graph(m: &DMatrix<f64>) -> Graph {
    let p = m.nrows();
    let mut g = Graph::empty(p);
    for i in 0..p {
        for j in i + 1..p {
            if m[(i, j)] != 0.0 {
                g.add_edge(i, j).expect("in range");
            }
        }
    }
    g
}

/// Output of [`ggm_recover`].
#[derive(Debug, Clone)]
pub struct Recovery {
    pub graph: Graph,
    pub coefficients: DepMatrix,
}

impl Recovery {
    pub fn excluded(&self) -> &[(usize, usize)] {
        self.coefficients.excluded()
    }
}

/// Estimate all coefficients, symmetrize by max, keep edges at or above the threshold.
pub fn ggm_recover(
    data: &DataMatrix,
    config: &SelectionConfig,
    opts: &CodecOptions,
) -> Result<Recovery> {
    config.validate()?;
    let opts = CodecOptions {
        seed: config.seed,
        ..*opts
    };
    let coefficients = codec_matrix(data, &opts);
    let sym = symmetrize_max(&coefficients);
    let graph = select_edges(&sym, config).with_names(data.names().to_vec())?;
    Ok(Recovery {
        graph,
        coefficients,
    })
}

/// Admissible thresholds `[c_a_n, r_min - c_a_n]` for exact support
/// recovery, or `None` unless `r_min > 2 c_a_n`.
pub fn threshold_band(r_min: f64, c_a_n: f64) -> Option<(f64, f64)> {
    (r_min > 2.0 * c_a_n).then_some((c_a_n, r_min - c_a_n))
}
