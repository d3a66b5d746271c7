//! Matrices of estimated conditional dependence coefficients.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `p x p` matrix whose `(i, j)` entry estimates the dependence of column `i`
/// on column `j` given all other columns.
///
/// Not symmetric. The diagonal is fixed at 1 and never read by selection.
/// Ordered pairs whose estimate was undefined are listed in `excluded` and
/// hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DepMatrix {
    values: DMatrix<f64>,
    excluded: Vec<(usize, usize)>,
    names: Vec<String>,
}

impl DepMatrix {
    pub fn new(
        values: DMatrix<f64>,
        mut excluded: Vec<(usize, usize)>,
        names: Vec<String>,
    ) -> Result<Self> {
        let p = values.nrows();
        if values.ncols() != p {
            return Err(Error::DimensionMismatch(values.nrows(), values.ncols()));
        }
        if names.len() != p {
            return Err(Error::NameCount {
                expected: p,
                found: names.len(),
            });
        }
        for i in 0..p {
            if values[(i, i)] != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} is {}, expected 1",
                    values[(i, i)]
                )));
            }
        }
        for &(i, j) in &excluded {
            if i == j || i >= p || j >= p {
                return Err(Error::InvalidPair(i, j));
            }
        }
        excluded.sort_unstable();
        excluded.dedup();
        Ok(Self {
            values,
            excluded,
            names,
        })
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Ordered pairs `(i, j)` with a zero denominator, sorted.
    pub fn excluded(&self) -> &[(usize, usize)] {
        &self.excluded
    }

    pub fn is_excluded(&self, i: usize, j: usize) -> bool {
        self.excluded.binary_search(&(i, j)).is_ok()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}
