//! Validated sample matrices.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// An `n x p` sample of finite reals with unique column labels.
///
/// Values are stored row-major; row `k` is the `k`-th observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
    names: Vec<String>,
}

/// Default labels `X1..Xp`.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|c| format!("X{c}")).collect()
}

/// Validates a rectangular array of rows into a [`DataMatrix`].
///
/// Missing `names` default to `X1..Xp`.
pub fn validate_data(raw: &[Vec<f64>], names: Option<&[String]>) -> Result<DataMatrix> {
    let n = raw.len();
    let p = raw.first().map_or(0, Vec::len);
    let mut values = Vec::with_capacity(n * p);
    for (row, r) in raw.iter().enumerate() {
        if r.len() != p {
            return Err(Error::Ragged {
                row,
                expected: p,
                found: r.len(),
            });
        }
        values.extend_from_slice(r);
    }
    DataMatrix::from_row_major(n, p, values, names.map(<[String]>::to_vec))
}

impl DataMatrix {
    pub fn from_row_major(
        n: usize,
        p: usize,
        values: Vec<f64>,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::DimensionMismatch(values.len(), n * p));
        }
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        if p < 3 {
            return Err(Error::TooFewCols(p));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: idx / p,
                col: idx % p,
            });
        }
        let names = match names {
            Some(names) => {
                if names.len() != p {
                    return Err(Error::NameCount {
                        expected: p,
                        found: names.len(),
                    });
                }
                let mut seen = HashSet::with_capacity(p);
                for name in &names {
                    if !seen.insert(name.as_str()) {
                        return Err(Error::DuplicateName(name.clone()));
                    }
                }
                names
            }
            None => default_names(p),
        };
        Ok(Self {
            n,
            p,
            values,
            names,
        })
    }

    /// Builds from column vectors, all of the same length.
    pub fn from_columns(columns: &[Vec<f64>], names: Option<Vec<String>>) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        let mut values = vec![0.0; n * p];
        for (c, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch(col.len(), n));
            }
            for (k, &v) in col.iter().enumerate() {
                values[k * p + c] = v;
            }
        }
        Self::from_row_major(n, p, values, names)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Row-major backing buffer.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.p + col]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.p..(k + 1) * self.p]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.get(k, col)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.p).map(<[f64]>::to_vec).collect()
    }

    /// Returns a copy with `f` applied to every entry of column `col`.
    ///
    /// Fails if `f` produces a non-finite value.
    pub fn map_column(&self, col: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values = self.values.clone();
        for k in 0..self.n {
            let v = &mut values[k * self.p + col];
            *v = f(*v);
        }
        Self::from_row_major(self.n, self.p, values, Some(self.names.clone()))
    }

    /// Returns a copy with column `col` replaced.
    pub fn with_column(&self, col: usize, column: &[f64]) -> Result<Self> {
        if column.len() != self.n {
            return Err(Error::DimensionMismatch(column.len(), self.n));
        }
        let mut values = self.values.clone();
        for (k, &v) in column.iter().enumerate() {
            values[k * self.p + col] = v;
        }
        Self::from_row_major(self.n, self.p, values, Some(self.names.clone()))
    }
}
