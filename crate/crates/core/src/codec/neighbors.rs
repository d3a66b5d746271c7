//! Exact nearest neighbours with uniform random tie-breaking.
//!
//! All backends compare the same canonical squared distance: the sum of
//! `(x_k[c] - x_l[c])^2` over the kept columns in ascending column order.
//! Ties are exact floating-point equality of that sum. Because every backend
//! returns the same tie sets, and tie sets are resolved sequentially in point
//! order from one stream, all backends produce identical assignments.

use std::ops::Range;

use rayon::prelude::*;

use super::stream::TieStream;
use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Dimension up to which [`NnBackend::Auto`] uses the k-d tree.
pub const KD_TREE_MAX_DIM: usize = 10;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NnBackend {
    /// k-d tree when the dimension is at most [`KD_TREE_MAX_DIM`], brute force otherwise.
    #[default]
    Auto,
    BruteForce,
    KdTree,
}

impl NnBackend {
    pub(crate) fn use_kd_tree(self, dim: usize) -> bool {
        match self {
            NnBackend::Auto => dim <= KD_TREE_MAX_DIM,
            NnBackend::BruteForce => false,
            NnBackend::KdTree => true,
        }
    }
}

/// The chosen neighbour of every point, with the size of its tie set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborAssignment {
    /// `indices[k]` is the 0-based index of the neighbour of point `k`.
    pub indices: Vec<usize>,
    pub tie_count: Vec<usize>,
}

/// Rows of a row-major buffer viewed with some columns removed.
#[derive(Debug, Clone)]
pub struct Projection<'a> {
    values: &'a [f64],
    n: usize,
    width: usize,
    dropped: Vec<usize>,
    segments: Vec<Range<usize>>,
}

impl<'a> Projection<'a> {
    pub fn new(values: &'a [f64], n: usize, width: usize, dropped: &[usize]) -> Result<Self> {
        if values.len() != n * width {
            return Err(Error::DimensionMismatch(values.len(), n * width));
        }
        let mut dropped = dropped.to_vec();
        dropped.sort_unstable();
        dropped.dedup();
        if let Some(&c) = dropped.iter().find(|&&c| c >= width) {
            return Err(Error::InvalidParameter(format!(
                "dropped column {c} out of range for width {width}"
            )));
        }
        let mut segments = Vec::with_capacity(dropped.len() + 1);
        let mut start = 0;
        for &c in &dropped {
            if c > start {
                segments.push(start..c);
            }
            start = c + 1;
        }
        if start < width {
            segments.push(start..width);
        }
        Ok(Self {
            values,
            n,
            width,
            dropped,
            segments,
        })
    }

    /// All points in `d` dimensions.
    pub fn full(values: &'a [f64], n: usize, d: usize) -> Result<Self> {
        Self::new(values, n, d, &[])
    }

    /// Rows of `data` without the listed columns.
    pub fn of_data(data: &'a DataMatrix, dropped: &[usize]) -> Result<Self> {
        Self::new(data.values(), data.n(), data.p(), dropped)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.width - self.dropped.len()
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    /// Canonical squared distance between points `k` and `l`.
    #[inline]
    pub fn sq_dist(&self, k: usize, l: usize) -> f64 {
        let a = &self.values[k * self.width..(k + 1) * self.width];
        let b = &self.values[l * self.width..(l + 1) * self.width];
        let mut acc = 0.0;
        for seg in &self.segments {
            for c in seg.clone() {
                let t = a[c] - b[c];
                acc += t * t;
            }
        }
        acc
    }

    fn materialize(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.dim());
        for k in 0..self.n {
            let row = &self.values[k * self.width..(k + 1) * self.width];
            for seg in &self.segments {
                out.extend_from_slice(&row[seg.clone()]);
            }
        }
        out
    }

    fn check(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::DegenerateDim);
        }
        if self.n < 2 {
            return Err(Error::TooFewRows(self.n));
        }
        Ok(())
    }
}

/// Nearest neighbour of every point, self excluded, ties broken by `stream`.
pub fn nearest_neighbors(
    points: &Projection<'_>,
    stream: &mut TieStream,
    backend: NnBackend,
) -> Result<NeighborAssignment> {
    points.check()?;
    let ties = if backend.use_kd_tree(points.dim()) {
        kd_tree_ties(points)
    } else {
        brute_force_ties(points)
    };
    Ok(resolve(ties, stream))
}

pub(crate) fn resolve(ties: Vec<Vec<usize>>, stream: &mut TieStream) -> NeighborAssignment {
    let mut indices = Vec::with_capacity(ties.len());
    let mut tie_count = Vec::with_capacity(ties.len());
    for t in &ties {
        indices.push(stream.pick(t));
        tie_count.push(t.len());
    }
    NeighborAssignment { indices, tie_count }
}

/// O(n^2 d) scan, parallel over query points.
pub(crate) fn brute_force_ties(points: &Projection<'_>) -> Vec<Vec<usize>> {
    (0..points.n)
        .into_par_iter()
        .map(|k| {
            let mut best = f64::INFINITY;
            let mut ties = Vec::new();
            for l in (0..points.n).filter(|&l| l != k) {
                let d = points.sq_dist(k, l);
                if d < best {
                    best = d;
                    ties.clear();
                    ties.push(l);
                } else if d == best {
                    ties.push(l);
                }
            }
            ties
        })
        .collect()
}

/// Full pairwise distances of a data set, reused across projections that
/// drop a few columns.
///
/// A projected distance is first approximated as the full distance minus the
/// dropped coordinates' terms. Every candidate within a rounding bound of the
/// approximate minimum is then re-evaluated canonically, so the resulting tie
/// sets equal those of [`brute_force_ties`] exactly.
#[derive(Debug)]
pub struct DistanceCache<'a> {
    values: &'a [f64],
    n: usize,
    width: usize,
    full: Vec<f64>,
    slack: Vec<f64>,
    columns: Vec<f64>,
}

impl<'a> DistanceCache<'a> {
    pub fn new(data: &'a DataMatrix) -> Self {
        let (n, width) = (data.n(), data.p());
        let all = Projection::of_data(data, &[]).expect("valid data");
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|k| (0..n).map(|l| all.sq_dist(k, l)).collect())
            .collect();
        // |approx - canonical| <= (2p + 4) u * D_full[k][l]; doubled for margin.
        let factor = 4.0 * (width as f64 + 4.0) * f64::EPSILON;
        let slack = rows
            .iter()
            .map(|r| factor * r.iter().copied().fold(0.0, f64::max))
            .collect();
        let mut columns = vec![0.0; n * width];
        for k in 0..n {
            for c in 0..width {
                columns[c * n + k] = data.get(k, c);
            }
        }
        Self {
            values: data.values(),
            n,
            width,
            full: rows.concat(),
            slack,
            columns,
        }
    }

    pub fn nearest_neighbors(
        &self,
        points: &Projection<'_>,
        stream: &mut TieStream,
    ) -> Result<NeighborAssignment> {
        points.check()?;
        Ok(resolve(self.ties(points)?, stream))
    }

    pub(crate) fn ties(&self, points: &Projection<'_>) -> Result<Vec<Vec<usize>>> {
        if !std::ptr::eq(points.values, self.values) || points.width != self.width {
            return Err(Error::InvalidParameter(
                "projection is not over the cached data".into(),
            ));
        }
        let n = self.n;
        let dropped: Vec<&[f64]> = points
            .dropped
            .iter()
            .map(|&c| &self.columns[c * n..(c + 1) * n])
            .collect();
        Ok((0..n)
            .into_par_iter()
            .map(|k| {
                let row = &self.full[k * n..(k + 1) * n];
                let mut approx = row.to_vec();
                for col in &dropped {
                    let xk = col[k];
                    for (a, &xl) in approx.iter_mut().zip(col.iter()) {
                        let t = xk - xl;
                        *a -= t * t;
                    }
                }
                approx[k] = f64::INFINITY;
                let lo = approx.iter().copied().fold(f64::INFINITY, f64::min);
                let cutoff = lo + 2.0 * self.slack[k];
                let mut best = f64::INFINITY;
                let mut ties = Vec::new();
                for (l, &a) in approx.iter().enumerate() {
                    if l == k || a > cutoff {
                        continue;
                    }
                    let d = points.sq_dist(k, l);
                    if d < best {
                        best = d;
                        ties.clear();
                        ties.push(l);
                    } else if d == best {
                        ties.push(l);
                    }
                }
                ties
            })
            .collect())
    }
}

enum Node {
    Leaf(Range<usize>),
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

struct KdTree {
    coords: Vec<f64>,
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    fn build(points: &Projection<'_>) -> Self {
        let mut tree = Self {
            coords: points.materialize(),
            dim: points.dim(),
            order: (0..points.n).collect(),
            nodes: Vec::new(),
        };
        tree.split(0, points.n);
        tree
    }

    #[inline]
    fn coord(&self, point: usize, dim: usize) -> f64 {
        self.coords[point * self.dim + dim]
    }

    fn split(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf(start..end));
            return self.nodes.len() - 1;
        }
        let dim = (0..self.dim)
            .map(|d| {
                let (lo, hi) = self.order[start..end].iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), &i| {
                        let v = self.coord(i, d);
                        (lo.min(v), hi.max(v))
                    },
                );
                (d, hi - lo)
            })
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            )
            .0;
        let mut slice = self.order[start..end].to_vec();
        slice.sort_unstable_by(|&a, &b| {
            self.coord(a, dim)
                .total_cmp(&self.coord(b, dim))
                .then(a.cmp(&b))
        });
        self.order[start..end].copy_from_slice(&slice);
        let mid = (start + end) / 2;
        let value = self.coord(self.order[mid], dim);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf(0..0));
        let left = self.split(start, mid);
        let right = self.split(mid, end);
        self.nodes[slot] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        slot
    }

    #[inline]
    fn sq_dist(&self, k: usize, l: usize) -> f64 {
        let a = &self.coords[k * self.dim..(k + 1) * self.dim];
        let b = &self.coords[l * self.dim..(l + 1) * self.dim];
        let mut acc = 0.0;
        for (x, y) in a.iter().zip(b) {
            let t = x - y;
            acc += t * t;
        }
        acc
    }

    fn search(&self, node: usize, k: usize, best: &mut f64, ties: &mut Vec<usize>) {
        match &self.nodes[node] {
            Node::Leaf(range) => {
                for &l in &self.order[range.clone()] {
                    if l == k {
                        continue;
                    }
                    let d = self.sq_dist(k, l);
                    if d < *best {
                        *best = d;
                        ties.clear();
                        ties.push(l);
                    } else if d == *best {
                        ties.push(l);
                    }
                }
            }
            &Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                // left holds coordinates <= value, right holds >= value
                let diff = self.coord(k, dim) - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, k, best, ties);
                if diff * diff <= *best {
                    self.search(far, k, best, ties);
                }
            }
        }
    }
}

pub(crate) fn kd_tree_ties(points: &Projection<'_>) -> Vec<Vec<usize>> {
    let tree = KdTree::build(points);
    (0..points.n)
        .into_par_iter()
        .map(|k| {
            let mut best = f64::INFINITY;
            let mut ties = Vec::new();
            tree.search(0, k, &mut best, &mut ties);
            ties.sort_unstable();
            ties
        })
        .collect()
}
