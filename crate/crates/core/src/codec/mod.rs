//! Rank / nearest-neighbour estimator of the conditional dependence
//! coefficient `T(X_i, X_j | X_{-i,j})`.
//!
//! For a pair `(i, j)` with ranks `R` of column `i`, `N(k)` the nearest
//! neighbour of row `k` in the columns other than `i, j`, and `M(k)` the
//! nearest neighbour in the columns other than `i`:
//!
//! ```text
//!        sum_k min(R_k, R_M(k)) - min(R_k, R_N(k))
//! T^n = ------------------------------------------
//!            sum_k R_k - min(R_k, R_N(k))
//! ```
//!
//! Both sums are accumulated in integers, so the estimate is an exact
//! function of the neighbour assignments.

mod neighbors;
mod rank;
mod stream;

pub use neighbors::{
    nearest_neighbors, DistanceCache, NeighborAssignment, NnBackend, Projection, KD_TREE_MAX_DIM,
};
pub use rank::{ranks, ranks_desc, RankConvention, RankVector};
pub use stream::{derive_seed, StreamTag, TieStream};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::dep::DepMatrix;
use crate::error::{Error, Result};

/// Knobs shared by the single-pair and matrix estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CodecOptions {
    pub seed: u64,
    pub ranks: RankConvention,
    pub backend: NnBackend,
}

impl CodecOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Tie stream for `N(k)` of the unordered pair `{i, j}`.
pub fn conditioning_stream(seed: u64, i: usize, j: usize) -> TieStream {
    TieStream::new(seed, StreamTag::Conditioning { a: i, b: j })
}

/// Tie stream for `M(k)` of column `i`; shared by every `j`.
pub fn extended_stream(seed: u64, i: usize) -> TieStream {
    TieStream::new(seed, StreamTag::Extended { i })
}

/// Estimate from ranks and both neighbour assignments. `None` when the
/// denominator vanishes.
pub fn tn_from_assignments(ranks: &RankVector, n_of: &[usize], m_of: &[usize]) -> Option<f64> {
    let mut num: i64 = 0;
    let mut den: i64 = 0;
    for k in 0..ranks.len() {
        let r = ranks.get(k) as i64;
        let via_n = r.min(ranks.get(n_of[k]) as i64);
        let via_m = r.min(ranks.get(m_of[k]) as i64);
        num += via_m - via_n;
        den += r - via_n;
    }
    (den != 0).then(|| num as f64 / den as f64)
}

fn check_pair(data: &DataMatrix, i: usize, j: usize) -> Result<()> {
    if i == j || i >= data.p() || j >= data.p() {
        return Err(Error::InvalidPair(i, j));
    }
    Ok(())
}

/// `T^n(X_i, X_j | X_{-i,j})` for one ordered pair (0-based columns).
///
/// Fails with [`Error::DegenerateDenominator`] when column `i` is
/// empirically a function of the conditioning columns.
pub fn codec_tn(data: &DataMatrix, i: usize, j: usize, opts: &CodecOptions) -> Result<f64> {
    check_pair(data, i, j)?;
    let r = ranks(&data.column(i), opts.ranks);
    let n_space = Projection::of_data(data, &[i, j])?;
    let m_space = Projection::of_data(data, &[i])?;
    let n_of = nearest_neighbors(
        &n_space,
        &mut conditioning_stream(opts.seed, i, j),
        opts.backend,
    )?;
    let m_of = nearest_neighbors(&m_space, &mut extended_stream(opts.seed, i), opts.backend)?;
    tn_from_assignments(&r, &n_of.indices, &m_of.indices)
        .ok_or(Error::DegenerateDenominator { i, j })
}

/// Estimates every ordered pair.
///
/// `M(k)` is computed once per column and `N(k)` once per unordered pair.
/// Pairs run in parallel; the result does not depend on the thread count.
/// Pairs with a zero denominator hold 0 and are listed as excluded.
pub fn codec_matrix(data: &DataMatrix, opts: &CodecOptions) -> DepMatrix {
    let p = data.p();
    let ranks_by_col: Vec<RankVector> = (0..p)
        .into_par_iter()
        .map(|c| ranks(&data.column(c), opts.ranks))
        .collect();

    // the brute-force route shares one pairwise distance table
    let needs_cache = !opts.backend.use_kd_tree(p - 1) || !opts.backend.use_kd_tree(p - 2);
    let cache = needs_cache.then(|| DistanceCache::new(data));

    let assign = |dropped: &[usize], mut stream: TieStream| -> NeighborAssignment {
        let proj = Projection::of_data(data, dropped).expect("columns in range");
        match &cache {
            Some(cache) if !opts.backend.use_kd_tree(proj.dim()) => cache
                .nearest_neighbors(&proj, &mut stream)
                .expect("valid projection"),
            _ => nearest_neighbors(&proj, &mut stream, opts.backend).expect("valid projection"),
        }
    };

    let m_of: Vec<Vec<usize>> = (0..p)
        .into_par_iter()
        .map(|i| assign(&[i], extended_stream(opts.seed, i)).indices)
        .collect();

    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|a| (a + 1..p).map(move |b| (a, b)))
        .collect();
    let estimates: Vec<(Option<f64>, Option<f64>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let n_of = assign(&[a, b], conditioning_stream(opts.seed, a, b)).indices;
            (
                tn_from_assignments(&ranks_by_col[a], &n_of, &m_of[a]),
                tn_from_assignments(&ranks_by_col[b], &n_of, &m_of[b]),
            )
        })
        .collect();

    let mut values = DMatrix::identity(p, p);
    let mut excluded = Vec::new();
    for (&(a, b), &(ab, ba)) in pairs.iter().zip(&estimates) {
        for (i, j, t) in [(a, b, ab), (b, a, ba)] {
            match t {
                Some(t) => values[(i, j)] = t,
                None => {
                    values[(i, j)] = 0.0;
                    excluded.push((i, j));
                }
            }
        }
    }
    DepMatrix::new(values, excluded, data.names().to_vec()).expect("well-formed matrix")
}
