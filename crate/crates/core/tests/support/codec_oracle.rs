//! Straight-from-the-formula estimator: counted ranks, an O(n^2) scan per
//! point and the ratio of sums.

use condgraph_core::codec::{conditioning_stream, extended_stream, TieStream};
use condgraph_core::DataMatrix;

pub fn rank_ge(data: &DataMatrix, col: usize) -> Vec<i64> {
    let n = data.n();
    (0..n)
        .map(|k| {
            (0..n)
                .filter(|&l| data.get(l, col) >= data.get(k, col))
                .count() as i64
        })
        .collect()
}

/// Nearest neighbour of each row over the columns not in `skip`.
pub fn neighbours(data: &DataMatrix, skip: &[usize], stream: &mut TieStream) -> Vec<usize> {
    let n = data.n();
    let kept: Vec<usize> = (0..data.p()).filter(|c| !skip.contains(c)).collect();
    let dist = |k: usize, l: usize| {
        let mut s = 0.0;
        for &c in &kept {
            let d = data.get(k, c) - data.get(l, c);
            s += d * d;
        }
        s
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let others: Vec<usize> = (0..n).filter(|&l| l != k).collect();
        let best = others
            .iter()
            .map(|&l| dist(k, l))
            .fold(f64::INFINITY, f64::min);
        let minimizers: Vec<usize> = others.into_iter().filter(|&l| dist(k, l) == best).collect();
        out.push(stream.pick(&minimizers));
    }
    out
}

/// `None` when the denominator is zero.
pub fn tn(data: &DataMatrix, i: usize, j: usize, seed: u64) -> Option<f64> {
    let r = rank_ge(data, i);
    let big_n = neighbours(data, &[i, j], &mut conditioning_stream(seed, i, j));
    let big_m = neighbours(data, &[i], &mut extended_stream(seed, i));
    let mut num = 0i64;
    let mut den = 0i64;
    for k in 0..data.n() {
        num += r[k].min(r[big_m[k]]) - r[k].min(r[big_n[k]]);
        den += r[k] - r[k].min(r[big_n[k]]);
    }
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}
