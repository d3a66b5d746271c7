use condgraph_core::DataMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(n: usize, p: usize, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..n * p)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    DataMatrix::from_row_major(n, p, v, None).unwrap()
}

/// Small integer values, so neighbour ties are common.
pub fn grid(n: usize, p: usize, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..n * p).map(|_| rng.random_range(0..4) as f64).collect();
    DataMatrix::from_row_major(n, p, v, None).unwrap()
}

/// 50 small datasets, a third of them on a coarse grid, each with a tie seed.
pub fn small_corpus() -> Vec<(DataMatrix, u64)> {
    (0..50u64)
        .map(|s| {
            let n = 2 + (s as usize * 7) % 49;
            let p = 3 + (s as usize) % 4;
            let data = if s % 3 == 0 {
                grid(n.max(6), p, s)
            } else {
                gaussian(n, p, s)
            };
            (data, s * 31 + 1)
        })
        .collect()
}
