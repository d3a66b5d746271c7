//! Check suites shared by the integration tests and the acceptance target.
//! Each returns the measured quantity so callers can report it.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use condgraph_core::codec::{codec_tn, CodecOptions, NnBackend};
use condgraph_core::precision::{
    glasso, pg_select, sample_covariance, CovarianceMatrix, PgConfig, PrecisionEstimate,
};
use condgraph_core::selection::{soft_threshold, support_graph, symmetrize_max};
use condgraph_core::{select_edges, DataMatrix, DepMatrix, Graph, SelectionConfig};

use super::{codec_oracle, data, glasso_oracle, kkt};

/// Ordered pairs where an estimator backend differs from the oracle, and the pair count.
pub fn oracle_mismatches() -> (usize, usize) {
    let mut bad = 0;
    let mut total = 0;
    for (d, seed) in data::small_corpus() {
        for backend in [NnBackend::Auto, NnBackend::BruteForce, NnBackend::KdTree] {
            let opts = CodecOptions {
                seed,
                backend,
                ..Default::default()
            };
            for i in 0..d.p() {
                for j in (0..d.p()).filter(|&j| j != i) {
                    total += 1;
                    let want = codec_oracle::tn(&d, i, j, seed).map(f64::to_bits);
                    if codec_tn(&d, i, j, &opts).ok().map(f64::to_bits) != want {
                        bad += 1;
                    }
                }
            }
        }
    }
    (bad, total)
}

/// Estimates changed by `x^3` or `exp` on column `i`, over 20 datasets.
pub fn monotone_mismatches() -> usize {
    let mut bad = 0;
    for s in 0..20u64 {
        let d = data::gaussian(40, 3 + (s as usize) % 3, 100 + s);
        let opts = CodecOptions::with_seed(s);
        for i in 0..d.p() {
            let cubed = d.map_column(i, |x| x.powi(3)).unwrap();
            let exped = d.map_column(i, f64::exp).unwrap();
            for j in (0..d.p()).filter(|&j| j != i) {
                let base = codec_tn(&d, i, j, &opts).unwrap().to_bits();
                bad += usize::from(codec_tn(&cubed, i, j, &opts).unwrap().to_bits() != base);
                bad += usize::from(codec_tn(&exped, i, j, &opts).unwrap().to_bits() != base);
            }
        }
    }
    bad
}

/// Largest defined estimate over every dataset the suites use.
pub fn max_estimate() -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let mut sets: Vec<(DataMatrix, u64)> = data::small_corpus();
    sets.extend((0..20u64).map(|s| (data::gaussian(40, 3 + (s as usize) % 3, 100 + s), s)));
    for (d, seed) in sets {
        let m = condgraph_core::codec_matrix(&d, &CodecOptions::with_seed(seed));
        for i in 0..d.p() {
            for j in (0..d.p()).filter(|&j| j != i && !m.is_excluded(i, j)) {
                worst = worst.max(m.get(i, j));
            }
        }
    }
    worst
}

fn random_symmetric(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// Worst first-order violation, and the number of single-entry
/// perturbations of size 1e-4 that lowered the objective.
pub fn soft_threshold_kkt() -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut decreases = 0;
    for _ in 0..100 {
        let m = random_symmetric(&mut rng, 5);
        for lambda in [0.0, 0.05, 0.2] {
            let s = soft_threshold(&m, lambda).unwrap().values;
            worst = worst.max(kkt::soft_threshold_violation(&m, &s, lambda));
            let base = kkt::objective(&m, &s, lambda);
            for i in 0..5 {
                for j in 0..5 {
                    for h in [-1e-4, 1e-4] {
                        let mut q = s.clone();
                        q[(i, j)] += h;
                        decreases += usize::from(kkt::objective(&m, &q, lambda) < base);
                    }
                }
            }
        }
    }
    (worst, decreases)
}

/// Random support with nonzero magnitudes in `[r_min, 1]`.
fn random_target(rng: &mut impl Rng, p: usize, r_min: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(p, p);
    for i in 0..p {
        for j in i + 1..p {
            if rng.random_bool(0.4) {
                let v =
                    rng.random_range(r_min..=1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                r[(i, j)] = v;
                r[(j, i)] = v;
            }
        }
    }
    r
}

/// Trials (out of 100) where thresholding a matrix within `eps` of the
/// target missed its support, through symmetrization and directly.
pub fn threshold_surrogate_failures() -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for _ in 0..100 {
        let p = rng.random_range(3..9);
        let r_min = rng.random_range(0.05..0.6);
        let eps = rng.random_range(0.0..r_min / 2.0) * 0.999;
        let lambda = rng.random_range(eps..=r_min - eps);
        let target = random_target(&mut rng, p, r_min);
        let truth = support_graph(&target);
        let noisy = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0
            } else {
                target[(i, j)] + rng.random_range(-eps..eps)
            }
        });
        let dep = DepMatrix::new(noisy, vec![], condgraph_core::data::default_names(p)).unwrap();
        let config = SelectionConfig::new(lambda, 0).unwrap();
        let via_sym = select_edges(&symmetrize_max(&dep), &config);
        let sym_noise = (dep.values() + dep.values().transpose()) * 0.5;
        let direct = select_edges(&sym_noise, &config);
        failures += usize::from(via_sym != truth || direct != truth);
    }
    failures
}

/// Trials (out of 100) where `pg_select` on an estimate within `eps` of a
/// precision matrix missed its support.
pub fn pg_surrogate_failures() -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    for _ in 0..100 {
        let p = rng.random_range(3..9);
        let k_min = rng.random_range(0.05..0.6);
        let eps = rng.random_range(0.0..k_min / 2.0) * 0.999;
        let t_n: f64 = rng.random_range(eps..=k_min - eps);
        let t_n = t_n.max(f64::MIN_POSITIVE);
        let mut k = random_target(&mut rng, p, k_min);
        // diagonal dominance keeps K positive definite
        for i in 0..p {
            k[(i, i)] = 1.0
                + (0..p)
                    .filter(|&j| j != i)
                    .map(|j| k[(i, j)].abs())
                    .sum::<f64>();
        }
        let truth = support_graph(&k);
        let noise = random_symmetric(&mut rng, p) * eps;
        let est = PrecisionEstimate {
            values: &k + noise,
            lambda: 0.0,
            iterations: 0,
            kkt_residual: 0.0,
        };
        failures += usize::from(pg_select(&est, t_n).unwrap() != truth);
    }
    failures
}

pub fn random_covariance(rng: &mut impl Rng, p: usize) -> CovarianceMatrix {
    let a: DMatrix<f64> = DMatrix::from_fn(p, 2 * p, |_, _| StandardNormal.sample(rng));
    let s: DMatrix<f64> = &a * a.transpose() / (2 * p) as f64 + DMatrix::identity(p, p) * 0.05;
    CovarianceMatrix::new((&s + s.transpose()) * 0.5).unwrap()
}

pub struct GlassoSuite {
    pub runs: usize,
    pub converged: usize,
    pub worst_kkt: f64,
    pub all_pd: bool,
}

/// 50 random 10x10 inputs at three penalties.
pub fn glasso_kkt_suite() -> GlassoSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut out = GlassoSuite {
        runs: 0,
        converged: 0,
        worst_kkt: 0.0,
        all_pd: true,
    };
    for _ in 0..50 {
        let s = random_covariance(&mut rng, 10);
        for lambda in [0.05, 0.1, 0.3] {
            out.runs += 1;
            let cfg = PgConfig {
                lambda,
                t_n: 1.0,
                tol: 1e-8,
                max_iter: 1000,
            };
            if let Ok(k) = glasso(&s, &cfg) {
                out.converged += 1;
                out.worst_kkt = out.worst_kkt.max(k.kkt_residual);
                out.all_pd &= k.is_positive_definite();
            }
        }
    }
    out
}

/// Largest entrywise gap to the proximal-gradient solver on 3x3 inputs.
pub fn glasso_small_gap() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = random_covariance(&mut rng, 3);
        for lambda in [0.05, 0.1, 0.3] {
            let cfg = PgConfig {
                lambda,
                t_n: 1.0,
                tol: 1e-12,
                max_iter: 10_000,
            };
            let fast = glasso(&s, &cfg).unwrap().values;
            let slow = glasso_oracle::solve(s.values(), lambda, 1e-10, 200_000);
            worst = worst.max((fast - slow).amax());
        }
    }
    worst
}

pub fn tridiagonal_precision(p: usize, off: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else if i.abs_diff(j) == 1 {
            off
        } else {
            0.0
        }
    })
}

/// Gaussian rows with covariance `inv(k)`.
pub fn gaussian_with_precision(k: &DMatrix<f64>, n: usize, seed: u64) -> DataMatrix {
    let p = k.nrows();
    let sigma = k.clone().try_inverse().unwrap();
    let l = sigma.cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vec::with_capacity(n * p);
    for _ in 0..n {
        let z = nalgebra::DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
        v.extend((&l * z).iter());
    }
    DataMatrix::from_row_major(n, p, v, None).unwrap()
}

/// Mean TPR and FPR of glasso + `pg_select` on the tridiagonal model.
pub fn pg_recovery(reps: u64) -> (f64, f64) {
    let (p, n) = (20, 500);
    let k = tridiagonal_precision(p, -0.45);
    let truth = support_graph(&k);
    let (mut tpr, mut fpr) = (0.0, 0.0);
    for r in 0..reps {
        let d = gaussian_with_precision(&k, n, 900 + r);
        let cfg = PgConfig::defaults_for(n, p);
        let est = glasso(&sample_covariance(&d), &cfg).unwrap();
        let g: Graph = pg_select(&est, cfg.t_n).unwrap();
        let rates = condgraph_core::tpr_fpr(&g, &truth).unwrap();
        tpr += rates.tpr;
        fpr += rates.fpr;
    }
    (tpr / reps as f64, fpr / reps as f64)
}
