//! Proximal gradient on `-log det K + tr(SK) + lambda sum_{i != j} |K_ij|`
//! with backtracking; slow but independent of the block solver.

use nalgebra::DMatrix;

fn smooth(s: &DMatrix<f64>, k: &DMatrix<f64>) -> Option<f64> {
    let chol = k.clone().cholesky()?;
    let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    Some(-logdet + (s * k).trace())
}

fn penalty(k: &DMatrix<f64>, lambda: f64) -> f64 {
    let p = k.nrows();
    let mut acc = 0.0;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                acc += k[(i, j)].abs();
            }
        }
    }
    lambda * acc
}

pub fn objective(s: &DMatrix<f64>, k: &DMatrix<f64>, lambda: f64) -> Option<f64> {
    Some(smooth(s, k)? + penalty(k, lambda))
}

fn prox(x: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        let v = x[(i, j)];
        if i == j {
            v
        } else {
            v.signum() * (v.abs() - t).max(0.0)
        }
    })
}

pub fn solve(s: &DMatrix<f64>, lambda: f64, tol: f64, max_iter: usize) -> DMatrix<f64> {
    let p = s.nrows();
    let mut k = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0 / (s[(i, i)] + lambda)
        } else {
            0.0
        }
    });
    let mut step = 1.0;
    for _ in 0..max_iter {
        let f = smooth(s, &k).expect("iterate stays positive definite");
        let inv = k.clone().try_inverse().expect("invertible iterate");
        let grad = s - &inv;
        let next = loop {
            let cand = prox(&(&k - &grad * step), step * lambda);
            let cand = (&cand + cand.transpose()) * 0.5;
            if let Some(fc) = smooth(s, &cand) {
                let d = &cand - &k;
                let model = f + grad.dot(&d) + d.norm_squared() / (2.0 * step);
                if fc <= model + 1e-15 {
                    break cand;
                }
            }
            step *= 0.5;
            assert!(step > 1e-20, "line search failed");
        };
        let change = (&next - &k).amax();
        k = next;
        step *= 2.0;
        if change < tol {
            break;
        }
    }
    k
}
