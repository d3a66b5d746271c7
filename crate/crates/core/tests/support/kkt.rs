//! First-order conditions of `1/2 ||m - s||_F^2 + lambda sum_{i != j} |s_ij|`.

use nalgebra::DMatrix;

/// Largest violation of the subgradient conditions at `s`.
pub fn soft_threshold_violation(m: &DMatrix<f64>, s: &DMatrix<f64>, lambda: f64) -> f64 {
    let p = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let g = m[(i, j)] - s[(i, j)];
            let v = if i == j {
                g.abs()
            } else if s[(i, j)] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * s[(i, j)].signum()).abs()
            };
            worst = worst.max(v);
        }
    }
    worst
}

pub fn objective(m: &DMatrix<f64>, s: &DMatrix<f64>, lambda: f64) -> f64 {
    let p = m.nrows();
    let mut fit = 0.0;
    let mut pen = 0.0;
    for i in 0..p {
        for j in 0..p {
            fit += (m[(i, j)] - s[(i, j)]).powi(2);
            if i != j {
                pen += s[(i, j)].abs();
            }
        }
    }
    0.5 * fit + lambda * pen
}
