//! Dense and Lanczos extremal eigensolvers for the Laplacian.

use faer::{Mat, Par, Side};

use super::{dot, norm2, residual, Laplacian};
use crate::error::{LabError, Result};

/// Smallest nonzero and largest eigenvalue, with an eigenvector for the former.
#[derive(Debug, Clone)]
pub struct Extremes {
    pub lambda1: f64,
    pub lambda_max: f64,
    pub vector: Vec<f64>,
}

pub const LANCZOS_MAX_ITER: usize = 1200;
const RITZ_TOL: f64 = 1e-10;

fn eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    faer::set_global_parallelism(Par::Seq);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| LabError::NoConvergence {
            residual: f64::NAN,
            detail: format!("{e:?}"),
        })?;
    let s = evd.S().column_vector();
    let values = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn dense_extremes(lap: &Laplacian) -> Result<Extremes> {
    let n = lap.order();
    let (values, vectors) = eigen(&lap.dense())?;
    Ok(Extremes {
        lambda1: values[1],
        lambda_max: values[n - 1],
        vector: (0..n).map(|i| vectors[(i, 1)]).collect(),
    })
}

fn remove_mean(v: &mut [f64]) {
    let mean = super::pairwise_sum(v) / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Lanczos with full reorthogonalisation on the complement of the constants.
///
/// The start vector and every reduction are fixed, so the result is
/// reproducible bit for bit.
pub fn lanczos_extremes(lap: &Laplacian, tol: f64) -> Result<Extremes> {
    let n = lap.order();
    let max_iter = (n - 1).min(LANCZOS_MAX_ITER);
    let mut v: Vec<f64> = (0..n)
        .map(|i| ((i + 1) as f64 * 0.618_033_988_749_894_9).fract() - 0.5)
        .collect();
    remove_mean(&mut v);
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut next_check = 16usize.min(max_iter);
    let ritz_tol = RITZ_TOL.min(tol);
    loop {
        let j = basis.len() - 1;
        lap.apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        axpy(&mut w, -a, &basis[j]);
        if j > 0 {
            axpy(&mut w, -beta[j - 1], &basis[j - 1]);
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(&mut w, -c, q);
            }
            remove_mean(&mut w);
        }
        let b = norm2(&w);
        let m = alpha.len();
        let exhausted = b < 1e-12 || m >= max_iter;
        if m >= next_check || exhausted {
            let t = Mat::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let (theta, y) = eigen(&t)?;
            let lo = b * y[(m - 1, 0)].abs();
            let hi = b * y[(m - 1, m - 1)].abs();
            if (lo <= ritz_tol && hi <= ritz_tol) || exhausted {
                let mut vector = vec![0.0; n];
                for (i, q) in basis.iter().enumerate() {
                    axpy(&mut vector, y[(i, 0)], q);
                }
                let r = residual(lap, theta[0], &vector);
                if r > 1e-8 {
                    return Err(LabError::NoConvergence {
                        residual: r,
                        detail: format!("Lanczos stopped after {m} steps"),
                    });
                }
                return Ok(Extremes {
                    lambda1: theta[0],
                    lambda_max: theta[m - 1],
                    vector,
                });
            }
            next_check = (next_check + 8).max(next_check * 5 / 4).min(max_iter);
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}
