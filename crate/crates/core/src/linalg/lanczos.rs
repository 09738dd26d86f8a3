//! Lanczos iteration with full reorthogonalization for the largest eigenvalue of a
//! symmetric positive semidefinite operator.

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosResult {
    pub value: f64,
    /// Residual norm `||A x - value x||` of the Ritz vector.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest eigenvalue of `op` (applied as `op(x, y)` writing `y = A x`) on `R^n`.
pub fn largest_eigenvalue<F>(n: usize, op: F, rel_tol: f64, max_iter: usize) -> LanczosResult
where
    F: Fn(&[f64], &mut [f64]),
{
    if n == 0 {
        return LanczosResult { value: 0.0, residual: 0.0, iterations: 0, converged: true };
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin()).collect();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best = LanczosResult { value: 0.0, residual: f64::INFINITY, iterations: 0, converged: false };
    let kmax = max_iter.min(n);
    for k in 0..kmax {
        op(&basis[k], &mut w);
        let a = dot(&w, &basis[k]);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnorm = dot(&w, &w).sqrt();
        let check = k < 10 || k % 5 == 4 || k + 1 == kmax || bnorm <= 1e-300;
        if !check {
            beta.push(bnorm);
            let next: Vec<f64> = w.iter().map(|x| x / bnorm).collect();
            basis.push(next);
            continue;
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imax, &theta) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let last = eig.eigenvectors[(m - 1, imax)];
        let resid = (bnorm * last).abs();
        best = LanczosResult { value: theta, residual: resid, iterations: k + 1, converged: false };
        if resid <= rel_tol * theta.abs() || bnorm <= 1e-300 {
            best.converged = true;
            break;
        }
        beta.push(bnorm);
        let next: Vec<f64> = w.iter().map(|x| x / bnorm).collect();
        basis.push(next);
    }
    if basis.len() == n && !best.converged {
        best.converged = true;
    }
    best
}
