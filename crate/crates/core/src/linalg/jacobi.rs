//! One-sided Jacobi singular values in double-double precision.

use super::dd::Dd;

/// Singular values (descending) of a column-major matrix given as a list of columns.
pub fn singular_values_dd(mut cols: Vec<Vec<Dd>>) -> Vec<Dd> {
    let n = cols.len();
    let tol = 1e-31;
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (mut al, mut be, mut ga) = (Dd::ZERO, Dd::ZERO, Dd::ZERO);
                for (x, y) in cols[i].iter().zip(&cols[j]) {
                    al = al + *x * *x;
                    be = be + *y * *y;
                    ga = ga + *x * *y;
                }
                if ga.hi == 0.0 || ga.abs().hi <= tol * (al.hi * be.hi).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (be - al) / (Dd::new(2.0) * ga);
                let root = (Dd::ONE + zeta * zeta).sqrt();
                let t = if zeta.hi >= 0.0 { Dd::ONE / (zeta + root) } else { -(Dd::ONE / (root - zeta)) };
                let c = Dd::ONE / (Dd::ONE + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let xi = *x;
                    let yj = *y;
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<Dd> = cols.iter().map(|c| c.iter().fold(Dd::ZERO, |a, x| a + *x * *x).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}
