//! Small dense helpers for the enumeration oracle and tests.

use ndarray::{Array1, Array2};

/// Solve `g * x = b` for symmetric positive-definite `g` via Cholesky.
///
/// Returns `None` when the factorization hits a non-positive pivot,
/// i.e. the matrix is singular or indefinite at working precision.
pub(crate) fn cholesky_solve(g: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let n = g.nrows();
    debug_assert_eq!(g.ncols(), n);
    debug_assert_eq!(b.len(), n);
    if n == 0 {
        return Some(Array1::zeros(0));
    }
    let scale = g
        .diag()
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1.0);
    let pivot_tol = 1e-12 * scale;

    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= pivot_tol {
                    return None;
                }
                l[[i, j]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }

    // Forward then backward substitution.
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let mut sum = b[i];
        for j in 0..i {
            sum -= l[[i, j]] * y[j];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = Array1::zeros(n);
    for i in (0..n).rev() {
        let mut sum = y[i];
        for j in i + 1..n {
            sum -= l[[j, i]] * x[j];
        }
        x[i] = sum / l[[i, i]];
    }
    Some(x)
}
